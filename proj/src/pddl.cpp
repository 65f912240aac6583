#include "sorl/pddl.hpp"

#include <cctype>
#include <cstdio>
#include <sstream>

namespace sorl::pddl {

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

namespace {

void emit_props(std::ostringstream& out, const Vocabulary& vocab, PropMask mask, bool negated) {
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        if (!(mask & (PropMask{1} << i))) continue;
        if (negated) {
            out << " (not (" << vocab.name(i) << "))";
        } else {
            out << " (" << vocab.name(i) << ")";
        }
    }
}

}  // namespace

std::string serialize_domain(const Vocabulary& vocab, const std::vector<ActionModel>& actions) {
    std::ostringstream out;
    out << "(define (domain sorl)\n";
    out << "  (:requirements :strips :fluents)\n";
    out << "  (:predicates";
    for (const auto& n : vocab.names()) out << " (" << n << ")";
    out << ")\n";
    out << "  (:functions (quality))\n";
    for (const auto& a : actions) {
        out << "  (:action " << a.name << "\n";
        out << "    :precondition (and";
        emit_props(out, vocab, a.pre_pos, false);
        emit_props(out, vocab, a.pre_neg, true);
        out << ")\n";
        out << "    :effect (and";
        emit_props(out, vocab, a.eff_pos, false);
        emit_props(out, vocab, a.eff_neg, true);
        out << " (increase (quality) " << format_real(a.gain) << "))\n";
        out << "  )\n";
    }
    out << ")\n";
    return out.str();
}

std::string serialize_problem(const SymbolicState& initial, double quality_threshold) {
    if (!initial.vocab) throw VocabularyError("initial state has no vocabulary");
    std::ostringstream out;
    out << "(define (problem sorl-problem)\n";
    out << "  (:domain sorl)\n";
    out << "  (:init";
    emit_props(out, *initial.vocab, initial.bits, false);
    out << " (= (quality) 0))\n";
    out << "  (:goal (> (quality) " << format_real(quality_threshold) << "))\n";
    out << "  (:metric maximize (quality))\n";
    out << ")\n";
    return out.str();
}

namespace {

// Minimal s-expression reader for the fragment serialize_domain emits.
struct Sexp {
    std::string atom;          // set when leaf
    std::vector<Sexp> items;   // set when list
    bool is_list = false;
};

struct Tokenizer {
    const std::string& text;
    std::size_t pos = 0;
    std::size_t line = 1;

    explicit Tokenizer(const std::string& t) : text(t) {}

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) {
            if (text[pos] == '\n') ++line;
            ++pos;
        }
    }

    std::string next() {
        skip_ws();
        if (pos >= text.size()) return {};
        const char c = text[pos];
        if (c == '(' || c == ')') {
            ++pos;
            return std::string(1, c);
        }
        std::size_t start = pos;
        while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) &&
               text[pos] != '(' && text[pos] != ')') {
            ++pos;
        }
        return text.substr(start, pos - start);
    }
};

Sexp read_sexp(Tokenizer& tok) {
    const std::size_t line = tok.line;
    std::string t = tok.next();
    if (t.empty()) throw ParseError("unexpected end of input", line);
    if (t == "(") {
        Sexp s;
        s.is_list = true;
        while (true) {
            tok.skip_ws();
            if (tok.pos >= tok.text.size()) throw ParseError("unbalanced '('", tok.line);
            if (tok.text[tok.pos] == ')') {
                ++tok.pos;
                return s;
            }
            s.items.push_back(read_sexp(tok));
        }
    }
    if (t == ")") throw ParseError("unbalanced ')'", line);
    Sexp s;
    s.atom = t;
    return s;
}

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

const Sexp& expect_list(const Sexp& s, const char* what) {
    if (!s.is_list) throw ParseError(std::string("expected list for ") + what, 1);
    return s;
}

std::string head(const Sexp& s) {
    if (!s.is_list || s.items.empty() || s.items[0].is_list) return {};
    return lower(s.items[0].atom);
}

// Reads one (p) / (not (p)) / (increase (quality) v) entry.
struct Clause {
    enum Kind { kPos, kNeg, kIncrease } kind;
    std::string prop;
    double value = 0.0;
};

Clause read_clause(const Sexp& s) {
    const std::string h = head(s);
    if (h == "not") {
        if (s.items.size() != 2 || !s.items[1].is_list || s.items[1].items.size() != 1) {
            throw ParseError("malformed (not ...) clause", 1);
        }
        return {Clause::kNeg, lower(s.items[1].items[0].atom), 0.0};
    }
    if (h == "increase") {
        if (s.items.size() != 3 || !s.items[2].atom.size()) {
            throw ParseError("malformed (increase ...) clause", 1);
        }
        return {Clause::kIncrease, "", std::stod(s.items[2].atom)};
    }
    if (s.items.size() != 1) throw ParseError("malformed proposition clause", 1);
    return {Clause::kPos, h, 0.0};
}

std::vector<Clause> read_and(const Sexp& s, const char* what) {
    expect_list(s, what);
    std::vector<Clause> out;
    if (head(s) == "and") {
        for (std::size_t i = 1; i < s.items.size(); ++i) out.push_back(read_clause(s.items[i]));
    } else if (!s.items.empty()) {
        out.push_back(read_clause(s));
    }
    return out;
}

}  // namespace

ParsedDomain parse_domain(const std::string& text) {
    Tokenizer tok(text);
    Sexp root = read_sexp(tok);
    if (head(root) != "define") throw ParseError("expected (define ...)", 1);

    std::vector<std::string> names;
    struct RawAction {
        std::string name;
        std::vector<Clause> pre, eff;
    };
    std::vector<RawAction> raw;

    for (std::size_t i = 1; i < root.items.size(); ++i) {
        const Sexp& sec = root.items[i];
        const std::string h = head(sec);
        if (h == ":predicates") {
            for (std::size_t j = 1; j < sec.items.size(); ++j) {
                const Sexp& p = expect_list(sec.items[j], ":predicates entry");
                if (p.items.size() != 1) throw ParseError("parameterized predicates unsupported", 1);
                names.push_back(lower(p.items[0].atom));
            }
        } else if (h == ":action") {
            RawAction a;
            if (sec.items.size() < 2 || sec.items[1].is_list) {
                throw ParseError("action without a name", 1);
            }
            a.name = lower(sec.items[1].atom);
            for (std::size_t j = 2; j + 1 < sec.items.size(); j += 2) {
                const std::string key = lower(sec.items[j].atom);
                if (key == ":precondition") {
                    a.pre = read_and(sec.items[j + 1], ":precondition");
                } else if (key == ":effect") {
                    a.eff = read_and(sec.items[j + 1], ":effect");
                } else {
                    throw ParseError("unknown action section '" + key + "'", 1);
                }
            }
            raw.push_back(std::move(a));
        }
        // (domain ...), (:requirements ...), (:functions ...) carry nothing we rebuild.
    }

    ParsedDomain out;
    out.vocab = make_vocabulary(std::move(names));
    for (std::size_t i = 0; i < raw.size(); ++i) {
        PropMask pp = 0, pn = 0, ep = 0, en = 0;
        double gain = 0.0;
        for (const auto& c : raw[i].pre) {
            if (c.kind == Clause::kPos) pp |= PropMask{1} << out.vocab->index_of(c.prop);
            else if (c.kind == Clause::kNeg) pn |= PropMask{1} << out.vocab->index_of(c.prop);
            else throw ParseError("increase clause inside precondition", 1);
        }
        for (const auto& c : raw[i].eff) {
            if (c.kind == Clause::kPos) ep |= PropMask{1} << out.vocab->index_of(c.prop);
            else if (c.kind == Clause::kNeg) en |= PropMask{1} << out.vocab->index_of(c.prop);
            else gain = c.value;
        }
        out.actions.push_back(
            ActionModel::make(raw[i].name, out.vocab, pp, pn, ep, en, gain));
    }
    return out;
}

std::vector<std::string> parse_external_plan(const std::string& text) {
    std::vector<std::string> steps;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t i = 0;
        auto skip_sp = [&] { while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i; };
        skip_sp();
        // Optional "step" prefix, as in Metric-FF's first plan line.
        if (lower(line.substr(i, 4)) == "step" && i + 4 < line.size() &&
            std::isspace(static_cast<unsigned char>(line[i + 4]))) {
            i += 4;
            skip_sp();
        }
        std::size_t digits = i;
        while (digits < line.size() && std::isdigit(static_cast<unsigned char>(line[digits]))) {
            ++digits;
        }
        if (digits == i) continue;  // not a step line
        std::size_t j = digits;
        while (j < line.size() && (line[j] == ' ' || line[j] == '\t')) ++j;
        if (j >= line.size() || line[j] != ':') continue;  // not a step line (e.g. a cost report)
        ++j;
        while (j < line.size() && (line[j] == ' ' || line[j] == '\t')) ++j;
        std::size_t tok_end = j;
        while (tok_end < line.size() && !std::isspace(static_cast<unsigned char>(line[tok_end]))) {
            ++tok_end;
        }
        std::string token = line.substr(j, tok_end - j);
        std::size_t rest = tok_end;
        while (rest < line.size() && std::isspace(static_cast<unsigned char>(line[rest]))) ++rest;
        if (token.empty() || rest != line.size()) {
            throw ParseError("malformed step line '" + line + "'", line_no);
        }
        token = lower(token);
        if (!valid_prop_name(token)) {
            throw ParseError("malformed action token '" + token + "'", line_no);
        }
        steps.push_back(token);
    }
    return steps;
}

}  // namespace sorl::pddl
