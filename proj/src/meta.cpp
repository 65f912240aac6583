#include "sorl/meta.hpp"

#include <numeric>
#include <sstream>

#include "sorl/pddl.hpp"

namespace sorl::meta {

int RewardLedger::append(const StatePair& pair, double reward) {
    if (pair.before == pair.after) return -1;
    const auto k = key(pair);
    auto it = index_.find(k);
    if (it == index_.end()) {
        it = index_.emplace(k, entries_.size()).first;
        entries_.push_back(Entry{pair, {}});
    }
    entries_[it->second].rewards.push_back(reward);
    return static_cast<int>(it->second);
}

bool RewardLedger::contains(const StatePair& pair) const {
    return index_.count(key(pair)) != 0;
}

std::optional<std::size_t> RewardLedger::index_of(const StatePair& pair) const {
    const auto it = index_.find(key(pair));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

void SuccessTracker::ensure(std::size_t n) {
    if (windows_.size() < n) windows_.resize(n);
}

void SuccessTracker::record(std::size_t action_index, bool success) {
    ensure(action_index + 1);
    auto& w = windows_[action_index];
    w.results.push_back(success);
    if (success) ++w.successes;
    if (w.results.size() > kWindow) {
        if (w.results.front()) --w.successes;
        w.results.pop_front();
    }
}

double SuccessTracker::sr(std::size_t action_index) const {
    if (action_index >= windows_.size()) return 0.0;
    const auto& w = windows_[action_index];
    if (w.results.empty()) return 0.0;
    return static_cast<double>(w.successes) / static_cast<double>(w.results.size());
}

std::vector<double> SuccessTracker::snapshot() const {
    std::vector<double> out(windows_.size());
    for (std::size_t i = 0; i < windows_.size(); ++i) out[i] = sr(i);
    return out;
}

double exploration_reward(std::size_t i, const SuccessTracker& tracker,
                          std::optional<std::size_t> exploring, double c) {
    if (!exploring || *exploring != i) return 0.0;
    return c * (1.0 - tracker.sr(i));
}

std::optional<std::size_t> exploring_index(const SuccessTracker& tracker, double lambda) {
    for (std::size_t i = 0; i < tracker.size(); ++i) {
        if (tracker.sr(i) < lambda) return i;
    }
    return std::nullopt;
}

double compute_gain(const StatePair& pair, const RewardLedger& ledger,
                    const SuccessTracker& tracker, std::optional<std::size_t> exploring,
                    double c) {
    const auto idx = ledger.index_of(pair);
    if (!idx) throw std::logic_error("compute_gain: pair not in ledger");
    const auto& rewards = ledger.entry(*idx).rewards;
    const double mean =
        std::accumulate(rewards.begin(), rewards.end(), 0.0) / static_cast<double>(rewards.size());
    return mean + exploration_reward(*idx, tracker, exploring, c);
}

Generated generate_action_models(const RewardLedger& ledger, options::OptionSet& opts,
                                 const SuccessTracker& tracker, const VocabPtr& vocab, double c,
                                 double lambda) {
    Generated out;
    const auto exploring = exploring_index(tracker, lambda);
    for (std::size_t i = 0; i < ledger.size(); ++i) {
        const auto& entry = ledger.entry(i);
        const double gain = compute_gain(entry.pair, ledger, tracker, exploring, c);
        ActionModel model = induce_action_model(entry.pair, i, gain, vocab);
        int oid = opts.find_by_effects(model.eff_pos, model.eff_neg);
        if (oid >= 0) {
            opts.union_preconditions(oid, model.pre_pos, model.pre_neg);
        } else {
            oid = opts.add(model.pre_pos, model.pre_neg, model.eff_pos, model.eff_neg);
        }
        out.map[model.name] = oid;
        out.actions.push_back(std::move(model));
    }
    return out;
}

double planning_goal(double q_last) { return q_last; }

std::vector<int> options_for_plan(const Plan& plan, const ActionOptionMap& map) {
    std::vector<int> out;
    out.reserve(plan.steps.size());
    for (const auto& name : plan.steps) {
        const auto it = map.find(name);
        if (it == map.end()) {
            throw std::logic_error("plan step '" + name + "' has no mapped option");
        }
        out.push_back(it->second);
    }
    return out;
}

namespace {

std::string props_text(const Vocabulary& vocab, PropMask mask) {
    const auto props = vocab.props_of(mask);
    if (props.empty()) return "-";
    std::string out;
    for (std::size_t i = 0; i < props.size(); ++i) {
        if (i) out += " ";
        out += props[i];
    }
    return out;
}

}  // namespace

std::string dump_models(const Vocabulary& vocab, const std::vector<ActionModel>& actions,
                        const options::OptionSet& opts, const ActionOptionMap& map,
                        const SuccessTracker& tracker, const std::string& methods_section) {
    std::ostringstream out;
    out << "sorl-models v1\n";
    out << "vocab:";
    for (const auto& n : vocab.names()) out << " " << n;
    out << "\n\n";
    out << "# action models (" << actions.size() << ")\n";
    for (std::size_t i = 0; i < actions.size(); ++i) {
        const auto& a = actions[i];
        out << "action " << a.name << "\n";
        out << "  pre+: " << props_text(vocab, a.pre_pos) << "\n";
        out << "  pre-: " << props_text(vocab, a.pre_neg) << "\n";
        out << "  eff+: " << props_text(vocab, a.eff_pos) << "\n";
        out << "  eff-: " << props_text(vocab, a.eff_neg) << "\n";
        out << "  gain: " << pddl::format_real(a.gain) << "\n";
        out << "  sr: " << pddl::format_real(tracker.sr(i)) << "\n";
        const auto it = map.find(a.name);
        out << "  option: " << (it == map.end() ? -1 : it->second) << "\n";
    }
    out << "\n# options (" << opts.size() << ")\n";
    for (const auto& o : opts.all()) {
        out << "option " << o.id << "\n";
        out << "  pre+: " << props_text(vocab, o.pre_pos) << "\n";
        out << "  pre-: " << props_text(vocab, o.pre_neg) << "\n";
        out << "  eff+: " << props_text(vocab, o.eff_pos) << "\n";
        out << "  eff-: " << props_text(vocab, o.eff_neg) << "\n";
        out << "  actions:";
        bool any = false;
        for (const auto& a : actions) {
            const auto it = map.find(a.name);
            if (it != map.end() && it->second == o.id) {
                out << " " << a.name;
                any = true;
            }
        }
        if (!any) out << " -";
        out << "\n";
        out << "  trained_steps: " << o.trained_steps << "\n";
    }
    if (!methods_section.empty()) {
        out << "\n" << methods_section;
    }
    return out.str();
}

LoadedModels load_models_dump(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "sorl-models v1") {
        throw std::runtime_error("models dump: bad or missing header");
    }
    LoadedModels out;
    struct Raw {
        std::string name;
        std::vector<std::string> pre_pos, pre_neg, eff_pos, eff_neg;
        double gain = 0.0;
    };
    std::vector<Raw> raw;
    bool in_actions = true;
    auto read_props = [](std::istringstream& ls) {
        std::vector<std::string> props;
        std::string p;
        while (ls >> p) {
            if (p != "-") props.push_back(p);
        }
        return props;
    };
    while (std::getline(in, line)) {
        if (line.rfind("# options", 0) == 0 || line.rfind("# methods", 0) == 0) {
            in_actions = false;
            continue;
        }
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "vocab:") {
            std::vector<std::string> names;
            std::string n;
            while (ls >> n) names.push_back(n);
            out.vocab = make_vocabulary(std::move(names));
        } else if (in_actions && key == "action") {
            Raw r;
            ls >> r.name;
            raw.push_back(std::move(r));
        } else if (in_actions && !raw.empty()) {
            if (key == "pre+:") raw.back().pre_pos = read_props(ls);
            else if (key == "pre-:") raw.back().pre_neg = read_props(ls);
            else if (key == "eff+:") raw.back().eff_pos = read_props(ls);
            else if (key == "eff-:") raw.back().eff_neg = read_props(ls);
            else if (key == "gain:") ls >> raw.back().gain;
        }
    }
    if (!out.vocab) throw std::runtime_error("models dump: missing vocab line");
    for (const auto& r : raw) {
        out.actions.push_back(ActionModel::make(r.name, out.vocab, out.vocab->mask_of(r.pre_pos),
                                                out.vocab->mask_of(r.pre_neg),
                                                out.vocab->mask_of(r.eff_pos),
                                                out.vocab->mask_of(r.eff_neg), r.gain));
    }
    return out;
}

}  // namespace sorl::meta
