#include "sorl/core.hpp"

#include <algorithm>
#include <unordered_map>

namespace sorl {

bool valid_prop_name(const std::string& name) {
    if (name.empty()) return false;
    if (name[0] < 'a' || name[0] > 'z') return false;
    for (char c : name) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
        if (!ok) return false;
    }
    return true;
}

Proposition::Proposition(std::string n) : name(std::move(n)) {
    if (!valid_prop_name(name)) {
        throw VocabularyError("invalid proposition name: '" + name + "'");
    }
}

Vocabulary::Vocabulary(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.empty()) throw VocabularyError("vocabulary must be non-empty");
    if (names_.size() > kMaxVocabSize) {
        throw VocabularyError("vocabulary exceeds " + std::to_string(kMaxVocabSize) +
                              " propositions");
    }
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (!valid_prop_name(names_[i])) {
            throw VocabularyError("invalid proposition name: '" + names_[i] + "'");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (names_[j] == names_[i]) {
                throw VocabularyError("duplicate proposition '" + names_[i] + "' in vocabulary");
            }
        }
    }
}

std::optional<std::size_t> Vocabulary::find(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i] == name) return i;
    }
    return std::nullopt;
}

std::size_t Vocabulary::index_of(const std::string& name) const {
    if (auto i = find(name)) return *i;
    throw VocabularyError("proposition '" + name + "' not in vocabulary");
}

PropMask Vocabulary::mask_of(const std::vector<std::string>& props) const {
    PropMask m = 0;
    for (const auto& p : props) m |= PropMask{1} << index_of(p);
    return m;
}

std::vector<std::string> Vocabulary::props_of(PropMask mask) const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (mask & (PropMask{1} << i)) out.push_back(names_[i]);
    }
    return out;
}

VocabPtr make_vocabulary(std::vector<std::string> names) {
    return std::make_shared<const Vocabulary>(std::move(names));
}

bool SymbolicState::holds(const std::string& prop) const {
    if (!vocab) throw VocabularyError("state has no vocabulary");
    return bits & (PropMask{1} << vocab->index_of(prop));
}

std::vector<std::string> SymbolicState::props() const {
    if (!vocab) throw VocabularyError("state has no vocabulary");
    return vocab->props_of(bits);
}

ActionModel ActionModel::make(std::string name, VocabPtr vocab, PropMask pre_pos, PropMask pre_neg,
                              PropMask eff_pos, PropMask eff_neg, double gain) {
    if (!vocab) throw VocabularyError("action model needs a vocabulary");
    const PropMask full = vocab->full_mask();
    if (!mask_subset(pre_pos | pre_neg | eff_pos | eff_neg, full)) {
        throw VocabularyError("action '" + name + "' references propositions outside vocabulary");
    }
    if (pre_pos & pre_neg) {
        throw VocabularyError("action '" + name + "': pre+ and pre- overlap");
    }
    if (eff_pos & eff_neg) {
        throw VocabularyError("action '" + name + "': eff+ and eff- overlap");
    }
    if (eff_pos & pre_pos) {
        throw VocabularyError("action '" + name + "': eff+ overlaps pre+");
    }
    if (!mask_subset(eff_neg, pre_pos)) {
        throw VocabularyError("action '" + name + "': eff- not a subset of pre+");
    }
    ActionModel a;
    a.name = std::move(name);
    a.vocab = std::move(vocab);
    a.pre_pos = pre_pos;
    a.pre_neg = pre_neg;
    a.eff_pos = eff_pos;
    a.eff_neg = eff_neg;
    a.gain = gain;
    return a;
}

namespace {

// Identical contents (same names, same order) count as the same vocabulary.
void require_shared_vocab(const SymbolicState& s, const ActionModel& a) {
    if (!s.vocab || !a.vocab) throw VocabularyError("missing vocabulary");
    if (s.vocab == a.vocab || *s.vocab == *a.vocab) return;
    const auto& sn = s.vocab->names();
    const auto& an = a.vocab->names();
    for (const auto& n : an) {
        if (std::find(sn.begin(), sn.end(), n) == sn.end()) {
            throw VocabularyError("action '" + a.name + "' uses proposition '" + n +
                                  "' foreign to the state's vocabulary");
        }
    }
    for (const auto& n : sn) {
        if (std::find(an.begin(), an.end(), n) == an.end()) {
            throw VocabularyError("state holds proposition '" + n +
                                  "' foreign to action '" + a.name + "'");
        }
    }
    throw VocabularyError("state and action '" + a.name +
                          "' order their vocabularies differently");
}

}  // namespace

bool applicable(const SymbolicState& s, const ActionModel& a) {
    require_shared_vocab(s, a);
    return mask_subset(a.pre_pos, s.bits) && (s.bits & a.pre_neg) == 0;
}

SymbolicState apply(const SymbolicState& s, const ActionModel& a) {
    if (!applicable(s, a)) {
        const PropMask missing = a.pre_pos & ~s.bits;
        const PropMask forbidden = s.bits & a.pre_neg;
        std::vector<std::string> unmet = a.vocab->props_of(missing);
        for (auto& p : a.vocab->props_of(forbidden)) unmet.push_back("not " + p);
        std::string msg = "action '" + a.name + "' not applicable; unmet:";
        for (const auto& u : unmet) msg += " " + u;
        throw PreconditionViolation(msg, std::move(unmet));
    }
    return SymbolicState(s.vocab, (s.bits & ~a.eff_neg) | a.eff_pos);
}

ActionModel induce_action_model(const StatePair& pair, std::size_t index, double gain,
                                const VocabPtr& vocab) {
    const PropMask s1 = pair.before.bits;
    const PropMask s2 = pair.after.bits;
    return ActionModel::make(action_index_name(index), vocab,
                             /*pre_pos=*/s1,
                             /*pre_neg=*/vocab->full_mask() & ~s1,
                             /*eff_pos=*/s2 & ~s1,
                             /*eff_neg=*/s1 & ~s2, gain);
}

std::string action_index_name(std::size_t index) { return "act_" + std::to_string(index); }

}  // namespace sorl
