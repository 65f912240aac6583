#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Propositional state algebra shared by every other component. States and
// proposition sets are bitmasks over a fixed, ordered vocabulary; the public
// types keep a handle to that vocabulary so mismatched mixes are caught with
// a usable diagnostic instead of silent garbage.
namespace sorl {

using PropMask = std::uint32_t;

constexpr std::size_t kMaxVocabSize = 32;

struct VocabularyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PreconditionViolation : std::runtime_error {
    explicit PreconditionViolation(const std::string& msg, std::vector<std::string> unmet_props)
        : std::runtime_error(msg), unmet(std::move(unmet_props)) {}
    std::vector<std::string> unmet;
};

// A named proposition. Names are lowercase [a-z][a-z0-9_]*.
struct Proposition {
    std::string name;

    explicit Proposition(std::string n);
    bool operator==(const Proposition& o) const { return name == o.name; }
};

bool valid_prop_name(const std::string& name);

// Ordered set of propositions (insertion order is the serialization order).
class Vocabulary {
public:
    explicit Vocabulary(std::vector<std::string> names);

    std::size_t size() const { return names_.size(); }
    const std::string& name(std::size_t i) const { return names_.at(i); }
    const std::vector<std::string>& names() const { return names_; }

    // Index of `name`, or nullopt when the vocabulary does not contain it.
    std::optional<std::size_t> find(const std::string& name) const;
    std::size_t index_of(const std::string& name) const;  // throws VocabularyError

    PropMask mask_of(const std::vector<std::string>& props) const;
    std::vector<std::string> props_of(PropMask mask) const;
    PropMask full_mask() const {
        return names_.size() >= kMaxVocabSize ? ~PropMask{0}
                                              : (PropMask{1} << names_.size()) - 1;
    }

    bool operator==(const Vocabulary& o) const { return names_ == o.names_; }

private:
    std::vector<std::string> names_;
};

using VocabPtr = std::shared_ptr<const Vocabulary>;

VocabPtr make_vocabulary(std::vector<std::string> names);

// Closed-world symbolic state: propositions in `bits` hold, all others are false.
struct SymbolicState {
    VocabPtr vocab;
    PropMask bits = 0;

    SymbolicState() = default;
    SymbolicState(VocabPtr v, PropMask b) : vocab(std::move(v)), bits(b) {}

    bool holds(const std::string& prop) const;
    std::vector<std::string> props() const;

    bool operator==(const SymbolicState& o) const { return bits == o.bits; }
    bool operator!=(const SymbolicState& o) const { return bits != o.bits; }
};

// Grounded action record. Learned models snapshot a full state in their
// preconditions; hand-built ones only need the set invariants below.
struct ActionModel {
    std::string name;
    VocabPtr vocab;
    PropMask pre_pos = 0;
    PropMask pre_neg = 0;
    PropMask eff_pos = 0;
    PropMask eff_neg = 0;
    double gain = 0.0;

    // Validates: pre_pos/pre_neg disjoint, eff_pos/eff_neg disjoint,
    // eff_pos disjoint from pre_pos, eff_neg a subset of pre_pos.
    static ActionModel make(std::string name, VocabPtr vocab, PropMask pre_pos, PropMask pre_neg,
                            PropMask eff_pos, PropMask eff_neg, double gain);
};

struct StatePair {
    SymbolicState before;
    SymbolicState after;
};

struct Plan {
    std::vector<std::string> steps;  // action names, in execution order
    double quality = 0.0;            // sum of the referenced actions' gains

    bool empty() const { return steps.empty(); }
};

inline bool mask_subset(PropMask a, PropMask b) { return (a & ~b) == 0; }

// True iff a.pre_pos ⊆ s and s ∩ a.pre_neg = ∅. Throws VocabularyError when
// s and a are built over different vocabularies, naming a foreign proposition.
bool applicable(const SymbolicState& s, const ActionModel& a);

// Progression: (s − eff_neg) ∪ eff_pos. Throws PreconditionViolation carrying
// the unmet propositions when `a` is not applicable in `s`.
SymbolicState apply(const SymbolicState& s, const ActionModel& a);

// Builds the grounded model induced by one observed transition:
// pre_pos = s1, pre_neg = vocab − s1, eff_pos = s2 − s1, eff_neg = s1 − s2.
ActionModel induce_action_model(const StatePair& pair, std::size_t index, double gain,
                                const VocabPtr& vocab);

std::string action_index_name(std::size_t index);

}  // namespace sorl
