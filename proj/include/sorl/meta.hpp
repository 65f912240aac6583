#pragma once

#include <deque>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sorl/core.hpp"
#include "sorl/options.hpp"

// Meta-controller: induces action models from the reward ledger, keeps the
// action-to-option mapping, schedules sequential exploration and sets the
// planning goal.
namespace sorl::meta {

// Observed external rewards per symbolic state pair, in first-seen order so
// model indices stay stable across regenerations.
class RewardLedger {
public:
    struct Entry {
        StatePair pair;
        std::vector<double> rewards;
    };

    // Appends a reward for the pair, creating the entry on first sight.
    // Pairs with before == after are not recordable transitions and are
    // ignored (returns -1). Otherwise returns the pair's stable index.
    int append(const StatePair& pair, double reward);
    bool contains(const StatePair& pair) const;
    std::size_t size() const { return entries_.size(); }
    const Entry& entry(std::size_t i) const { return entries_.at(i); }
    const std::vector<Entry>& entries() const { return entries_; }
    std::optional<std::size_t> index_of(const StatePair& pair) const;

private:
    static std::uint64_t key(const StatePair& p) {
        return (static_cast<std::uint64_t>(p.before.bits) << 32) | p.after.bits;
    }
    std::vector<Entry> entries_;
    std::unordered_map<std::uint64_t, std::size_t> index_;
};

// Sliding success window (size 100) per action index.
class SuccessTracker {
public:
    void ensure(std::size_t n);
    void record(std::size_t action_index, bool success);
    // successes/attempts over the window; 0 when never attempted.
    double sr(std::size_t action_index) const;
    std::size_t size() const { return windows_.size(); }
    std::vector<double> snapshot() const;

    static constexpr std::size_t kWindow = 100;

private:
    struct Window {
        std::deque<bool> results;
        int successes = 0;
    };
    std::vector<Window> windows_;
};

using ActionOptionMap = std::unordered_map<std::string, int>;

// c * (1 - sr[i]) when i is the exploring index, 0 otherwise.
double exploration_reward(std::size_t i, const SuccessTracker& tracker,
                          std::optional<std::size_t> exploring, double c);

// Smallest index whose success ratio is below lambda, provided every earlier
// index meets it; nullopt when all indices do.
std::optional<std::size_t> exploring_index(const SuccessTracker& tracker, double lambda);

// Mean recorded external reward of the pair plus its exploration reward.
double compute_gain(const StatePair& pair, const RewardLedger& ledger,
                    const SuccessTracker& tracker, std::optional<std::size_t> exploring,
                    double c);

struct Generated {
    std::vector<ActionModel> actions;
    ActionOptionMap map;  // action name -> option id
};

// One model per distinct ledger pair (index = first-seen order). Each model
// either enlarges the preconditions of the option sharing its effect
// signature or creates a new symbolic option.
Generated generate_action_models(const RewardLedger& ledger, options::OptionSet& opts,
                                 const SuccessTracker& tracker, const VocabPtr& vocab, double c,
                                 double lambda);

// The next episode's goal threshold is the reward achieved by the last plan.
double planning_goal(double q_last);

// Option ids for the plan's steps, in order. An unmapped step is a learner
// bug and raises logic_error.
std::vector<int> options_for_plan(const Plan& plan, const ActionOptionMap& map);

// Human-readable interpretability dump of models, options and (optionally)
// HTN methods; also the input format understood by load_models_dump.
std::string dump_models(const Vocabulary& vocab, const std::vector<ActionModel>& actions,
                        const options::OptionSet& opts, const ActionOptionMap& map,
                        const SuccessTracker& tracker, const std::string& methods_section = "");

// Reads the action-model section of a dump back into memory (for export-pddl).
struct LoadedModels {
    VocabPtr vocab;
    std::vector<ActionModel> actions;
};
LoadedModels load_models_dump(const std::string& text);

}  // namespace sorl::meta
