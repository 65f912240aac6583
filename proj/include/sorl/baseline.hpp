#pragma once

#include <random>
#include <unordered_map>
#include <vector>

#include "sorl/core.hpp"
#include "sorl/options.hpp"

// Goal-based tabular HRL baseline: a q-table meta level choosing among a
// fixed goal set (frozen symbolic-option structures), with the same low-level
// learner as the symbolic agent.
namespace sorl::baseline {

class MetaPolicy {
public:
    MetaPolicy(std::size_t n_goals, double alpha, double gamma, options::EpsilonSchedule eps)
        : n_goals_(n_goals), alpha_(alpha), gamma_(gamma), eps_(eps) {}

    double q(PropMask s, std::size_t goal) const;
    std::size_t n_goals() const { return n_goals_; }
    std::uint64_t selections() const { return selections_; }

    // Epsilon-greedy argmax over goals; ties break to the lowest goal id.
    std::size_t select(const SymbolicState& s, std::mt19937& rng);
    std::size_t greedy(const SymbolicState& s) const;

    // Same, restricted to goals with valid[g] != 0 (at least one required).
    std::size_t select_masked(const SymbolicState& s, const std::vector<char>& valid,
                              std::mt19937& rng);
    std::size_t greedy_masked(const SymbolicState& s, const std::vector<char>& valid) const;

    // One-step update with the option's accumulated external reward.
    void update(const SymbolicState& s, std::size_t goal, double cumulative_reward,
                const SymbolicState& next);

private:
    std::size_t n_goals_;
    double alpha_;
    double gamma_;
    options::EpsilonSchedule eps_;
    std::uint64_t selections_ = 0;
    std::unordered_map<PropMask, std::vector<double>> table_;
};

std::size_t meta_select(MetaPolicy& meta, const SymbolicState& s, std::mt19937& rng);
void meta_update(MetaPolicy& meta, const SymbolicState& s, std::size_t goal,
                 double cumulative_reward, const SymbolicState& next);

}  // namespace sorl::baseline
