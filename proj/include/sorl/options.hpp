#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "sorl/core.hpp"
#include "sorl/envs.hpp"

// Symbolic options: learned (pre, policy, eff) triples with tabular low-level
// policies, plus the always-available global random-walk option. Executing an
// option yields the symbolic state pair it traversed and the external reward
// it collected.
namespace sorl::options {

struct EpsilonSchedule {
    double start = 1.0;
    double end = 0.05;
    std::uint64_t decay_steps = 50'000;

    double at(std::uint64_t step) const {
        if (decay_steps == 0 || step >= decay_steps) return end;
        const double f = static_cast<double>(step) / static_cast<double>(decay_steps);
        return start + (end - start) * f;
    }
};

struct Transition {
    envs::LowState state;
    int action;
    double reward;  // intrinsic
    envs::LowState next;
};

class TabularPolicy {
public:
    TabularPolicy() = default;
    TabularPolicy(double alpha, double gamma, EpsilonSchedule eps)
        : alpha_(alpha), gamma_(gamma), eps_(eps) {}

    // Epsilon-greedy over the 4 moves; greedy ties break uniformly at random
    // so an untrained table behaves like a random walk rather than pinning to
    // one move.
    int select(envs::LowState s, std::mt19937& rng, std::uint64_t step, bool greedy) const;
    int greedy_action(envs::LowState s, std::mt19937& rng) const;
    std::array<bool, envs::kNumMoves> greedy_set(envs::LowState s) const;
    double q(envs::LowState s, int action) const;
    double max_q(envs::LowState s) const;
    void update(envs::LowState s, int action, double reward, envs::LowState next);

    double alpha() const { return alpha_; }
    double gamma() const { return gamma_; }
    const EpsilonSchedule& eps() const { return eps_; }
    const std::unordered_map<envs::LowState, std::array<double, envs::kNumMoves>>& table() const {
        return table_;
    }
    void set_q(envs::LowState s, int action, double value) { table_[s][action] = value; }

private:
    double alpha_ = 0.1;
    double gamma_ = 0.9;
    EpsilonSchedule eps_;
    std::unordered_map<envs::LowState, std::array<double, envs::kNumMoves>> table_;
};

// One-step Q-learning update: q += alpha * (r + gamma * max_a q(s',a) - q).
void q_update(TabularPolicy& policy, envs::LowState s, int action, double reward,
              envs::LowState next);

struct SymbolicOption {
    int id = 0;
    PropMask pre_pos = 0;
    PropMask pre_neg = 0;
    PropMask eff_pos = 0;
    PropMask eff_neg = 0;
    TabularPolicy policy;
    std::uint64_t trained_steps = 0;
    std::vector<Transition> replay;
    std::size_t replay_next = 0;  // ring cursor

    void remember(const Transition& t);
};

inline constexpr std::size_t kReplayCapacity = 8192;

// Initiation per the option's precondition sets: pre+ ⊆ F(s) and F(s)∩pre- = ∅.
bool initiation(const SymbolicOption& o, const SymbolicState& mapped);
bool initiation(PropMask pre_pos, PropMask pre_neg, const SymbolicState& mapped);

// Termination per the option's effects: eff+ ⊆ F(s) and eff- ∩ F(s) = ∅.
bool termination(const SymbolicOption& o, const SymbolicState& mapped);

// phi at option termination, the environment reward otherwise.
double intrinsic_reward(const SymbolicOption& o, const SymbolicState& mapped_next,
                        double env_reward, double phi);

struct OptionOutcome {
    std::optional<StatePair> pair;          // nullopt iff initiation failed
    std::optional<double> external_reward;  // accumulated environment reward
    bool success = false;
    int steps_used = 0;
};

struct ExecuteParams {
    int max_steps = 500;
    double phi = 100.0;
    bool learn = true;    // record replay + online updates
    bool greedy = false;  // force epsilon to zero (evaluation)
    // Initiation override: when set, gate on these sets instead of the
    // option's own (the per-action-model gate used during plan execution).
    std::optional<std::pair<PropMask, PropMask>> gate;
};

// Runs `opt` in `env` from `state` (mutated in place). Initiation failure
// returns {nullopt, nullopt, false, 0}. Otherwise runs epsilon-greedy steps,
// learning online with intrinsic rewards, until termination, max_steps, or
// the environment goes terminal. success=true only when the termination
// condition held at exit.
OptionOutcome execute_option(const envs::Env& env, envs::EnvState& state, SymbolicOption& opt,
                             std::mt19937& rng, const ExecuteParams& params);

// Global option: uniformly random moves until the symbolic state changes.
// Always initiable; no policy to train.
OptionOutcome execute_global_option(const envs::Env& env, envs::EnvState& state,
                                    std::mt19937& rng, int max_steps);

class OptionSet {
public:
    explicit OptionSet(double alpha = 0.1, double gamma = 0.9, EpsilonSchedule eps = {})
        : alpha_(alpha), gamma_(gamma), eps_(eps) {}

    // Options are keyed by their effect signature.
    int find_by_effects(PropMask eff_pos, PropMask eff_neg) const;
    int add(PropMask pre_pos, PropMask pre_neg, PropMask eff_pos, PropMask eff_neg);
    void union_preconditions(int id, PropMask pre_pos, PropMask pre_neg);

    SymbolicOption& at(int id) { return opts_.at(static_cast<std::size_t>(id)); }
    const SymbolicOption& at(int id) const { return opts_.at(static_cast<std::size_t>(id)); }
    std::size_t size() const { return opts_.size(); }
    std::vector<SymbolicOption>& all() { return opts_; }
    const std::vector<SymbolicOption>& all() const { return opts_; }

private:
    double alpha_;
    double gamma_;
    EpsilonSchedule eps_;
    std::vector<SymbolicOption> opts_;
};

// Structured-text snapshot of an option set (versioned header; q-values with
// full round-trip precision so greedy policies reload identically).
std::string save_options(const OptionSet& set, const Vocabulary& vocab);
OptionSet load_options(const std::string& text, const Vocabulary& vocab, double alpha,
                       double gamma, EpsilonSchedule eps);

}  // namespace sorl::options
