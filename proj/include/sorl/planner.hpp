#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sorl/core.hpp"

// Maximum-quality planning over grounded action models. The goal is the
// numeric condition quality > q_threshold, where quality is the sum of the
// gains of the plan's actions. Plans are simple paths: no symbolic state is
// visited twice, which also rules out zero-effect steps and keeps the search
// finite even when positive-gain loops exist in the model set.
namespace sorl::planner {

struct PlanningProblem {
    SymbolicState initial;
    VocabPtr vocab;
    std::vector<ActionModel> actions;
    double q_threshold = 0.0;
};

struct SearchStats {
    std::uint64_t nodes_expanded = 0;
    std::chrono::duration<double> elapsed{0};
    bool optimal = true;
};

struct SolveResult {
    std::optional<Plan> plan;
    SearchStats stats;
};

inline constexpr std::uint64_t kDefaultNodeBudget = 1'000'000;

// Best-gain simple-path search, depth-first with branch-and-bound. The bound
// for a partial path is its gain plus, for every unvisited state still
// reachable in the residual graph, the best positive gain of any edge
// entering that state. When the node budget runs out the best plan found so
// far is returned with stats.optimal = false.
SolveResult solve(const PlanningProblem& problem,
                  std::uint64_t node_budget = kDefaultNodeBudget);

// Exhaustive enumeration of all simple paths; same contract as solve.
// Refuses instances with more than 10 propositions or 14 actions.
std::optional<Plan> oracle_solve(const PlanningProblem& problem);

// Best-gain simple path ending in a state satisfying `goal` (the quality
// threshold is ignored; zero- and negative-gain paths are acceptable).
// Used by the HTN layer to bridge to a method precondition or a task
// condition. Returns a plan of length >= 1, or nullopt.
std::optional<Plan> solve_to_goal(const PlanningProblem& problem,
                                  const std::function<bool(PropMask)>& goal,
                                  std::uint64_t node_budget = kDefaultNodeBudget);

enum class ExternalStatus {
    kOk,
    kNoPlan,
    kMissingExecutable,
    kTimeout,
    kParseFailure,
};

struct ExternalResult {
    ExternalStatus status = ExternalStatus::kMissingExecutable;
    std::optional<Plan> plan;
    std::string detail;
};

// Runs an external Metric-FF style planner: serializes the problem, invokes
// `planner_path -o domain.pddl -f problem.pddl`, parses the transcript and
// recomputes quality from the named actions' gains. Timeout defaults to 30 s
// and can be overridden with the SORL_PLANNER_TIMEOUT environment variable
// (seconds). Any non-kOk/kNoPlan status is a signal to fall back to solve().
ExternalResult solve_external(const PlanningProblem& problem, const std::string& planner_path,
                              double timeout_seconds = 30.0);

}  // namespace sorl::planner
