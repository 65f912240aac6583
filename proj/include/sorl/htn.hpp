#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sorl/core.hpp"
#include "sorl/planner.hpp"

// HTN layer: method models learned by segmenting exploration traces against
// an ordered task list, and a total-order decomposition solver over them.
namespace sorl::htn {

struct Task {
    std::string name;
    PropMask require_pos = 0;
    PropMask require_neg = 0;
    double bonus = 100.0;  // R_T
};

struct MethodModel {
    std::string name;
    std::string task;
    SymbolicState precondition;            // full-state snapshot at the segment start
    std::vector<std::string> subactions;   // non-empty, ordered action names
};

struct Trace {
    SymbolicState initial;
    std::vector<std::pair<std::string, SymbolicState>> steps;  // (action, resulting state)
};

using MethodTaskMap = std::unordered_map<std::string, std::string>;

struct TraceError : std::runtime_error {
    TraceError(const std::string& msg, std::size_t step)
        : std::runtime_error(msg + " at step " + std::to_string(step)), step_index(step) {}
    std::size_t step_index;
};

bool task_satisfied(const Task& t, const SymbolicState& s);

struct GeneratedMethods {
    std::vector<MethodModel> methods;
    MethodTaskMap map;
};

// Left-to-right segmentation: whenever the earliest unsatisfied task becomes
// satisfied at step k, emit a method whose precondition is the state at the
// cursor and whose subactions are the steps cursor..k, then advance past k.
// Duplicates (same task, same subaction sequence) are dropped. A trace whose
// recorded states do not replay through the named actions is rejected with
// the first inconsistent step index.
GeneratedMethods generate_method_models(const Trace& trace, const std::vector<Task>& tasks,
                                        const std::vector<ActionModel>& actions);

struct HtnPlanStep {
    std::string task;
    std::string method;  // empty when the step is a direct bridge to the task
    std::vector<std::string> actions;
};

struct HtnPlan {
    std::vector<HtnPlanStep> steps;
    double quality = 0.0;  // sum of flattened action gains

    std::vector<std::string> flattened() const;
    bool empty() const { return steps.empty(); }
};

// Processes tasks in order. For each task, picks a learned method whose
// subaction sequence replays from the projected state (preferring an exact
// precondition match, then highest summed gain, then method name). When no
// method fits, bridges with the planner toward any method precondition for
// the task or the task condition itself. Returns nullopt if a task cannot
// be achieved.
std::optional<HtnPlan> htn_solve(const SymbolicState& initial, const VocabPtr& vocab,
                                 const std::vector<ActionModel>& actions,
                                 const std::vector<MethodModel>& methods,
                                 const std::vector<Task>& tasks,
                                 std::uint64_t node_budget = planner::kDefaultNodeBudget);

// r_e + R_T when the task condition holds in s_after, r_e otherwise.
double task_bonus(double r_e, const Task& t, const SymbolicState& s_after);

// All actions applicable in s, in the given order.
std::vector<ActionModel> applicable_instances(const SymbolicState& s,
                                              const std::vector<ActionModel>& actions);

}  // namespace sorl::htn
