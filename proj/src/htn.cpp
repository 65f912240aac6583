#include "sorl/htn.hpp"

#include <algorithm>

namespace sorl::htn {

bool task_satisfied(const Task& t, const SymbolicState& s) {
    return mask_subset(t.require_pos, s.bits) && (s.bits & t.require_neg) == 0;
}

namespace {

const ActionModel* find_action(const std::vector<ActionModel>& actions, const std::string& name) {
    for (const auto& a : actions) {
        if (a.name == name) return &a;
    }
    return nullptr;
}

}  // namespace

GeneratedMethods generate_method_models(const Trace& trace, const std::vector<Task>& tasks,
                                        const std::vector<ActionModel>& actions) {
    // Consistency first: recorded states must replay through the named actions.
    SymbolicState state = trace.initial;
    for (std::size_t k = 0; k < trace.steps.size(); ++k) {
        const auto& [name, recorded] = trace.steps[k];
        const ActionModel* a = find_action(actions, name);
        if (!a) throw TraceError("unknown action '" + name + "'", k);
        if (!applicable(state, *a)) throw TraceError("action '" + name + "' not applicable", k);
        state = apply(state, *a);
        if (state != recorded) throw TraceError("state mismatch after '" + name + "'", k);
    }

    GeneratedMethods out;
    std::size_t cursor = 0;
    std::size_t task_i = 0;
    SymbolicState cursor_state = trace.initial;
    for (std::size_t k = 0; k < trace.steps.size() && task_i < tasks.size(); ++k) {
        if (!task_satisfied(tasks[task_i], trace.steps[k].second)) continue;
        MethodModel m;
        m.task = tasks[task_i].name;
        m.precondition = cursor_state;
        for (std::size_t j = cursor; j <= k; ++j) m.subactions.push_back(trace.steps[j].first);
        m.name = "m_" + m.task + "_" + std::to_string(out.methods.size());
        const bool dup = std::any_of(out.methods.begin(), out.methods.end(), [&](const auto& e) {
            return e.task == m.task && e.subactions == m.subactions;
        });
        if (!dup) {
            out.map[m.name] = m.task;
            out.methods.push_back(std::move(m));
        }
        cursor = k + 1;
        cursor_state = trace.steps[k].second;
        ++task_i;
    }
    return out;
}

std::vector<std::string> HtnPlan::flattened() const {
    std::vector<std::string> out;
    for (const auto& s : steps) out.insert(out.end(), s.actions.begin(), s.actions.end());
    return out;
}

namespace {

// Replays `names` from `from`; nullopt when some step is missing or blocked.
std::optional<SymbolicState> project(const SymbolicState& from,
                                     const std::vector<std::string>& names,
                                     const std::vector<ActionModel>& actions) {
    SymbolicState s = from;
    for (const auto& n : names) {
        const ActionModel* a = find_action(actions, n);
        if (!a) throw std::logic_error("method references unknown action '" + n + "'");
        if (!applicable(s, *a)) return std::nullopt;
        s = apply(s, *a);
    }
    return s;
}

double summed_gain(const std::vector<std::string>& names,
                   const std::vector<ActionModel>& actions) {
    double g = 0.0;
    for (const auto& n : names) {
        if (const ActionModel* a = find_action(actions, n)) g += a->gain;
    }
    return g;
}

}  // namespace

std::optional<HtnPlan> htn_solve(const SymbolicState& initial, const VocabPtr& vocab,
                                 const std::vector<ActionModel>& actions,
                                 const std::vector<MethodModel>& methods,
                                 const std::vector<Task>& tasks, std::uint64_t node_budget) {
    HtnPlan plan;
    SymbolicState current = initial;
    for (const auto& task : tasks) {
        if (task_satisfied(task, current)) continue;

        struct Choice {
            const MethodModel* method;
            SymbolicState end;
            bool pre_match;
            double gain;
        };
        std::vector<Choice> viable;
        for (const auto& m : methods) {
            if (m.task != task.name) continue;
            const auto end = project(current, m.subactions, actions);
            if (!end || !task_satisfied(task, *end)) continue;
            viable.push_back({&m, *end, m.precondition == current,
                              summed_gain(m.subactions, actions)});
        }
        std::sort(viable.begin(), viable.end(), [](const Choice& a, const Choice& b) {
            if (a.pre_match != b.pre_match) return a.pre_match;
            if (a.gain != b.gain) return a.gain > b.gain;
            return a.method->name < b.method->name;
        });

        if (!viable.empty()) {
            const Choice& c = viable.front();
            plan.steps.push_back({task.name, c.method->name, c.method->subactions});
            plan.quality += c.gain;
            current = c.end;
            continue;
        }

        // Bridge: reach any method precondition for this task, or the task
        // condition directly.
        std::vector<PropMask> method_pres;
        for (const auto& m : methods) {
            if (m.task == task.name) method_pres.push_back(m.precondition.bits);
        }
        planner::PlanningProblem bridge_problem;
        bridge_problem.initial = current;
        bridge_problem.vocab = vocab;
        bridge_problem.actions = actions;
        const auto goal = [&](PropMask s) {
            if (mask_subset(task.require_pos, s) && (s & task.require_neg) == 0) return true;
            return std::find(method_pres.begin(), method_pres.end(), s) != method_pres.end();
        };
        const auto bridge = planner::solve_to_goal(bridge_problem, goal, node_budget);
        if (!bridge) return std::nullopt;
        SymbolicState bridged = *project(current, bridge->steps, actions);

        if (task_satisfied(task, bridged)) {
            plan.steps.push_back({task.name, "", bridge->steps});
            plan.quality += bridge->quality;
            current = bridged;
            continue;
        }
        // Bridged to a method precondition; pick the best method that now fits.
        viable.clear();
        for (const auto& m : methods) {
            if (m.task != task.name || !(m.precondition == bridged)) continue;
            const auto end = project(bridged, m.subactions, actions);
            if (!end || !task_satisfied(task, *end)) continue;
            viable.push_back({&m, *end, true, summed_gain(m.subactions, actions)});
        }
        if (viable.empty()) return std::nullopt;
        std::sort(viable.begin(), viable.end(), [](const Choice& a, const Choice& b) {
            if (a.gain != b.gain) return a.gain > b.gain;
            return a.method->name < b.method->name;
        });
        const Choice& c = viable.front();
        HtnPlanStep step{task.name, c.method->name, bridge->steps};
        step.actions.insert(step.actions.end(), c.method->subactions.begin(),
                            c.method->subactions.end());
        plan.steps.push_back(std::move(step));
        plan.quality += bridge->quality + c.gain;
        current = c.end;
    }
    return plan;
}

double task_bonus(double r_e, const Task& t, const SymbolicState& s_after) {
    return task_satisfied(t, s_after) ? r_e + t.bonus : r_e;
}

std::vector<ActionModel> applicable_instances(const SymbolicState& s,
                                              const std::vector<ActionModel>& actions) {
    std::vector<ActionModel> out;
    for (const auto& a : actions) {
        if (applicable(s, a)) out.push_back(a);
    }
    return out;
}

}  // namespace sorl::htn
