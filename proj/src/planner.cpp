#include "sorl/planner.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <unordered_map>

#include "sorl/pddl.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

namespace sorl::planner {

namespace {

struct Candidate {
    std::vector<int> steps;  // action indices
    double quality = 0.0;
    bool valid = false;
};

// quality desc, then length asc, then lexicographic action-name order.
bool better(const Candidate& a, const Candidate& b,
            const std::vector<ActionModel>& actions) {
    if (!b.valid) return a.valid;
    if (a.quality != b.quality) return a.quality > b.quality;
    if (a.steps.size() != b.steps.size()) return a.steps.size() < b.steps.size();
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
        const std::string& an = actions[a.steps[i]].name;
        const std::string& bn = actions[b.steps[i]].name;
        if (an != bn) return an < bn;
    }
    return false;
}

Plan to_plan(const Candidate& c, const std::vector<ActionModel>& actions) {
    Plan p;
    p.quality = c.quality;
    for (int idx : c.steps) p.steps.push_back(actions[idx].name);
    return p;
}

// Explicit reachable transition graph. Learned models pin full states in
// their preconditions, so this is small in practice; the node budget guards
// adversarial inputs.
struct Graph {
    std::vector<PropMask> states;
    std::unordered_map<PropMask, int> index;
    std::vector<std::vector<std::pair<int, int>>> out;  // node -> (action, target)
    std::vector<double> in_gain;                        // max positive entering gain
    bool truncated = false;

    int intern(PropMask s) {
        auto it = index.find(s);
        if (it != index.end()) return it->second;
        const int id = static_cast<int>(states.size());
        index.emplace(s, id);
        states.push_back(s);
        out.emplace_back();
        in_gain.push_back(0.0);
        return id;
    }
};

Graph build_graph(PropMask initial, const std::vector<ActionModel>& actions,
                  std::uint64_t max_states) {
    // Edge expansion in lexicographic action-name order keeps search
    // deterministic regardless of the caller's action ordering.
    std::vector<int> order(actions.size());
    for (std::size_t i = 0; i < actions.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return actions[a].name < actions[b].name;
    });

    Graph g;
    g.intern(initial);
    for (int n = 0; n < static_cast<int>(g.states.size()); ++n) {
        const PropMask s = g.states[n];
        for (int ai : order) {
            const ActionModel& a = actions[ai];
            if ((a.pre_pos & ~s) != 0 || (s & a.pre_neg) != 0) continue;
            const PropMask t = (s & ~a.eff_neg) | a.eff_pos;
            if (t == s) continue;  // zero-effect step, never taken
            if (g.index.find(t) == g.index.end() && g.states.size() >= max_states) {
                g.truncated = true;
                continue;
            }
            const int tid = g.intern(t);
            g.out[n].emplace_back(ai, tid);
            if (a.gain > g.in_gain[tid]) g.in_gain[tid] = a.gain;
        }
    }
    return g;
}

struct Search {
    const Graph& g;
    const std::vector<ActionModel>& actions;
    double q_threshold;
    bool goal_directed;
    const std::function<bool(PropMask)>* goal;
    std::uint64_t budget;

    std::uint64_t expanded = 0;
    bool exhausted = false;
    Candidate best;
    std::vector<char> visited;
    std::vector<int> path;

    // scratch for residual reachability
    std::vector<char> mark;
    std::vector<int> queue;

    Search(const Graph& graph, const std::vector<ActionModel>& acts, double q, bool gd,
           const std::function<bool(PropMask)>* gl, std::uint64_t b)
        : g(graph), actions(acts), q_threshold(q), goal_directed(gd), goal(gl), budget(b) {
        visited.assign(g.states.size(), 0);
        mark.assign(g.states.size(), 0);
    }

    // Optimistic completion bound: every unvisited state still reachable from
    // `node` can be entered at most once, earning at most its best positive
    // incoming gain. Also reports whether the goal is still reachable.
    double bound_from(int node, bool* goal_reachable) {
        std::fill(mark.begin(), mark.end(), 0);
        queue.clear();
        queue.push_back(node);
        mark[node] = 1;
        double extra = 0.0;
        bool goal_ok = !goal_directed;
        if (goal_directed && (*goal)(g.states[node])) goal_ok = true;
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            const int n = queue[qi];
            for (const auto& [ai, t] : g.out[n]) {
                (void)ai;
                if (mark[t] || visited[t]) continue;
                mark[t] = 1;
                extra += g.in_gain[t];
                if (goal_directed && (*goal)(g.states[t])) goal_ok = true;
                queue.push_back(t);
            }
        }
        if (goal_reachable) *goal_reachable = goal_ok;
        return extra;
    }

    bool accepts(double gain, std::size_t len, PropMask state) const {
        if (goal_directed) return len >= 1 && (*goal)(state);
        return len >= 1 && gain > q_threshold;
    }

    void consider(double gain) {
        Candidate c;
        c.steps = path;
        c.quality = gain;
        c.valid = true;
        if (better(c, best, actions)) best = std::move(c);
    }

    void dfs(int node, double gain) {
        if (exhausted) return;
        if (++expanded > budget) {
            exhausted = true;
            return;
        }
        visited[node] = 1;
        if (accepts(gain, path.size(), g.states[node])) consider(gain);

        bool goal_ok = true;
        const double ub = gain + bound_from(node, goal_directed ? &goal_ok : nullptr);
        bool prune = false;
        if (goal_directed && !goal_ok) prune = true;
        if (!goal_directed && ub <= q_threshold && !best.valid) prune = true;
        if (best.valid) {
            if (ub < best.quality) prune = true;
            else if (ub == best.quality && path.size() + 1 > best.steps.size()) prune = true;
        }
        if (!prune) {
            for (const auto& [ai, t] : g.out[node]) {
                if (visited[t]) continue;
                path.push_back(ai);
                dfs(t, gain + actions[ai].gain);
                path.pop_back();
                if (exhausted) break;
            }
        }
        visited[node] = 0;
    }
};

void check_problem(const PlanningProblem& p) {
    if (!p.vocab) throw VocabularyError("planning problem has no vocabulary");
    if (!p.initial.vocab || !(*p.initial.vocab == *p.vocab)) {
        throw VocabularyError("planning problem initial state vocabulary mismatch");
    }
    for (const auto& a : p.actions) {
        if (!a.vocab || !(*a.vocab == *p.vocab)) {
            throw VocabularyError("action '" + a.name + "' vocabulary mismatch");
        }
    }
}

}  // namespace

SolveResult solve(const PlanningProblem& problem, std::uint64_t node_budget) {
    check_problem(problem);
    const auto start = std::chrono::steady_clock::now();
    Graph g = build_graph(problem.initial.bits, problem.actions, node_budget);
    Search search(g, problem.actions, problem.q_threshold, false, nullptr, node_budget);
    search.dfs(0, 0.0);

    SolveResult res;
    res.stats.nodes_expanded = search.expanded;
    res.stats.elapsed = std::chrono::steady_clock::now() - start;
    res.stats.optimal = !search.exhausted && !g.truncated;
    if (search.best.valid) res.plan = to_plan(search.best, problem.actions);
    return res;
}

std::optional<Plan> oracle_solve(const PlanningProblem& problem) {
    check_problem(problem);
    if (problem.vocab->size() > 10) {
        throw std::invalid_argument("oracle_solve refused: vocabulary larger than 10");
    }
    if (problem.actions.size() > 14) {
        throw std::invalid_argument("oracle_solve refused: more than 14 actions");
    }

    const auto& actions = problem.actions;
    std::vector<int> order(actions.size());
    for (std::size_t i = 0; i < actions.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return actions[a].name < actions[b].name;
    });

    Candidate best;
    std::vector<int> path;
    std::vector<PropMask> seen{problem.initial.bits};

    // Plain recursion over every simple path; no pruning, no shared search
    // machinery with solve().
    auto rec = [&](auto&& self, PropMask s, double gain) -> void {
        if (!path.empty() && gain > problem.q_threshold) {
            Candidate c;
            c.steps = path;
            c.quality = gain;
            c.valid = true;
            if (better(c, best, actions)) best = std::move(c);
        }
        for (int ai : order) {
            const ActionModel& a = actions[ai];
            if ((a.pre_pos & ~s) != 0 || (s & a.pre_neg) != 0) continue;
            const PropMask t = (s & ~a.eff_neg) | a.eff_pos;
            if (std::find(seen.begin(), seen.end(), t) != seen.end()) continue;
            seen.push_back(t);
            path.push_back(ai);
            self(self, t, gain + a.gain);
            path.pop_back();
            seen.pop_back();
        }
    };
    rec(rec, problem.initial.bits, 0.0);

    if (!best.valid) return std::nullopt;
    return to_plan(best, actions);
}

std::optional<Plan> solve_to_goal(const PlanningProblem& problem,
                                  const std::function<bool(PropMask)>& goal,
                                  std::uint64_t node_budget) {
    check_problem(problem);
    Graph g = build_graph(problem.initial.bits, problem.actions, node_budget);
    Search search(g, problem.actions, 0.0, true, &goal, node_budget);
    search.dfs(0, 0.0);
    if (!search.best.valid) return std::nullopt;
    return to_plan(search.best, problem.actions);
}

namespace {

struct TempDir {
    std::string path;
    TempDir() {
        char tmpl[] = "/tmp/sorl-pddl-XXXXXX";
        if (!mkdtemp(tmpl)) throw std::runtime_error("mkdtemp failed");
        path = tmpl;
    }
    ~TempDir() {
        // best effort: remove the two files we created, then the directory
        ::unlink((path + "/domain.pddl").c_str());
        ::unlink((path + "/problem.pddl").c_str());
        ::rmdir(path.c_str());
    }
};

void write_file(const std::string& path, const std::string& text) {
    FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot write " + path);
    std::fwrite(text.data(), 1, text.size(), f);
    std::fclose(f);
}

}  // namespace

ExternalResult solve_external(const PlanningProblem& problem, const std::string& planner_path,
                              double timeout_seconds) {
    ExternalResult res;
    if (::access(planner_path.c_str(), X_OK) != 0) {
        res.status = ExternalStatus::kMissingExecutable;
        res.detail = "not executable: " + planner_path;
        return res;
    }
    if (const char* env = std::getenv("SORL_PLANNER_TIMEOUT")) {
        char* end = nullptr;
        const double t = std::strtod(env, &end);
        if (end != env && t > 0) timeout_seconds = t;
    }

    TempDir dir;
    const std::string dom = dir.path + "/domain.pddl";
    const std::string prob = dir.path + "/problem.pddl";
    write_file(dom, pddl::serialize_domain(*problem.vocab, problem.actions));
    write_file(prob, pddl::serialize_problem(problem.initial, problem.q_threshold));

    int fds[2];
    if (::pipe(fds) != 0) throw std::runtime_error("pipe failed");
    const pid_t pid = ::fork();
    if (pid < 0) throw std::runtime_error("fork failed");
    if (pid == 0) {
        ::dup2(fds[1], STDOUT_FILENO);
        ::dup2(fds[1], STDERR_FILENO);
        ::close(fds[0]);
        ::close(fds[1]);
        ::execl(planner_path.c_str(), planner_path.c_str(), "-o", dom.c_str(), "-f", prob.c_str(),
                static_cast<char*>(nullptr));
        _exit(127);
    }
    ::close(fds[1]);

    std::string output;
    const auto deadline =
        std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_seconds);
    bool timed_out = false;
    char buf[4096];
    while (true) {
        const auto now = std::chrono::steady_clock::now();
        if (now >= deadline) {
            timed_out = true;
            break;
        }
        const int wait_ms = static_cast<int>(
            std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count());
        pollfd pfd{fds[0], POLLIN, 0};
        const int rc = ::poll(&pfd, 1, std::max(1, wait_ms));
        if (rc < 0) break;
        if (rc == 0) {
            timed_out = true;
            break;
        }
        const ssize_t n = ::read(fds[0], buf, sizeof(buf));
        if (n <= 0) break;
        output.append(buf, static_cast<std::size_t>(n));
    }
    ::close(fds[0]);
    if (timed_out) {
        ::kill(pid, SIGKILL);
        ::waitpid(pid, nullptr, 0);
        res.status = ExternalStatus::kTimeout;
        res.detail = "planner exceeded " + pddl::format_real(timeout_seconds) + "s";
        return res;
    }
    int status = 0;
    ::waitpid(pid, &status, 0);

    std::vector<std::string> names;
    try {
        names = pddl::parse_external_plan(output);
    } catch (const pddl::ParseError& e) {
        res.status = ExternalStatus::kParseFailure;
        res.detail = e.what();
        return res;
    }
    if (names.empty()) {
        res.status = ExternalStatus::kNoPlan;
        return res;
    }

    Plan plan;
    for (const auto& n : names) {
        const ActionModel* found = nullptr;
        for (const auto& a : problem.actions) {
            if (a.name == n) {
                found = &a;
                break;
            }
        }
        if (!found) {
            res.status = ExternalStatus::kParseFailure;
            res.detail = "transcript names unknown action '" + n + "'";
            return res;
        }
        plan.steps.push_back(found->name);
        plan.quality += found->gain;
    }
    res.status = ExternalStatus::kOk;
    res.plan = std::move(plan);
    return res;
}

}  // namespace sorl::planner
