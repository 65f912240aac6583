#include "sorl/harness.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "sorl/baseline.hpp"
#include "sorl/pddl.hpp"
#include "sorl/planner.hpp"

namespace sorl::harness {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

namespace {

std::uint64_t episode_seed(std::uint64_t seed, int episode) {
    return splitmix64(seed * 0x100000001B3ull + static_cast<std::uint64_t>(episode));
}

std::uint64_t eval_seed(std::uint64_t seed, int episode, int k) {
    return splitmix64(seed * 0xD6E8FEB86659FD93ull +
                      static_cast<std::uint64_t>(episode) * 8191ull +
                      static_cast<std::uint64_t>(k) + 0x5151ull);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

options::EpsilonSchedule eps_schedule(const config::RunConfig& cfg) {
    return {cfg.eps_start, cfg.eps_end, cfg.eps_decay_steps};
}

std::vector<htn::Task> build_tasks(const config::RunConfig& cfg, const VocabPtr& vocab) {
    std::vector<config::TaskSpec> specs = cfg.tasks;
    if (specs.empty()) specs = config::default_keydoor_tasks(cfg.r_t);
    std::vector<htn::Task> tasks;
    for (const auto& s : specs) {
        htn::Task t;
        t.name = s.name;
        t.require_pos = vocab->mask_of(s.require_pos);
        t.require_neg = vocab->mask_of(s.require_neg);
        t.bonus = s.bonus;
        tasks.push_back(t);
    }
    return tasks;
}

// Shared per-seed machinery for the planning/learning loops.
struct Worker {
    const config::RunConfig& cfg;
    std::uint64_t seed;
    std::unique_ptr<envs::Env> env;
    VocabPtr vocab;
    std::mt19937 rng;
    options::OptionSet opts;
    meta::RewardLedger ledger;
    meta::SuccessTracker tracker;
    meta::Generated gen;
    std::vector<char> touched;  // option ids trained this episode
    long long cum_steps = 0;

    Worker(const config::RunConfig& c, std::uint64_t s, options::OptionSet warm)
        : cfg(c),
          seed(s),
          env(make_env(c)),
          vocab(env->vocab()),
          rng(static_cast<std::uint32_t>(splitmix64(s))),
          opts(std::move(warm)) {}

    options::ExecuteParams params(bool learn, bool greedy) const {
        options::ExecuteParams p;
        p.max_steps = cfg.max_option_steps;
        p.phi = cfg.phi;
        p.learn = learn;
        p.greedy = greedy;
        return p;
    }

    void touch(int oid) {
        if (static_cast<std::size_t>(oid) >= touched.size()) touched.resize(oid + 1, 0);
        touched[oid] = 1;
    }

    std::size_t action_index(const std::string& name) const {
        for (std::size_t i = 0; i < gen.actions.size(); ++i) {
            if (gen.actions[i].name == name) return i;
        }
        throw std::logic_error("unknown action name '" + name + "'");
    }

    void regenerate_models() {
        gen = meta::generate_action_models(ledger, opts, tracker, vocab, cfg.c, cfg.lambda);
        tracker.ensure(gen.actions.size());
    }

    // Executes one plan step through its mapped option, gated on the selected
    // action model's preconditions. Returns false when the plan must abort.
    bool execute_plan_action(const ActionModel& model, std::size_t model_index,
                             envs::EnvState& state, double& collected, bool record_ledger,
                             double ledger_bonus) {
        const int oid = gen.map.at(model.name);
        auto p = params(true, false);
        p.gate = std::make_pair(model.pre_pos, model.pre_neg);
        const auto out = options::execute_option(*env, state, opts.at(oid), rng, p);
        if (!out.pair) return false;  // initiation failed: no attempt recorded
        cum_steps += out.steps_used;
        touch(oid);
        tracker.record(model_index, out.success);
        collected += *out.external_reward;
        if (record_ledger && out.success && !(out.pair->before == out.pair->after)) {
            ledger.append(*out.pair, *out.external_reward + ledger_bonus);
        }
        return out.success;
    }

    void explore_globally(envs::EnvState& state, double& collected) {
        while (!state.terminal) {
            const auto out =
                options::execute_global_option(*env, state, rng, cfg.max_option_steps);
            cum_steps += out.steps_used;
            collected += *out.external_reward;
            if (out.success) ledger.append(*out.pair, *out.external_reward);
        }
    }

    void train_touched_options() {
        for (std::size_t oid = 0; oid < touched.size(); ++oid) {
            if (!touched[oid]) continue;
            auto& o = opts.at(static_cast<int>(oid));
            if (o.replay.empty()) continue;
            std::uniform_int_distribution<std::size_t> pick(0, o.replay.size() - 1);
            const int n = std::min<int>(cfg.replay_samples, static_cast<int>(o.replay.size()));
            for (int k = 0; k < n; ++k) {
                const auto& t = o.replay[pick(rng)];
                o.policy.update(t.state, t.action, t.reward, t.next);
            }
        }
        std::fill(touched.begin(), touched.end(), 0);
    }

    // Greedy evaluation: replan from the evaluation episode's own initial
    // state and execute the plan with epsilon = 0 and learning off.
    double eval_sorl(int episode) {
        double total = 0.0;
        for (int k = 0; k < cfg.eval_episodes; ++k) {
            std::mt19937 erng(static_cast<std::uint32_t>(eval_seed(seed, episode, k)));
            envs::EnvState state = env->reset(eval_seed(seed, episode, k));
            planner::PlanningProblem prob{env->map_symbolic(state), vocab, gen.actions,
                                          -std::numeric_limits<double>::infinity()};
            const auto res = planner::solve(prob, cfg.node_budget);
            if (!res.plan) continue;
            for (const auto& name : res.plan->steps) {
                if (state.terminal) break;
                const auto& model = gen.actions[action_index(name)];
                const int oid = gen.map.at(name);
                auto p = params(false, true);
                p.gate = std::make_pair(model.pre_pos, model.pre_neg);
                const auto out = options::execute_option(*env, state, opts.at(oid), rng, p);
                if (!out.pair) break;
                total += *out.external_reward;
                if (!out.success) break;
            }
            (void)erng;
        }
        return total / cfg.eval_episodes;
    }

    double eval_htn(int episode, const std::vector<htn::Task>& tasks,
                    const std::vector<htn::MethodModel>& methods) {
        double total = 0.0;
        for (int k = 0; k < cfg.eval_episodes; ++k) {
            envs::EnvState state = env->reset(eval_seed(seed, episode, k));
            const auto plan = htn::htn_solve(env->map_symbolic(state), vocab, gen.actions,
                                             methods, tasks, cfg.node_budget);
            if (!plan || plan->empty()) continue;
            for (const auto& name : plan->flattened()) {
                if (state.terminal) break;
                const auto& model = gen.actions[action_index(name)];
                const int oid = gen.map.at(name);
                auto p = params(false, true);
                p.gate = std::make_pair(model.pre_pos, model.pre_neg);
                const auto out = options::execute_option(*env, state, opts.at(oid), rng, p);
                if (!out.pair) break;
                total += *out.external_reward;
                if (!out.success) break;
            }
        }
        return total / cfg.eval_episodes;
    }

    // Sequential exploration needs the exploring action executed even when it
    // leads back into an already-visited state (which a simple-path plan can
    // never schedule): route to its source state, then take it.
    Plan drill_plan(const SymbolicState& initial) {
        const auto exploring = meta::exploring_index(tracker, cfg.lambda);
        if (!exploring || *exploring >= gen.actions.size()) return {};
        const ActionModel& target = gen.actions[*exploring];
        Plan plan;
        if (options::initiation(target.pre_pos, target.pre_neg, initial)) {
            plan.steps = {target.name};
            plan.quality = target.gain;
            return plan;
        }
        planner::PlanningProblem prob{initial, vocab, gen.actions, 0.0};
        const auto path = planner::solve_to_goal(
            prob,
            [&](PropMask s) {
                return mask_subset(target.pre_pos, s) && (s & target.pre_neg) == 0;
            },
            cfg.node_budget);
        if (!path) return {};
        plan = *path;
        plan.steps.push_back(target.name);
        plan.quality += target.gain;
        return plan;
    }

    void finish(RunResult& result, const std::string& methods_section) {
        result.total_env_steps = cum_steps;
        result.final_models = gen;
        result.options_snapshot = options::save_options(opts, *vocab);
        result.models_dump =
            meta::dump_models(*vocab, gen.actions, opts, gen.map, tracker, methods_section);
        for (const auto& log : result.logs) {
            result.best_plan_quality = std::max(result.best_plan_quality, log.plan_quality);
        }
    }
};

RunResult run_sorl_impl(const config::RunConfig& cfg, std::uint64_t seed,
                        options::OptionSet warm, int preseeded) {
    Worker w(cfg, seed, std::move(warm));
    RunResult result;
    result.seed = seed;
    result.preseeded_options = preseeded;

    Plan plan_prev;  // Π_{t-1}
    double q_last = 0.0;
    const int episodes = cfg.resolved_episodes();
    for (int t = 1; t <= episodes; ++t) {
        envs::EnvState state = w.env->reset(episode_seed(seed, t));
        const SymbolicState initial = w.env->map_symbolic(state);
        const Plan plan_star = plan_prev;

        w.regenerate_models();
        planner::PlanningProblem prob{initial, w.vocab, w.gen.actions,
                                      meta::planning_goal(q_last)};
        const auto solved = planner::solve(prob, cfg.node_budget);
        Plan plan_t = solved.plan.value_or(Plan{});
        if (plan_t.empty()) plan_t = w.drill_plan(initial);
        if (plan_t.empty()) plan_t = plan_star;

        const bool debug = std::getenv("SORL_DEBUG") != nullptr;
        if (debug && t <= 40) {
            std::fprintf(stderr, "ep %d q_last=%.0f plan:", t, q_last);
            for (const auto& s : plan_t.steps) std::fprintf(stderr, " %s", s.c_str());
            std::fprintf(stderr, "\n");
        }
        double q = 0.0;
        double episode_reward = 0.0;
        for (const auto& name : plan_t.steps) {
            if (state.terminal) break;
            std::size_t idx;
            try {
                idx = w.action_index(name);
            } catch (const std::logic_error&) {
                break;  // stale fallback plan naming an unknown action
            }
            const bool ok = w.execute_plan_action(w.gen.actions[idx], idx, state, q, true, 0.0);
            if (debug && t <= 40) std::fprintf(stderr, "   %s -> %s\n", name.c_str(), ok ? "ok" : "FAIL");
            if (!ok) break;
        }
        episode_reward += q;
        w.explore_globally(state, episode_reward);
        w.train_touched_options();
        q_last = q;
        plan_prev = plan_t;

        EpisodeLog log;
        log.episode = t;
        log.env_steps = w.cum_steps;
        log.reward = episode_reward;
        log.plan_quality = q;
        log.n_actions = static_cast<int>(w.gen.actions.size());
        log.n_options = static_cast<int>(w.opts.size());
        log.n_methods = 0;
        log.sr = w.tracker.snapshot();
        if (t % cfg.eval_every == 0) log.eval_reward = w.eval_sorl(t);
        result.logs.push_back(std::move(log));
    }
    result.final_plan = plan_prev;
    w.finish(result, "");
    return result;
}

std::string methods_dump_section(const std::vector<htn::MethodModel>& methods,
                                 const Vocabulary& vocab) {
    std::ostringstream out;
    out << "# methods (" << methods.size() << ")\n";
    for (const auto& m : methods) {
        out << "method " << m.name << "\n";
        out << "  task: " << m.task << "\n";
        out << "  pre:";
        const auto props = vocab.props_of(m.precondition.bits);
        if (props.empty()) out << " -";
        for (const auto& p : props) out << " " << p;
        out << "\n  actions:";
        for (const auto& a : m.subactions) out << " " << a;
        out << "\n";
    }
    return out.str();
}

RunResult run_sorl_htn_impl(const config::RunConfig& cfg, std::uint64_t seed) {
    Worker w(cfg, seed, options::OptionSet(cfg.alpha, cfg.gamma, eps_schedule(cfg)));
    RunResult result;
    result.seed = seed;

    const auto tasks = build_tasks(cfg, w.vocab);
    std::vector<htn::MethodModel> methods;
    htn::MethodTaskMap method_map;
    std::vector<htn::Trace> last_traces;

    htn::HtnPlan plan_prev;
    const int episodes = cfg.resolved_episodes();
    for (int t = 1; t <= episodes; ++t) {
        envs::EnvState state = w.env->reset(episode_seed(seed, t));
        const SymbolicState initial = w.env->map_symbolic(state);

        w.regenerate_models();
        // Methods from the previous episode's traces accumulate (deduplicated
        // by task + subaction sequence).
        for (const auto& trace : last_traces) {
            htn::GeneratedMethods gm;
            try {
                gm = htn::generate_method_models(trace, tasks, w.gen.actions);
            } catch (const htn::TraceError&) {
                continue;
            }
            for (auto& m : gm.methods) {
                const bool dup =
                    std::any_of(methods.begin(), methods.end(), [&](const auto& e) {
                        return e.task == m.task && e.subactions == m.subactions;
                    });
                if (dup) continue;
                m.name = "m_" + m.task + "_" + std::to_string(methods.size());
                method_map[m.name] = m.task;
                methods.push_back(std::move(m));
            }
        }
        last_traces.clear();

        auto solved = htn::htn_solve(initial, w.vocab, w.gen.actions, methods, tasks,
                                     cfg.node_budget);
        htn::HtnPlan plan_t = (solved && !solved->empty()) ? *solved : plan_prev;

        // Trace bookkeeping: keep the running trace replay-consistent; break
        // it (archiving the consistent prefix) whenever execution diverges.
        htn::Trace trace;
        trace.initial = initial;
        SymbolicState trace_state = initial;
        auto archive_trace = [&] {
            if (!trace.steps.empty()) last_traces.push_back(trace);
            trace.steps.clear();
        };
        auto trace_append = [&](const std::string& name, const StatePair& pair) {
            if (!(trace_state == pair.before)) {
                archive_trace();
                trace.initial = pair.before;
                trace_state = pair.before;
            }
            bool consistent = false;
            try {
                const auto& a = w.gen.actions[w.action_index(name)];
                consistent = applicable(trace_state, a) && apply(trace_state, a) == pair.after;
            } catch (const std::logic_error&) {
            }
            if (consistent) {
                trace.steps.emplace_back(name, pair.after);
                trace_state = pair.after;
            } else {
                archive_trace();
                trace.initial = pair.after;
                trace_state = pair.after;
            }
        };

        double q = 0.0;
        double episode_reward = 0.0;
        bool aborted = false;
        for (const auto& step : plan_t.steps) {
            if (aborted || state.terminal) break;
            const htn::Task* task = nullptr;
            for (const auto& tk : tasks) {
                if (tk.name == step.task) task = &tk;
            }
            for (const auto& name : step.actions) {
                if (state.terminal) break;
                std::size_t idx;
                try {
                    idx = w.action_index(name);
                } catch (const std::logic_error&) {
                    aborted = true;
                    break;
                }
                const auto& model = w.gen.actions[idx];
                const int oid = w.gen.map.at(name);
                auto p = w.params(true, false);
                p.gate = std::make_pair(model.pre_pos, model.pre_neg);
                const auto out = options::execute_option(*w.env, state, w.opts.at(oid), w.rng, p);
                if (!out.pair) {
                    aborted = true;
                    break;
                }
                w.cum_steps += out.steps_used;
                w.touch(oid);
                w.tracker.record(idx, out.success);
                q += *out.external_reward;
                double recorded = *out.external_reward;
                if (task) recorded = htn::task_bonus(recorded, *task, out.pair->after);
                if (out.success && !(out.pair->before == out.pair->after)) {
                    w.ledger.append(*out.pair, recorded);
                }
                if (out.success) {
                    trace_append(name, *out.pair);
                } else {
                    aborted = true;
                    break;
                }
            }
        }
        episode_reward += q;

        // Exploration: walk applicable known actions; fall back to the global
        // option when none applies.
        while (!state.terminal) {
            const SymbolicState s = w.env->map_symbolic(state);
            const auto instances = htn::applicable_instances(s, w.gen.actions);
            if (!instances.empty()) {
                std::uniform_int_distribution<std::size_t> pick(0, instances.size() - 1);
                const auto& model = instances[pick(w.rng)];
                const std::size_t idx = w.action_index(model.name);
                const int oid = w.gen.map.at(model.name);
                auto p = w.params(true, false);
                p.gate = std::make_pair(model.pre_pos, model.pre_neg);
                const auto out = options::execute_option(*w.env, state, w.opts.at(oid), w.rng, p);
                if (!out.pair) break;
                w.cum_steps += out.steps_used;
                w.touch(oid);
                w.tracker.record(idx, out.success);
                episode_reward += *out.external_reward;
                if (out.success && !(out.pair->before == out.pair->after)) {
                    w.ledger.append(*out.pair, *out.external_reward);
                }
                if (out.success) trace_append(model.name, *out.pair);
            } else {
                const auto out = options::execute_global_option(*w.env, state, w.rng,
                                                                cfg.max_option_steps);
                w.cum_steps += out.steps_used;
                episode_reward += *out.external_reward;
                if (out.success) w.ledger.append(*out.pair, *out.external_reward);
            }
        }
        archive_trace();
        w.train_touched_options();
        plan_prev = plan_t;

        EpisodeLog log;
        log.episode = t;
        log.env_steps = w.cum_steps;
        log.reward = episode_reward;
        log.plan_quality = q;
        log.n_actions = static_cast<int>(w.gen.actions.size());
        log.n_options = static_cast<int>(w.opts.size());
        log.n_methods = static_cast<int>(methods.size());
        log.sr = w.tracker.snapshot();
        if (t % cfg.eval_every == 0) log.eval_reward = w.eval_htn(t, tasks, methods);
        result.logs.push_back(std::move(log));
    }

    for (const auto& step : plan_prev.steps) {
        for (const auto& a : step.actions) result.final_plan.steps.push_back(a);
    }
    result.methods = methods;
    w.finish(result, methods_dump_section(methods, *w.vocab));
    return result;
}

options::OptionSet merge_snapshots(const config::RunConfig& cfg, const VocabPtr& vocab) {
    options::OptionSet merged(cfg.alpha, cfg.gamma, eps_schedule(cfg));
    for (const auto& path : cfg.snapshots) {
        const auto loaded = options::load_options(read_file(path), *vocab, cfg.alpha, cfg.gamma,
                                                  eps_schedule(cfg));
        for (const auto& o : loaded.all()) {
            const int existing = merged.find_by_effects(o.eff_pos, o.eff_neg);
            if (existing >= 0) {
                merged.union_preconditions(existing, o.pre_pos, o.pre_neg);
                continue;
            }
            const int id = merged.add(o.pre_pos, o.pre_neg, o.eff_pos, o.eff_neg);
            auto& dst = merged.at(id);
            dst.policy = o.policy;
            dst.trained_steps = o.trained_steps;
        }
    }
    return merged;
}

RunResult run_baseline_impl(const config::RunConfig& cfg, std::uint64_t seed) {
    Worker w(cfg, seed, options::OptionSet(cfg.alpha, cfg.gamma, eps_schedule(cfg)));
    RunResult result;
    result.seed = seed;

    // Goal structures come frozen from a completed symbolic run; their
    // low-level policies start fresh so only the high level differs.
    {
        const auto loaded = options::load_options(read_file(cfg.goals_snapshot), *w.vocab,
                                                  cfg.alpha, cfg.gamma, eps_schedule(cfg));
        for (const auto& o : loaded.all()) {
            if (w.opts.find_by_effects(o.eff_pos, o.eff_neg) < 0) {
                w.opts.add(o.pre_pos, o.pre_neg, o.eff_pos, o.eff_neg);
            }
        }
    }
    const std::size_t n_goals = w.opts.size();
    if (n_goals == 0) throw std::runtime_error("goals snapshot contains no options");
    result.preseeded_options = static_cast<int>(n_goals);

    baseline::MetaPolicy meta_q(n_goals, cfg.alpha, cfg.gamma,
                                options::EpsilonSchedule{cfg.eps_start, cfg.eps_end, 10'000});

    auto valid_goals = [&](const SymbolicState& s) {
        std::vector<char> valid(n_goals, 0);
        bool any = false;
        for (std::size_t g = 0; g < n_goals; ++g) {
            if (!options::termination(w.opts.at(static_cast<int>(g)), s)) {
                valid[g] = 1;
                any = true;
            }
        }
        return std::make_pair(valid, any);
    };

    const int episodes = cfg.resolved_episodes();
    for (int t = 1; t <= episodes; ++t) {
        envs::EnvState state = w.env->reset(episode_seed(seed, t));
        double episode_reward = 0.0;
        while (!state.terminal) {
            const SymbolicState s = w.env->map_symbolic(state);
            const auto [valid, any] = valid_goals(s);
            if (!any) {
                std::uniform_int_distribution<int> pick(0, envs::kNumMoves - 1);
                const auto sr = w.env->step(state, static_cast<envs::Move>(pick(w.rng)));
                state = sr.next;
                ++w.cum_steps;
                episode_reward += sr.reward;
                continue;
            }
            const std::size_t g = meta_q.select_masked(s, valid, w.rng);
            auto p = w.params(true, false);
            p.gate = std::make_pair(PropMask{0}, PropMask{0});  // goals attempted anywhere
            const auto out =
                options::execute_option(*w.env, state, w.opts.at(static_cast<int>(g)), w.rng, p);
            w.cum_steps += out.steps_used;
            w.touch(static_cast<int>(g));
            episode_reward += *out.external_reward;
            baseline::meta_update(meta_q, s, g, *out.external_reward, w.env->map_symbolic(state));
            if (out.steps_used == 0) {  // degenerate selection; force progress
                if (state.terminal) break;
                std::uniform_int_distribution<int> pick(0, envs::kNumMoves - 1);
                const auto sr = w.env->step(state, static_cast<envs::Move>(pick(w.rng)));
                state = sr.next;
                ++w.cum_steps;
                episode_reward += sr.reward;
            }
        }
        w.train_touched_options();

        EpisodeLog log;
        log.episode = t;
        log.env_steps = w.cum_steps;
        log.reward = episode_reward;
        log.plan_quality = 0.0;
        log.n_actions = 0;
        log.n_options = static_cast<int>(n_goals);
        log.n_methods = 0;
        if (t % cfg.eval_every == 0) {
            double total = 0.0;
            for (int k = 0; k < cfg.eval_episodes; ++k) {
                std::mt19937 erng(static_cast<std::uint32_t>(eval_seed(seed, t, k)));
                envs::EnvState es = w.env->reset(eval_seed(seed, t, k));
                while (!es.terminal) {
                    const SymbolicState s = w.env->map_symbolic(es);
                    const auto [valid, any] = valid_goals(s);
                    if (!any) break;
                    const std::size_t g = meta_q.greedy_masked(s, valid);
                    auto p = w.params(false, true);
                    p.gate = std::make_pair(PropMask{0}, PropMask{0});
                    const auto out = options::execute_option(*w.env, es,
                                                             w.opts.at(static_cast<int>(g)),
                                                             erng, p);
                    total += *out.external_reward;
                    if (out.steps_used == 0) break;  // no greedy progress
                }
            }
            log.eval_reward = total / cfg.eval_episodes;
        }
        result.logs.push_back(std::move(log));
    }
    w.finish(result, "");
    return result;
}

}  // namespace

std::unique_ptr<envs::Env> make_env(const config::RunConfig& cfg) {
    const int cap = cfg.resolved_step_cap();
    if (cfg.env == config::EnvKind::kOffice) {
        if (cfg.map_file.empty()) {
            return std::make_unique<envs::OfficeWorld>(
                envs::OfficeWorld::with_default_map(cfg.task, cap));
        }
        return std::make_unique<envs::OfficeWorld>(envs::parse_map(read_file(cfg.map_file)),
                                                   cfg.task, cap);
    }
    if (cfg.map_file.empty()) {
        return std::make_unique<envs::KeyDoorWorld>(envs::KeyDoorWorld::with_default_map(cap));
    }
    return std::make_unique<envs::KeyDoorWorld>(envs::parse_map(read_file(cfg.map_file)), cap);
}

RunResult run_sorl(const config::RunConfig& cfg, std::uint64_t seed) {
    return run_sorl_impl(cfg, seed,
                         options::OptionSet(cfg.alpha, cfg.gamma, eps_schedule(cfg)), 0);
}

RunResult run_transfer(const config::RunConfig& cfg, std::uint64_t seed) {
    const auto env = make_env(cfg);
    options::OptionSet warm = merge_snapshots(cfg, env->vocab());
    const int preseeded = static_cast<int>(warm.size());
    return run_sorl_impl(cfg, seed, std::move(warm), preseeded);
}

RunResult run_sorl_htn(const config::RunConfig& cfg, std::uint64_t seed) {
    return run_sorl_htn_impl(cfg, seed);
}

RunResult run_baseline(const config::RunConfig& cfg, std::uint64_t seed) {
    return run_baseline_impl(cfg, seed);
}

std::vector<RunResult> run_all_seeds(const config::RunConfig& cfg) {
    config::validate(cfg);
    auto run_one = [&](std::uint64_t seed) {
        switch (cfg.algo) {
            case config::Algo::kSorl:
                return cfg.snapshots.empty() ? run_sorl(cfg, seed) : run_transfer(cfg, seed);
            case config::Algo::kSorlHtn:
                return run_sorl_htn(cfg, seed);
            case config::Algo::kHrlBaseline:
                return run_baseline(cfg, seed);
        }
        throw std::logic_error("unknown algo");
    };

    std::vector<RunResult> results(cfg.seeds.size());
    std::vector<std::thread> threads;
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    std::size_t next = 0;
    while (next < cfg.seeds.size()) {
        const std::size_t batch = std::min<std::size_t>(hw, cfg.seeds.size() - next);
        threads.clear();
        for (std::size_t i = 0; i < batch; ++i) {
            const std::size_t slot = next + i;
            threads.emplace_back(
                [&, slot] { results[slot] = run_one(cfg.seeds[slot]); });
        }
        for (auto& th : threads) th.join();
        next += batch;
    }
    return results;
}

// --- outputs ----------------------------------------------------------------

std::string csv_text(const RunResult& result) {
    std::ostringstream out;
    out << "episode,env_steps,reward,plan_quality,n_actions,n_options,n_methods\n";
    for (const auto& log : result.logs) {
        out << log.episode << "," << log.env_steps << "," << pddl::format_real(log.reward) << ","
            << pddl::format_real(log.plan_quality) << "," << log.n_actions << ","
            << log.n_options << "," << log.n_methods << "\n";
    }
    return out.str();
}

std::string aggregate_csv_text(const std::vector<RunResult>& results) {
    std::ostringstream out;
    out << "episode,env_steps_mean,env_steps_std,reward_mean,reward_std,"
           "plan_quality_mean,plan_quality_std,n_actions_mean,n_options_mean,n_methods_mean\n";
    if (results.empty()) return out.str();
    std::size_t episodes = results[0].logs.size();
    for (const auto& r : results) episodes = std::min(episodes, r.logs.size());
    const double n = static_cast<double>(results.size());
    for (std::size_t e = 0; e < episodes; ++e) {
        auto stats = [&](auto get) {
            double mean = 0.0;
            for (const auto& r : results) mean += get(r.logs[e]);
            mean /= n;
            double var = 0.0;
            for (const auto& r : results) {
                const double d = get(r.logs[e]) - mean;
                var += d * d;
            }
            return std::make_pair(mean, std::sqrt(var / n));
        };
        const auto steps = stats([](const EpisodeLog& l) { return double(l.env_steps); });
        const auto reward = stats([](const EpisodeLog& l) { return l.reward; });
        const auto quality = stats([](const EpisodeLog& l) { return l.plan_quality; });
        const auto acts = stats([](const EpisodeLog& l) { return double(l.n_actions); });
        const auto opts = stats([](const EpisodeLog& l) { return double(l.n_options); });
        const auto methods = stats([](const EpisodeLog& l) { return double(l.n_methods); });
        out << results[0].logs[e].episode << "," << pddl::format_real(steps.first) << ","
            << pddl::format_real(steps.second) << "," << pddl::format_real(reward.first) << ","
            << pddl::format_real(reward.second) << "," << pddl::format_real(quality.first) << ","
            << pddl::format_real(quality.second) << "," << pddl::format_real(acts.first) << ","
            << pddl::format_real(opts.first) << "," << pddl::format_real(methods.first) << "\n";
    }
    return out.str();
}

namespace {

std::string polyline(const std::vector<std::pair<double, double>>& pts, double x_max,
                     double y_min, double y_max, const char* color, double width) {
    // plot area: x in [60, 620], y in [20, 360] (y flipped)
    std::ostringstream out;
    out << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << width
        << "\" points=\"";
    const double span_y = (y_max - y_min) == 0 ? 1.0 : (y_max - y_min);
    const double span_x = x_max == 0 ? 1.0 : x_max;
    const std::size_t stride = std::max<std::size_t>(1, pts.size() / 400);
    for (std::size_t i = 0; i < pts.size(); i += stride) {
        const double px = 60.0 + 560.0 * (pts[i].first / span_x);
        const double py = 360.0 - 340.0 * ((pts[i].second - y_min) / span_y);
        out << pddl::format_real(px) << "," << pddl::format_real(py) << " ";
    }
    out << "\"/>\n";
    return out.str();
}

}  // namespace

std::string learning_curve_svg(const std::vector<RunResult>& results, const std::string& title) {
    double x_max = 1.0, y_min = 0.0, y_max = 1.0;
    for (const auto& r : results) {
        for (const auto& log : r.logs) {
            x_max = std::max(x_max, static_cast<double>(log.env_steps));
            y_min = std::min(y_min, log.reward);
            y_max = std::max(y_max, log.reward);
        }
    }
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"640\" "
           "height=\"400\" viewBox=\"0 0 640 400\">\n";
    out << "  <rect x=\"0\" y=\"0\" width=\"640\" height=\"400\" fill=\"white\"/>\n";
    out << "  <text x=\"320\" y=\"14\" text-anchor=\"middle\" font-size=\"13\">" << title
        << "</text>\n";
    out << "  <line x1=\"60\" y1=\"360\" x2=\"620\" y2=\"360\" stroke=\"black\"/>\n";
    out << "  <line x1=\"60\" y1=\"20\" x2=\"60\" y2=\"360\" stroke=\"black\"/>\n";
    out << "  <text x=\"340\" y=\"390\" text-anchor=\"middle\" font-size=\"11\">environment "
           "steps (max "
        << static_cast<long long>(x_max) << ")</text>\n";
    out << "  <text x=\"14\" y=\"190\" font-size=\"11\" transform=\"rotate(-90 14 190)\" "
           "text-anchor=\"middle\">episode reward</text>\n";
    for (const auto& r : results) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& log : r.logs) pts.emplace_back(double(log.env_steps), log.reward);
        out << polyline(pts, x_max, y_min, y_max, "#b0c4de", 0.6);
    }
    if (!results.empty()) {
        std::size_t episodes = results[0].logs.size();
        for (const auto& r : results) episodes = std::min(episodes, r.logs.size());
        std::vector<std::pair<double, double>> mean_pts;
        for (std::size_t e = 0; e < episodes; ++e) {
            double steps = 0.0, reward = 0.0;
            for (const auto& r : results) {
                steps += static_cast<double>(r.logs[e].env_steps);
                reward += r.logs[e].reward;
            }
            mean_pts.emplace_back(steps / results.size(), reward / results.size());
        }
        out << polyline(mean_pts, x_max, y_min, y_max, "#1f4e9c", 1.8);
    }
    out << "</svg>\n";
    return out.str();
}

namespace {

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output file: " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace

std::vector<std::string> emit_outputs(const config::RunConfig& cfg,
                                      const std::vector<RunResult>& results) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(cfg.outdir, ec);
    if (ec) throw std::runtime_error("cannot create output directory: " + cfg.outdir);

    std::string prefix = config::algo_name(cfg.algo) + "_" + config::env_name(cfg.env);
    if (cfg.env == config::EnvKind::kOffice) prefix += "_task" + std::to_string(cfg.task);

    std::vector<std::string> written;
    auto emit = [&](const std::string& name, const std::string& text) {
        const std::string path = cfg.outdir + "/" + name;
        write_text_file(path, text);
        written.push_back(path);
    };
    for (const auto& r : results) {
        const std::string tag = prefix + "_seed" + std::to_string(r.seed);
        emit(tag + ".csv", csv_text(r));
        emit(tag + "_models.txt", r.models_dump);
        emit(tag + "_options.snap", r.options_snapshot);
    }
    emit(prefix + "_aggregate.csv", aggregate_csv_text(results));
    emit(prefix + "_curve.svg", learning_curve_svg(results, prefix));
    return written;
}

double auc_reward(const std::vector<EpisodeLog>& logs, long long step_budget) {
    double area = 0.0;
    long long prev_steps = 0;
    double prev_reward = 0.0;
    bool first = true;
    for (const auto& log : logs) {
        const long long steps = std::min(log.env_steps, step_budget);
        if (first) {
            prev_reward = log.reward;  // flat from 0 to the first record
            first = false;
        }
        if (steps > prev_steps) {
            area += 0.5 * (prev_reward + log.reward) * static_cast<double>(steps - prev_steps);
        }
        prev_steps = steps;
        prev_reward = log.reward;
        if (log.env_steps >= step_budget) break;
    }
    if (prev_steps < step_budget) {
        area += prev_reward * static_cast<double>(step_budget - prev_steps);
    }
    return area;
}

std::optional<long long> steps_to_eval_threshold(const std::vector<EpisodeLog>& logs,
                                                 double threshold) {
    for (const auto& log : logs) {
        if (!std::isnan(log.eval_reward) && log.eval_reward >= threshold) return log.env_steps;
    }
    return std::nullopt;
}

std::optional<int> first_episode_at_quality(const std::vector<EpisodeLog>& logs, double quality) {
    for (const auto& log : logs) {
        if (log.plan_quality >= quality) return log.episode;
    }
    return std::nullopt;
}

}  // namespace sorl::harness
