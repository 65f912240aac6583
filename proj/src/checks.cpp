#include "sorl/checks.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "sorl/htn.hpp"
#include "sorl/options.hpp"
#include "sorl/pddl.hpp"

namespace sorl::checks {

namespace {

using StrSet = std::set<std::string>;

// Independent set-algebra oracles over proposition-name sets.
bool oracle_subset(const StrSet& a, const StrSet& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

bool oracle_disjoint(const StrSet& a, const StrSet& b) {
    StrSet inter;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                          std::inserter(inter, inter.begin()));
    return inter.empty();
}

StrSet oracle_minus(const StrSet& a, const StrSet& b) {
    StrSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                        std::inserter(out, out.begin()));
    return out;
}

StrSet oracle_union(const StrSet& a, const StrSet& b) {
    StrSet out = a;
    out.insert(b.begin(), b.end());
    return out;
}

StrSet to_set(const Vocabulary& vocab, PropMask mask) {
    StrSet out;
    for (const auto& p : vocab.props_of(mask)) out.insert(p);
    return out;
}

std::vector<std::string> prop_names(int n) {
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("p" + std::to_string(i));
    return names;
}

PropMask random_mask(std::mt19937& rng, int bits) {
    std::uniform_int_distribution<PropMask> d(0, (PropMask{1} << bits) - 1);
    return d(rng);
}

struct SemCase {
    VocabPtr vocab;
    PropMask state;
    PropMask pre_pos, pre_neg, eff_pos, eff_neg;
};

// One semantics comparison; returns an error description or empty.
std::string check_case(const SemCase& c) {
    const Vocabulary& vocab = *c.vocab;
    const StrSet s = to_set(vocab, c.state);
    const StrSet pp = to_set(vocab, c.pre_pos);
    const StrSet pn = to_set(vocab, c.pre_neg);
    const StrSet ep = to_set(vocab, c.eff_pos);
    const StrSet en = to_set(vocab, c.eff_neg);

    const SymbolicState state(c.vocab, c.state);
    const ActionModel action =
        ActionModel::make("a", c.vocab, c.pre_pos, c.pre_neg, c.eff_pos, c.eff_neg, 0.0);

    const bool want_applicable = oracle_subset(pp, s) && oracle_disjoint(s, pn);
    if (applicable(state, action) != want_applicable) return "applicable mismatch";

    if (want_applicable) {
        const StrSet want_next = oracle_union(oracle_minus(s, en), ep);
        const auto got = apply(state, action);
        if (to_set(vocab, got.bits) != want_next) return "apply mismatch";
    }

    // initiation/termination share the set definitions with option sets
    options::SymbolicOption opt;
    opt.pre_pos = c.pre_pos;
    opt.pre_neg = c.pre_neg;
    opt.eff_pos = c.eff_pos;
    opt.eff_neg = c.eff_neg;
    const bool want_init = oracle_subset(pp, s) && oracle_disjoint(s, pn);
    if (options::initiation(opt, state) != want_init) return "initiation mismatch";
    const bool want_term = oracle_subset(ep, s) && oracle_disjoint(en, s);
    if (options::termination(opt, state) != want_term) return "termination mismatch";

    htn::Task task{"t", c.pre_pos, c.pre_neg, 0.0};
    const bool want_task = oracle_subset(pp, s) && oracle_disjoint(pn, s);
    if (htn::task_satisfied(task, state) != want_task) return "task_satisfied mismatch";

    return {};
}

std::string check_induce(const VocabPtr& vocab, PropMask s1, PropMask s2) {
    const Vocabulary& v = *vocab;
    const StrSet b = to_set(v, s1);
    const StrSet a = to_set(v, s2);
    StrSet all;
    for (const auto& n : v.names()) all.insert(n);

    const auto model = induce_action_model(
        StatePair{SymbolicState(vocab, s1), SymbolicState(vocab, s2)}, 0, 1.5, vocab);
    if (to_set(v, model.pre_pos) != b) return "induce pre+ mismatch";
    if (to_set(v, model.pre_neg) != oracle_minus(all, b)) return "induce pre- mismatch";
    if (to_set(v, model.eff_pos) != oracle_minus(a, b)) return "induce eff+ mismatch";
    if (to_set(v, model.eff_neg) != oracle_minus(b, a)) return "induce eff- mismatch";

    // reconstruction: applying the induced model to s1 yields exactly s2
    if (s1 != s2) {
        const auto next = apply(SymbolicState(vocab, s1), model);
        if (next.bits != s2) return "induce reconstruction mismatch";
    }
    return {};
}

// Random action over `bits` propositions honoring the model invariants.
SemCase random_sem_case(std::mt19937& rng, const VocabPtr& vocab, int bits) {
    SemCase c;
    c.vocab = vocab;
    c.state = random_mask(rng, bits);
    c.pre_pos = random_mask(rng, bits);
    c.pre_neg = random_mask(rng, bits) & ~c.pre_pos;
    c.eff_neg = random_mask(rng, bits) & c.pre_pos;
    c.eff_pos = random_mask(rng, bits) & ~c.pre_pos & ~c.eff_neg;
    return c;
}

}  // namespace

CheckResult semantics_suite(std::uint64_t seed, int random_cases) {
    std::mt19937 rng(static_cast<std::uint32_t>(seed));
    CheckResult res{"semantics", true, ""};

    // Exhaustive: every state of a 6-proposition vocabulary against a bank of
    // random actions (all ops compared with the set oracles).
    const auto vocab6 = make_vocabulary(prop_names(6));
    for (int trial = 0; trial < 40 && res.passed; ++trial) {
        SemCase c = random_sem_case(rng, vocab6, 6);
        for (PropMask s = 0; s < 64; ++s) {
            c.state = s;
            const auto err = check_case(c);
            if (!err.empty()) {
                res.passed = false;
                res.detail = err + " (exhaustive, state=" + std::to_string(s) + ")";
                break;
            }
        }
    }
    for (PropMask s1 = 0; s1 < 64 && res.passed; ++s1) {
        const PropMask s2 = random_mask(rng, 6);
        const auto err = check_induce(vocab6, s1, s2);
        if (!err.empty()) {
            res.passed = false;
            res.detail = err + " (exhaustive)";
        }
    }

    // Random 8-proposition cases.
    const auto vocab8 = make_vocabulary(prop_names(8));
    for (int i = 0; i < random_cases && res.passed; ++i) {
        const auto err = check_case(random_sem_case(rng, vocab8, 8));
        if (!err.empty()) {
            res.passed = false;
            res.detail = err + " (random case " + std::to_string(i) + ")";
        }
    }
    for (int i = 0; i < random_cases && res.passed; ++i) {
        const auto err = check_induce(vocab8, random_mask(rng, 8), random_mask(rng, 8));
        if (!err.empty()) {
            res.passed = false;
            res.detail = err + " (random case " + std::to_string(i) + ")";
        }
    }
    if (res.passed) {
        res.detail = "exhaustive 6-prop + " + std::to_string(random_cases) + " random 8-prop cases";
    }
    return res;
}

planner::PlanningProblem random_learned_instance(std::mt19937& rng, int max_props,
                                                 int max_actions) {
    std::uniform_int_distribution<int> props_d(3, max_props);
    const int bits = props_d(rng);
    const auto vocab = make_vocabulary(prop_names(bits));

    std::uniform_int_distribution<int> nstates_d(2, std::max(2, bits + 2));
    const int n_states = nstates_d(rng);
    std::vector<PropMask> states;
    while (static_cast<int>(states.size()) < n_states) {
        const PropMask m = random_mask(rng, bits);
        if (std::find(states.begin(), states.end(), m) == states.end()) states.push_back(m);
    }

    std::uniform_int_distribution<int> nact_d(1, max_actions);
    const int n_actions = nact_d(rng);
    std::uniform_int_distribution<int> state_d(0, n_states - 1);
    std::uniform_int_distribution<int> gain_d(-100, 400);

    planner::PlanningProblem p;
    p.vocab = vocab;
    p.initial = SymbolicState(vocab, states[0]);
    for (int i = 0; i < n_actions; ++i) {
        const PropMask s1 = states[state_d(rng)];
        PropMask s2 = states[state_d(rng)];
        if (s1 == s2) s2 = states[(state_d(rng) + 1) % n_states];
        if (s1 == s2) continue;
        p.actions.push_back(induce_action_model(
            StatePair{SymbolicState(vocab, s1), SymbolicState(vocab, s2)}, p.actions.size(),
            static_cast<double>(gain_d(rng)), vocab));
    }
    std::uniform_int_distribution<int> q_d(0, 5);
    const int pick = q_d(rng);
    p.q_threshold = pick == 0 ? -50.0 : (pick == 1 ? 100.0 : 0.0);
    return p;
}

CheckResult planner_suite(std::uint64_t seed, int instances) {
    std::mt19937 rng(static_cast<std::uint32_t>(seed));
    CheckResult res{"planner", true, ""};
    for (int i = 0; i < instances; ++i) {
        const auto problem = random_learned_instance(rng);
        const auto got = planner::solve(problem);
        const auto want = planner::oracle_solve(problem);
        std::ostringstream err;
        if (!got.stats.optimal) {
            err << "instance " << i << ": budget exhausted unexpectedly";
        } else if (got.plan.has_value() != want.has_value()) {
            err << "instance " << i << ": solve " << (got.plan ? "found" : "missed")
                << " a plan, oracle " << (want ? "found one" : "did not");
        } else if (got.plan && got.plan->quality != want->quality) {
            err << "instance " << i << ": quality " << got.plan->quality << " vs oracle "
                << want->quality;
        } else if (got.plan) {
            // replay: applicable at each step, no state revisit, strict > q
            SymbolicState s = problem.initial;
            std::vector<PropMask> seen{s.bits};
            double total = 0.0;
            for (const auto& name : got.plan->steps) {
                const auto it = std::find_if(problem.actions.begin(), problem.actions.end(),
                                             [&](const auto& a) { return a.name == name; });
                if (it == problem.actions.end() || !applicable(s, *it)) {
                    err << "instance " << i << ": replay precondition violation at " << name;
                    break;
                }
                s = apply(s, *it);
                total += it->gain;
                if (std::find(seen.begin(), seen.end(), s.bits) != seen.end()) {
                    err << "instance " << i << ": replay revisits a state";
                    break;
                }
                seen.push_back(s.bits);
            }
            if (err.str().empty()) {
                if (total != got.plan->quality) {
                    err << "instance " << i << ": quality does not match replayed gains";
                } else if (!(total > problem.q_threshold)) {
                    err << "instance " << i << ": quality not strictly above threshold";
                }
            }
        }
        if (!err.str().empty()) {
            res.passed = false;
            res.detail = err.str();
            return res;
        }
    }
    res.detail = std::to_string(instances) + " random instances agree with exhaustive oracle";
    return res;
}

CheckResult pddl_roundtrip_suite(std::uint64_t seed, int domains) {
    std::mt19937 rng(static_cast<std::uint32_t>(seed));
    CheckResult res{"pddl-roundtrip", true, ""};
    std::uniform_real_distribution<double> gain_d(-200.0, 500.0);
    for (int i = 0; i < domains; ++i) {
        auto problem = random_learned_instance(rng);
        for (auto& a : problem.actions) a.gain = gain_d(rng);
        const std::string once = pddl::serialize_domain(*problem.vocab, problem.actions);
        const auto parsed = pddl::parse_domain(once);
        const std::string twice = pddl::serialize_domain(*parsed.vocab, parsed.actions);
        if (once != twice) {
            res.passed = false;
            res.detail = "round-trip differs on domain " + std::to_string(i);
            return res;
        }
    }
    res.detail = std::to_string(domains) + " serialize/parse/serialize round-trips byte-identical";
    return res;
}

}  // namespace sorl::checks
