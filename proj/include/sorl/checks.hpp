#pragma once

#include <random>
#include <string>
#include <vector>

#include "sorl/core.hpp"
#include "sorl/planner.hpp"

// Oracle suites: semantic operations checked against independent set-algebra
// computations, the planner checked against exhaustive enumeration, and the
// PDDL round-trip. Run by the selftest CLI command and the acceptance suite.
namespace sorl::checks {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

// applicable/apply/induce_action_model/initiation/termination/task_satisfied
// vs <set> oracles: exhaustively over a 6-proposition vocabulary and on
// `random_cases` random 8-proposition cases.
CheckResult semantics_suite(std::uint64_t seed, int random_cases = 1000);

// solve vs oracle_solve on `instances` seeded random learned domains
// (<= 8 propositions, <= 12 actions), plus plan replay validation.
CheckResult planner_suite(std::uint64_t seed, int instances = 200);

// serialize -> parse -> serialize byte-identity on `domains` random learned
// domains.
CheckResult pddl_roundtrip_suite(std::uint64_t seed, int domains = 100);

// Random learned-style planning instance (full-state preconditions induced
// from random state pairs, integer-valued gains, some negative).
planner::PlanningProblem random_learned_instance(std::mt19937& rng, int max_props = 8,
                                                 int max_actions = 12);

}  // namespace sorl::checks
