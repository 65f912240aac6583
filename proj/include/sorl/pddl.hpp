#pragma once

#include <string>
#include <vector>

#include "sorl/core.hpp"

// PDDL text layer: the :strips fragment plus a single numeric fluent
// `quality` that accumulates each action's gain. Serialization is
// deterministic (vocabulary order everywhere, reals as fixed 6-decimal) so
// equal inputs give byte-equal text.
namespace sorl::pddl {

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_no(line) {}
    std::size_t line_no;
};

std::string serialize_domain(const Vocabulary& vocab, const std::vector<ActionModel>& actions);

std::string serialize_problem(const SymbolicState& initial, double quality_threshold);

struct ParsedDomain {
    VocabPtr vocab;
    std::vector<ActionModel> actions;
};

// Parses text produced by serialize_domain (whitespace-insensitive).
ParsedDomain parse_domain(const std::string& text);

// Extracts the ordered action names from an external planner transcript.
// Step lines look like "<k>: ACT_3" (case-insensitive, optional "step"
// prefix); anything else is ignored. A step line with a malformed action
// token raises ParseError with its line number. No step lines -> empty plan.
std::vector<std::string> parse_external_plan(const std::string& text);

std::string format_real(double v);  // fixed 6-decimal rendering

}  // namespace sorl::pddl
