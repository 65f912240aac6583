#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "sorl/config.hpp"
#include "sorl/core.hpp"
#include "sorl/envs.hpp"
#include "sorl/htn.hpp"
#include "sorl/meta.hpp"
#include "sorl/options.hpp"

// Experiment driver: the per-episode planning/learning loops, periodic greedy
// evaluation, and run artifact emission (CSV, aggregate, SVG, model dumps,
// option snapshots).
namespace sorl::harness {

struct EpisodeLog {
    int episode = 0;
    long long env_steps = 0;  // cumulative training steps
    double reward = 0.0;      // episode external reward, all phases
    double plan_quality = 0.0;  // external reward collected while executing the plan
    int n_actions = 0;
    int n_options = 0;  // symbolic options (the global option is not counted)
    int n_methods = 0;
    std::vector<double> sr;
    double eval_reward = std::nan("");  // greedy evaluation, when scheduled
};

struct RunResult {
    std::uint64_t seed = 0;
    std::vector<EpisodeLog> logs;
    long long total_env_steps = 0;
    double best_plan_quality = 0.0;
    Plan final_plan;
    meta::Generated final_models;
    std::vector<htn::MethodModel> methods;
    int preseeded_options = 0;
    std::string options_snapshot;  // save_options text
    std::string models_dump;       // dump_models text
};

std::unique_ptr<envs::Env> make_env(const config::RunConfig& cfg);

RunResult run_sorl(const config::RunConfig& cfg, std::uint64_t seed);
RunResult run_sorl_htn(const config::RunConfig& cfg, std::uint64_t seed);
RunResult run_transfer(const config::RunConfig& cfg, std::uint64_t seed);
RunResult run_baseline(const config::RunConfig& cfg, std::uint64_t seed);

// Dispatches on cfg.algo (snapshots present selects the transfer variant of
// sorl) and runs every seed as an independent parallel worker.
std::vector<RunResult> run_all_seeds(const config::RunConfig& cfg);

// --- outputs ---------------------------------------------------------------

std::string csv_text(const RunResult& result);
std::string aggregate_csv_text(const std::vector<RunResult>& results);
std::string learning_curve_svg(const std::vector<RunResult>& results, const std::string& title);

// Writes per-seed CSVs, the aggregate, the SVG curve, model dumps and option
// snapshots under cfg.outdir. Returns the list of file paths written.
std::vector<std::string> emit_outputs(const config::RunConfig& cfg,
                                      const std::vector<RunResult>& results);

// --- curve metrics ----------------------------------------------------------

// Trapezoidal area under (env_steps, reward) up to step_budget.
double auc_reward(const std::vector<EpisodeLog>& logs, long long step_budget);

// Cumulative training steps at the first evaluation whose greedy reward
// reached `threshold`; nullopt when never reached.
std::optional<long long> steps_to_eval_threshold(const std::vector<EpisodeLog>& logs,
                                                 double threshold);

// First episode whose executed plan collected `quality` external reward.
std::optional<int> first_episode_at_quality(const std::vector<EpisodeLog>& logs, double quality);

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace sorl::harness
