#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sorl/core.hpp"

// Run configuration: a flat key=value text document plus CLI overrides.
// Every numeric field is range-checked at load time.
namespace sorl::config {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Algo { kSorl, kSorlHtn, kHrlBaseline };
enum class EnvKind { kOffice, kKeyDoor };

struct TaskSpec {
    std::string name;
    std::vector<std::string> require_pos;
    std::vector<std::string> require_neg;
    double bonus = 100.0;
};

struct RunConfig {
    Algo algo = Algo::kSorl;
    EnvKind env = EnvKind::kOffice;
    int task = 1;  // office task id
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    int num_episodes = 0;  // 0 = env default (office 3000, keydoor 5000)

    double c = 100.0;
    double lambda = 0.95;
    double phi = 100.0;
    double r_t = 100.0;
    double alpha = 0.1;
    double gamma = 0.9;
    double eps_start = 1.0;
    double eps_end = 0.05;
    std::uint64_t eps_decay_steps = 50'000;

    int max_option_steps = 500;
    int episode_step_cap = 0;  // 0 = env default (office 500, keydoor 2000)
    std::uint64_t node_budget = 1'000'000;
    int eval_every = 10;
    int eval_episodes = 3;
    int replay_samples = 256;

    std::string planner_path;  // optional external planner
    std::string map_file;      // optional map override
    std::string outdir = "out";
    std::vector<std::string> snapshots;       // transfer warm starts
    std::string goals_snapshot;               // baseline goal source
    std::vector<TaskSpec> tasks;              // HTN task list

    int resolved_episodes() const;
    int resolved_step_cap() const;
};

// Parses `key = value` lines ('#' comments, blank lines ignored). Unknown
// keys and malformed values raise ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config_file(const std::string& path);

// Applies one key=value override (same keys as the file format).
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

// Range checks; throws ConfigError naming the offending key.
void validate(const RunConfig& cfg);

std::string algo_name(Algo a);
std::string env_name(EnvKind e);

// Default HTN task list for KeyDoorWorld: GetKey then OpenDoor.
std::vector<TaskSpec> default_keydoor_tasks(double r_t);

}  // namespace sorl::config
