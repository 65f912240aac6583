#include "sorl/config.hpp"

#include <fstream>
#include <sstream>

namespace sorl::config {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_real(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double r = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return r;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': not a number: '" + v + "'");
    }
}

std::int64_t to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const std::int64_t r = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return r;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': not an integer: '" + v + "'");
    }
}

// Task entry syntax: task.<i>.name / task.<i>.require_pos (comma list) /
// task.<i>.require_neg / task.<i>.bonus
void apply_task_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    const auto parts = split(key, '.');
    if (parts.size() != 3) throw ConfigError("malformed task key '" + key + "'");
    const std::size_t i = static_cast<std::size_t>(to_int(key, parts[1]));
    if (cfg.tasks.size() <= i) cfg.tasks.resize(i + 1);
    TaskSpec& t = cfg.tasks[i];
    if (parts[2] == "name") t.name = value;
    else if (parts[2] == "require_pos") t.require_pos = split(value, ',');
    else if (parts[2] == "require_neg") t.require_neg = split(value, ',');
    else if (parts[2] == "bonus") t.bonus = to_real(key, value);
    else throw ConfigError("unknown task field '" + parts[2] + "'");
}

}  // namespace

int RunConfig::resolved_episodes() const {
    if (num_episodes > 0) return num_episodes;
    return env == EnvKind::kOffice ? 3000 : 5000;
}

int RunConfig::resolved_step_cap() const {
    if (episode_step_cap > 0) return episode_step_cap;
    return env == EnvKind::kOffice ? 500 : 2000;
}

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "algo") {
        if (value == "sorl") cfg.algo = Algo::kSorl;
        else if (value == "sorl-htn") cfg.algo = Algo::kSorlHtn;
        else if (value == "hrl-baseline") cfg.algo = Algo::kHrlBaseline;
        else throw ConfigError("unknown algo '" + value + "'");
    } else if (key == "env") {
        if (value == "office") cfg.env = EnvKind::kOffice;
        else if (value == "keydoor") cfg.env = EnvKind::kKeyDoor;
        else throw ConfigError("unknown env '" + value + "'");
    } else if (key == "task") {
        cfg.task = static_cast<int>(to_int(key, value));
    } else if (key == "seeds") {
        cfg.seeds.clear();
        // Either a count ("5" -> seeds 1..5) or an explicit comma list.
        if (value.find(',') == std::string::npos) {
            const std::int64_t n = to_int(key, value);
            if (n < 1) throw ConfigError("seeds: count must be >= 1");
            for (std::int64_t i = 1; i <= n; ++i) cfg.seeds.push_back(static_cast<std::uint64_t>(i));
        } else {
            for (const auto& s : split(value, ',')) {
                cfg.seeds.push_back(static_cast<std::uint64_t>(to_int(key, s)));
            }
        }
    } else if (key == "num_episodes") {
        cfg.num_episodes = static_cast<int>(to_int(key, value));
    } else if (key == "c") {
        cfg.c = to_real(key, value);
    } else if (key == "lambda") {
        cfg.lambda = to_real(key, value);
    } else if (key == "phi") {
        cfg.phi = to_real(key, value);
    } else if (key == "r_t") {
        cfg.r_t = to_real(key, value);
    } else if (key == "alpha") {
        cfg.alpha = to_real(key, value);
    } else if (key == "gamma") {
        cfg.gamma = to_real(key, value);
    } else if (key == "eps_start") {
        cfg.eps_start = to_real(key, value);
    } else if (key == "eps_end") {
        cfg.eps_end = to_real(key, value);
    } else if (key == "eps_decay_steps") {
        cfg.eps_decay_steps = static_cast<std::uint64_t>(to_int(key, value));
    } else if (key == "max_option_steps") {
        cfg.max_option_steps = static_cast<int>(to_int(key, value));
    } else if (key == "episode_step_cap") {
        cfg.episode_step_cap = static_cast<int>(to_int(key, value));
    } else if (key == "node_budget") {
        cfg.node_budget = static_cast<std::uint64_t>(to_int(key, value));
    } else if (key == "eval_every") {
        cfg.eval_every = static_cast<int>(to_int(key, value));
    } else if (key == "eval_episodes") {
        cfg.eval_episodes = static_cast<int>(to_int(key, value));
    } else if (key == "replay_samples") {
        cfg.replay_samples = static_cast<int>(to_int(key, value));
    } else if (key == "planner_path") {
        cfg.planner_path = value;
    } else if (key == "map_file") {
        cfg.map_file = value;
    } else if (key == "outdir") {
        cfg.outdir = value;
    } else if (key == "snapshots") {
        cfg.snapshots = split(value, ',');
    } else if (key == "goals_snapshot") {
        cfg.goals_snapshot = value;
    } else if (key.rfind("task.", 0) == 0) {
        apply_task_key(cfg, key, value);
    } else {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        }
        apply_override(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void validate(const RunConfig& cfg) {
    auto require = [](bool ok, const std::string& msg) {
        if (!ok) throw ConfigError(msg);
    };
    require(cfg.task >= 1 && cfg.task <= 3, "task must be in [1,3]");
    require(!cfg.seeds.empty(), "seeds must be non-empty");
    require(cfg.resolved_episodes() >= 1, "num_episodes must be >= 1");
    require(cfg.c >= 0.0, "c must be >= 0");
    require(cfg.lambda > 0.0 && cfg.lambda <= 1.0, "lambda must be in (0,1]");
    require(cfg.alpha > 0.0 && cfg.alpha <= 1.0, "alpha must be in (0,1]");
    require(cfg.gamma >= 0.0 && cfg.gamma < 1.0, "gamma must be in [0,1)");
    require(cfg.eps_start >= 0.0 && cfg.eps_start <= 1.0, "eps_start must be in [0,1]");
    require(cfg.eps_end >= 0.0 && cfg.eps_end <= 1.0, "eps_end must be in [0,1]");
    require(cfg.max_option_steps >= 1, "max_option_steps must be >= 1");
    require(cfg.resolved_step_cap() >= 1, "episode_step_cap must be >= 1");
    require(cfg.node_budget >= 1, "node_budget must be >= 1");
    require(cfg.eval_every >= 1, "eval_every must be >= 1");
    require(cfg.eval_episodes >= 1, "eval_episodes must be >= 1");
    require(cfg.replay_samples >= 0, "replay_samples must be >= 0");
    if (cfg.algo == Algo::kHrlBaseline) {
        require(!cfg.goals_snapshot.empty(), "hrl-baseline requires goals_snapshot");
    }
    for (const auto& t : cfg.tasks) {
        require(!t.name.empty(), "task entries need a name");
        for (const auto& p : t.require_pos) {
            for (const auto& n : t.require_neg) {
                require(p != n, "task '" + t.name + "': proposition '" + p +
                                    "' in both require_pos and require_neg");
            }
        }
    }
}

std::string algo_name(Algo a) {
    switch (a) {
        case Algo::kSorl: return "sorl";
        case Algo::kSorlHtn: return "sorl-htn";
        case Algo::kHrlBaseline: return "hrl-baseline";
    }
    return "?";
}

std::string env_name(EnvKind e) {
    return e == EnvKind::kOffice ? "office" : "keydoor";
}

std::vector<TaskSpec> default_keydoor_tasks(double r_t) {
    return {
        {"getkey", {"has_key"}, {}, r_t},
        {"opendoor", {"door_open"}, {}, r_t},
    };
}

}  // namespace sorl::config
