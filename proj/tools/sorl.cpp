#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "sorl/checks.hpp"
#include "sorl/config.hpp"
#include "sorl/harness.hpp"
#include "sorl/meta.hpp"
#include "sorl/pddl.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitCheckFailure = 3;

sorl::config::RunConfig build_config(const std::string& config_path,
                                     const std::vector<std::string>& overrides) {
    sorl::config::RunConfig cfg;
    if (!config_path.empty()) cfg = sorl::config::load_config_file(config_path);
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw sorl::config::ConfigError("--set expects key=value, got '" + kv + "'");
        }
        sorl::config::apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    sorl::config::validate(cfg);
    return cfg;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_training(const sorl::config::RunConfig& cfg) {
    const auto results = sorl::harness::run_all_seeds(cfg);
    const auto written = sorl::harness::emit_outputs(cfg, results);
    double best = 0.0;
    for (const auto& r : results) best = std::max(best, r.best_plan_quality);
    std::cout << sorl::config::algo_name(cfg.algo) << " on " << sorl::config::env_name(cfg.env)
              << ": " << results.size() << " seed(s), best executed plan quality "
              << sorl::pddl::format_real(best) << "\n";
    for (const auto& path : written) std::cout << "  wrote " << path << "\n";
    return 0;
}

// Reads one of our run CSVs back into episode logs (for plot).
std::vector<sorl::harness::EpisodeLog> read_csv_logs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read csv: " + path);
    std::vector<sorl::harness::EpisodeLog> logs;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + path);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        sorl::harness::EpisodeLog log;
        std::istringstream ls(line);
        std::string field;
        auto next = [&] {
            if (!std::getline(ls, field, ',')) throw std::runtime_error("short row in " + path);
            return field;
        };
        log.episode = std::stoi(next());
        log.env_steps = std::stoll(next());
        log.reward = std::stod(next());
        log.plan_quality = std::stod(next());
        log.n_actions = std::stoi(next());
        log.n_options = std::stoi(next());
        log.n_methods = std::stoi(next());
        logs.push_back(log);
    }
    return logs;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"symbolic-options reinforcement learning laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "key=value config file");
        cmd->add_option("--set", overrides, "config override, key=value (repeatable)");
    };

    auto* train = app.add_subcommand("train", "train per the configured algorithm");
    add_common(train);

    auto* transfer = app.add_subcommand("transfer", "train with warm-start option snapshots");
    add_common(transfer);
    std::string snapshots;
    transfer->add_option("--snapshots", snapshots, "comma-separated option snapshot files")
        ->required();

    auto* export_pddl = app.add_subcommand("export-pddl", "write a models dump as PDDL text");
    std::string models_path, out_domain = "domain.pddl", out_problem = "problem.pddl";
    std::string init_props;
    double quality_threshold = 0.0;
    export_pddl->add_option("--models", models_path, "models dump file")->required();
    export_pddl->add_option("--out-domain", out_domain, "domain output path");
    export_pddl->add_option("--out-problem", out_problem, "problem output path");
    export_pddl->add_option("--init", init_props, "comma-separated initial propositions");
    export_pddl->add_option("--quality", quality_threshold, "goal threshold q");

    auto* dump = app.add_subcommand("dump-models", "print a learned-models dump");
    std::string dump_path;
    dump->add_option("--models", dump_path, "models dump file")->required();

    auto* plot = app.add_subcommand("plot", "regenerate a learning-curve SVG from run CSVs");
    std::string plot_out = "curve.svg", plot_title = "learning curve";
    std::vector<std::string> plot_csvs;
    plot->add_option("--out", plot_out, "SVG output path");
    plot->add_option("--title", plot_title, "plot title");
    plot->add_option("csvs", plot_csvs, "run CSV files")->required();

    auto* selftest = app.add_subcommand("selftest", "run the oracle check suites");
    bool fast = false;
    std::uint64_t selftest_seed = 20240901;
    selftest->add_flag("--fast", fast, "smaller case counts");
    selftest->add_option("--seed", selftest_seed, "suite seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) {
            return run_training(build_config(config_path, overrides));
        }
        if (transfer->parsed()) {
            overrides.push_back("algo=sorl");
            overrides.push_back("snapshots=" + snapshots);
            return run_training(build_config(config_path, overrides));
        }
        if (export_pddl->parsed()) {
            const auto loaded = sorl::meta::load_models_dump(read_file(models_path));
            sorl::PropMask init = 0;
            if (!init_props.empty()) {
                std::istringstream ss(init_props);
                std::string p;
                while (std::getline(ss, p, ',')) {
                    init |= sorl::PropMask{1} << loaded.vocab->index_of(p);
                }
            }
            std::ofstream dom(out_domain);
            dom << sorl::pddl::serialize_domain(*loaded.vocab, loaded.actions);
            std::ofstream prob(out_problem);
            prob << sorl::pddl::serialize_problem(sorl::SymbolicState(loaded.vocab, init),
                                                  quality_threshold);
            std::cout << "wrote " << out_domain << " and " << out_problem << "\n";
            return 0;
        }
        if (dump->parsed()) {
            std::cout << read_file(dump_path);
            return 0;
        }
        if (plot->parsed()) {
            std::vector<sorl::harness::RunResult> results;
            for (const auto& path : plot_csvs) {
                sorl::harness::RunResult r;
                r.logs = read_csv_logs(path);
                results.push_back(std::move(r));
            }
            std::ofstream out(plot_out);
            if (!out) throw std::runtime_error("cannot write " + plot_out);
            out << sorl::harness::learning_curve_svg(results, plot_title);
            std::cout << "wrote " << plot_out << "\n";
            return 0;
        }
        if (selftest->parsed()) {
            const int cases = fast ? 200 : 1000;
            const int instances = fast ? 50 : 200;
            const int domains = fast ? 25 : 100;
            const sorl::checks::CheckResult suites[] = {
                sorl::checks::semantics_suite(selftest_seed, cases),
                sorl::checks::planner_suite(selftest_seed + 1, instances),
                sorl::checks::pddl_roundtrip_suite(selftest_seed + 2, domains),
            };
            bool all_ok = true;
            for (const auto& s : suites) {
                std::cout << (s.passed ? "PASS" : "FAIL") << " " << s.name << ": " << s.detail
                          << "\n";
                all_ok = all_ok && s.passed;
            }
            return all_ok ? 0 : kExitCheckFailure;
        }
    } catch (const sorl::config::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
