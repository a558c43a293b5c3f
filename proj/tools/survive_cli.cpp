#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "survive/run.hpp"

namespace {

namespace fs = std::filesystem;

int exit_code(const std::string& category) {
    if (category == "config-missing") return 2;
    if (category == "config-schema") return 3;
    if (category == "config-range") return 4;
    if (category == "io") return 5;
    return 6;
}

survive::RunConfig load_config(const std::string& path,
                               const survive::ConfigOverrides& overrides) {
    if (path.empty()) return survive::parse_config_text("", overrides);
    return survive::parse_config(path, overrides);
}

long long run_and_write(const survive::RunConfig& cfg, const fs::path& out_dir,
                        survive::RunArtifacts* out_artifacts = nullptr) {
    const auto start = std::chrono::steady_clock::now();
    survive::RunArtifacts artifacts = survive::run_training(cfg);
    const auto wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    survive::write_artifacts(artifacts, cfg, out_dir);
    std::string info;
    info += "wall_ms = " + survive::format_int(wall_ms) + "\n";
    info += "episodes = " + survive::format_int(static_cast<long long>(
                                artifacts.metrics.size())) + "\n";
    info += "env_steps = " + survive::format_int(artifacts.metrics.empty()
                                 ? 0
                                 : artifacts.metrics.back().cum_env_steps) + "\n";
    survive::atomic_write_file(out_dir / "run_info.txt", info);
    if (out_artifacts) *out_artifacts = std::move(artifacts);
    return wall_ms;
}

struct TrainArgs {
    std::string config_path;
    std::string env, algo, out_dir;
    std::uint64_t seed = 0;
    bool has_env = false, has_algo = false, has_out = false, has_seed = false;

    survive::ConfigOverrides overrides() const {
        survive::ConfigOverrides ov;
        if (has_env) ov.env = env;
        if (has_algo) ov.algo = algo;
        if (has_out) ov.out_dir = out_dir;
        if (has_seed) ov.seed = seed;
        return ov;
    }
};

void add_common_flags(CLI::App& cmd, TrainArgs& args) {
    cmd.add_option("--config", args.config_path, "config file (key = value lines)");
    cmd.add_option("--env", args.env, "environment: cartpole | corridor")
        ->each([&args](const std::string&) { args.has_env = true; });
    cmd.add_option("--algo", args.algo, "algorithm: survive | dqn")
        ->each([&args](const std::string&) { args.has_algo = true; });
    cmd.add_option("--out", args.out_dir, "output directory")
        ->each([&args](const std::string&) { args.has_out = true; });
    cmd.add_option("--seed", args.seed, "master seed (overrides config)")
        ->each([&args](const std::string&) { args.has_seed = true; });
}

int cmd_train(const TrainArgs& args) {
    const survive::RunConfig cfg = load_config(args.config_path, args.overrides());
    const long long wall_ms = run_and_write(cfg, cfg.out_dir);
    std::cout << "trained " << cfg.algo << " on " << cfg.env << " (seed " << cfg.seed
              << ") in " << wall_ms << " ms -> " << cfg.out_dir << "\n";
    return 0;
}

struct GridArgs {
    std::string checkpoint;
    std::string env = "cartpole";
    std::string out_path = "grid.csv";
    int dim_i = 0, dim_j = 2;
    int resolution = 50;
    std::vector<double> min_max_i, min_max_j; // optional [min, max]
    std::vector<double> fixed;                // optional full state
};

int cmd_export_grid(const GridArgs& args) {
    survive::RunConfig env_cfg;
    env_cfg.env = args.env;
    if (args.env != "cartpole" && args.env != "corridor")
        throw survive::CliError("config-range", "env must be 'cartpole' or 'corridor'");
    const auto env = survive::make_environment(env_cfg);
    const std::vector<double> scales = env->state_scales();

    survive::Network net;
    try {
        net = survive::Network::load(args.checkpoint);
    } catch (const std::runtime_error& e) {
        throw survive::CliError("io", e.what());
    }
    if (net.input_size() != env->state_dim())
        throw survive::CliError("config-range",
                                "checkpoint input size does not match env '" + args.env +
                                    "'");
    const survive::DangerNet danger(std::move(net), scales);

    survive::GridSpec spec;
    spec.dim_i = args.dim_i;
    spec.dim_j = args.dim_j;
    spec.resolution = args.resolution;
    auto range_for = [&scales](int dim, const std::vector<double>& mm, double& lo,
                               double& hi) {
        if (mm.size() == 2) {
            lo = mm[0];
            hi = mm[1];
        } else if (dim >= 0 && dim < static_cast<int>(scales.size())) {
            lo = -scales[dim];
            hi = scales[dim];
        }
    };
    range_for(args.dim_i, args.min_max_i, spec.min_i, spec.max_i);
    range_for(args.dim_j, args.min_max_j, spec.min_j, spec.max_j);
    spec.fixed_values =
        args.fixed.empty() ? std::vector<double>(scales.size(), 0.0) : args.fixed;

    survive::export_danger_grid(danger, spec, args.out_path);
    std::cout << "exported " << args.resolution << "x" << args.resolution
              << " danger grid -> " << args.out_path << "\n";
    return 0;
}

struct CompareArgs {
    std::string config_path;
    std::string out_dir = "out/compare";
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
    std::string env;
    bool has_env = false;
};

int cmd_compare(const CompareArgs& args) {
    std::string joined = "algo,seed,episode,length,return,cum_env_steps,epsilon\n";
    for (const std::string algo : {"survive", "dqn"}) {
        for (const std::uint64_t seed : args.seeds) {
            survive::ConfigOverrides ov;
            ov.algo = algo;
            ov.seed = seed;
            if (args.has_env) ov.env = args.env;
            const survive::RunConfig cfg = load_config(args.config_path, ov);
            const fs::path run_dir =
                fs::path(args.out_dir) / (algo + "_seed" + std::to_string(seed));
            survive::RunArtifacts artifacts;
            const long long wall_ms = run_and_write(cfg, run_dir, &artifacts);
            for (const auto& row : artifacts.metrics) {
                joined += algo;
                joined += ',';
                joined += survive::format_int(static_cast<long long>(seed));
                joined += ',';
                joined += survive::format_int(row.episode);
                joined += ',';
                joined += survive::format_int(row.length);
                joined += ',';
                joined += survive::format_double(row.episode_return);
                joined += ',';
                joined += survive::format_int(row.cum_env_steps);
                joined += ',';
                joined += survive::format_double(row.epsilon);
                joined += '\n';
            }
            std::cout << algo << " seed " << seed << ": "
                      << artifacts.metrics.size() << " episodes in " << wall_ms
                      << " ms\n";
        }
    }
    survive::atomic_write_file(fs::path(args.out_dir) / "compare.csv", joined);
    std::cout << "joined metrics -> " << (fs::path(args.out_dir) / "compare.csv").string()
              << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"danger-map reinforcement learning: training, grid export, baselines"};
    app.require_subcommand(1);

    TrainArgs train_args;
    CLI::App* train = app.add_subcommand("train", "run one seeded training run");
    add_common_flags(*train, train_args);

    GridArgs grid_args;
    CLI::App* grid =
        app.add_subcommand("export-grid", "evaluate a danger checkpoint over a 2-D lattice");
    grid->add_option("--checkpoint", grid_args.checkpoint, "danger net checkpoint")
        ->required();
    grid->add_option("--env", grid_args.env, "environment supplying scales/ranges");
    grid->add_option("--dim-i", grid_args.dim_i, "outer grid dimension (default 0)");
    grid->add_option("--dim-j", grid_args.dim_j, "inner grid dimension (default 2)");
    grid->add_option("--resolution", grid_args.resolution, "lattice points per axis");
    grid->add_option("--range-i", grid_args.min_max_i,
                     "min,max for dim-i (default: +-scale)")
        ->delimiter(',')
        ->expected(2);
    grid->add_option("--range-j", grid_args.min_max_j,
                     "min,max for dim-j (default: +-scale)")
        ->delimiter(',')
        ->expected(2);
    grid->add_option("--fixed", grid_args.fixed,
                     "comma-separated values for the held dimensions (default: zeros)")
        ->delimiter(',');
    grid->add_option("--out", grid_args.out_path, "output CSV path");

    CompareArgs compare_args;
    CLI::App* compare =
        app.add_subcommand("compare", "run survive and dqn on shared seeds");
    compare->add_option("--config", compare_args.config_path, "config file");
    compare->add_option("--seeds", compare_args.seeds, "seeds to sweep")->delimiter(',');
    compare->add_option("--out", compare_args.out_dir, "output directory");
    compare->add_option("--env", compare_args.env, "environment: cartpole | corridor")
        ->each([&compare_args](const std::string&) { compare_args.has_env = true; });

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) return cmd_train(train_args);
        if (grid->parsed()) return cmd_export_grid(grid_args);
        return cmd_compare(compare_args);
    } catch (const survive::CliError& e) {
        std::cerr << e.category() << ": " << e.what() << "\n";
        return exit_code(e.category());
    } catch (const std::exception& e) {
        std::cerr << "runtime: " << e.what() << "\n";
        return exit_code("runtime");
    }
}
