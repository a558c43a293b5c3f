#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "survive/agent.hpp"
#include "survive/config.hpp"
#include "survive/dqn.hpp"
#include "survive/env.hpp"
#include "survive/grid.hpp"
#include "survive/io.hpp"
#include "survive/metrics.hpp"

namespace survive {

inline CartPoleParams cartpole_params(const RunConfig& cfg) {
    CartPoleParams p;
    p.gravity = cfg.cartpole_gravity;
    p.mass_cart = cfg.cartpole_mass_cart;
    p.mass_pole = cfg.cartpole_mass_pole;
    p.pole_half_length = cfg.cartpole_pole_half_length;
    p.force_magnitude = cfg.cartpole_force;
    p.time_step = cfg.cartpole_time_step;
    p.angle_threshold = cfg.cartpole_angle_threshold;
    p.position_threshold = cfg.cartpole_position_threshold;
    p.max_steps = cfg.cartpole_max_steps;
    return p;
}

inline std::unique_ptr<Environment> make_environment(const RunConfig& cfg) {
    if (cfg.env == "cartpole") return std::make_unique<CartPole>(cartpole_params(cfg));
    return std::make_unique<Corridor>(cfg.corridor_length, cfg.corridor_max_steps);
}

inline SurviveOptions survive_options(const RunConfig& cfg) {
    SurviveOptions opts;
    opts.reverse_horizon = cfg.h_r;
    opts.gamma = cfg.gamma;
    opts.alpha = cfg.alpha;
    opts.mode = cfg.danger_mode == "blend" ? DangerTrainMode::blend
                                           : DangerTrainMode::regression;
    opts.danger_epochs = cfg.danger_epochs;
    opts.transition_batch = cfg.transition_batch;
    opts.transition_steps = cfg.transition_steps;
    opts.learning_rate = cfg.learning_rate;
    opts.replay_capacity = static_cast<std::size_t>(cfg.replay_capacity);
    opts.epsilon = {cfg.epsilon_start, cfg.epsilon_end, cfg.epsilon_decay_steps};
    opts.warmup_episodes = cfg.warmup_episodes;
    opts.hidden_sizes = cfg.hidden_sizes;
    return opts;
}

inline DqnOptions dqn_options(const RunConfig& cfg) {
    DqnOptions opts;
    opts.gamma = cfg.gamma;
    opts.learning_rate = cfg.learning_rate;
    opts.batch_size = cfg.dqn_batch;
    opts.update_every = cfg.dqn_update_every;
    opts.target_sync = cfg.dqn_target_sync;
    opts.replay_capacity = static_cast<std::size_t>(cfg.replay_capacity);
    opts.epsilon = {cfg.epsilon_start, cfg.epsilon_end, cfg.epsilon_decay_steps};
    opts.hidden_sizes = cfg.hidden_sizes;
    opts.failure_reward = cfg.dqn_failure_reward;
    return opts;
}

struct NamedNetwork {
    std::string name;
    Network net;
};

struct RunArtifacts {
    std::vector<MetricsRow> metrics;
    std::vector<NamedNetwork> checkpoints;
    std::vector<double> scales; // normalization scales the nets were trained with
};

// One seeded training run. Everything downstream of the master generator is
// deterministic, so equal configs give byte-identical artifacts.
inline RunArtifacts run_training(const RunConfig& cfg) {
    Rng rng(cfg.seed);
    auto env = make_environment(cfg);

    RunArtifacts artifacts;
    artifacts.scales = env->state_scales();
    auto finished = [&cfg](long episodes, long steps) {
        if (episodes >= cfg.max_episodes) return true;
        return cfg.max_env_steps > 0 && steps >= cfg.max_env_steps;
    };

    if (cfg.algo == "survive") {
        SurviveAgent agent(env->state_dim(), env->num_actions(), env->state_scales(),
                           survive_options(cfg), rng);
        while (!finished(agent.episodes(), agent.env_steps())) {
            const EpisodeRecord rec = agent.run_episode(*env, rng);
            artifacts.metrics.push_back({agent.episodes(), rec.length,
                                         rec.episode_return, rec.cumulative_env_steps,
                                         rec.epsilon});
        }
        artifacts.checkpoints.push_back({"danger", agent.danger().network()});
        for (int a = 0; a < agent.transitions().num_actions(); ++a)
            artifacts.checkpoints.push_back(
                {"transition_" + std::to_string(a), agent.transitions().model(a)});
    } else {
        DqnAgent agent(env->state_dim(), env->num_actions(), env->state_scales(),
                       dqn_options(cfg), rng);
        while (!finished(agent.episodes(), agent.env_steps())) {
            const EpisodeRecord rec = agent.run_episode(*env, rng);
            artifacts.metrics.push_back({agent.episodes(), rec.length,
                                         rec.episode_return, rec.cumulative_env_steps,
                                         rec.epsilon});
        }
        artifacts.checkpoints.push_back({"qnet", agent.online()});
    }
    return artifacts;
}

inline void save_network_atomic(const Network& net, const std::filesystem::path& path) {
    std::error_code ec;
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec)
            throw CliError("io", "cannot create directory " +
                                     path.parent_path().string() + ": " + ec.message());
    }
    const std::filesystem::path tmp = path.string() + ".tmp";
    try {
        net.save(tmp.string());
    } catch (const std::runtime_error& e) {
        throw CliError("io", e.what());
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw CliError("io", "cannot rename " + tmp.string() + " to " + path.string() +
                                 ": " + ec.message());
}

// metrics.csv, one .ckpt per named network, and the fully resolved config
inline void write_artifacts(const RunArtifacts& artifacts, const RunConfig& cfg,
                            const std::filesystem::path& out_dir) {
    write_metrics(artifacts.metrics, (out_dir / "metrics.csv").string());
    for (const auto& [name, net] : artifacts.checkpoints)
        save_network_atomic(net, out_dir / (name + ".ckpt"));
    atomic_write_file(out_dir / "config_resolved.txt", serialize_config(cfg));
}

} // namespace survive
