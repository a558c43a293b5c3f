#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "survive/agent.hpp"
#include "survive/env.hpp"
#include "survive/memory.hpp"
#include "survive/nn.hpp"
#include "survive/rng.hpp"

namespace survive {

// Reward-carrying transition; the danger-driven agent never needs rewards,
// the Bellman baseline does.
struct DqnTransition {
    State s_t;
    int a_t = 0;
    double reward = 0.0;
    State s_next;
    bool terminated = false;
    bool truncated = false;
};

// argmax with ties broken by lowest index
inline int greedy_max_action(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("greedy_max_action: empty value list");
    return static_cast<int>(std::max_element(values.begin(), values.end()) -
                            values.begin());
}

// One-step Bellman backup: r at a true terminal, r + gamma * max_a
// Q_target(s') otherwise.
// Truncation is not a terminal state, so it still bootstraps.
inline double bellman_target(const Network& target_net, const std::vector<double>& scales,
                             const DqnTransition& rec, double gamma) {
    if (rec.terminated) return rec.reward;
    const std::vector<double> q = target_net.forward(normalized(rec.s_next, scales));
    return rec.reward + gamma * *std::max_element(q.begin(), q.end());
}

struct DqnOptions {
    double gamma = 0.99;
    double learning_rate = 1e-3;
    int batch_size = 64;
    int update_every = 4;  // env steps between replay updates (conventional cadence)
    int target_sync = 500; // env steps between target-net snapshots
    std::size_t replay_capacity = 100000;
    EpsilonSchedule epsilon;
    std::vector<int> hidden_sizes{64};
    // added to the env reward on terminated steps; lets reward-free
    // environments (Corridor) expose failure to the baseline
    double failure_reward = 0.0;
};

// Minimal DQN: one online net, one periodically synced target copy,
// replay-sampled squared-error updates toward the Bellman target.
class DqnAgent {
public:
    DqnAgent(int state_dim, int num_actions, std::vector<double> scales,
             const DqnOptions& opts, Rng& rng)
        : opts_(opts), scales_(std::move(scales)), replay_(opts.replay_capacity) {
        if (static_cast<int>(scales_.size()) != state_dim)
            throw std::invalid_argument("DqnAgent: scale dimension mismatch");
        std::vector<int> sizes{state_dim};
        sizes.insert(sizes.end(), opts.hidden_sizes.begin(), opts.hidden_sizes.end());
        sizes.push_back(num_actions);
        Network::Options net_opts;
        net_opts.output_activation = Activation::identity;
        online_ = Network(sizes, net_opts, rng);
        target_ = online_;
    }

    std::vector<double> q_values(const State& s) const {
        return online_.forward(normalized(s, scales_));
    }

    int select_action(const State& s, Rng& rng) const {
        if (rng.uniform() < opts_.epsilon.value(env_steps_))
            return rng.uniform_int(online_.output_size());
        return greedy_max_action(q_values(s));
    }

    EpisodeRecord run_episode(Environment& env, Rng& rng) {
        State s = env.reset(rng);
        EpisodeRecord record;
        for (;;) {
            const int a = select_action(s, rng);
            const StepResult result = env.step(a);
            DqnTransition tr{s,
                             a,
                             result.reward +
                                 (result.terminated ? opts_.failure_reward : 0.0),
                             result.next_state,
                             result.terminated,
                             result.truncated};
            replay_.push(tr);
            ++env_steps_;
            ++record.length;
            record.episode_return += result.reward;
            s = result.next_state;
            if (replay_.size() >= static_cast<std::size_t>(opts_.batch_size) &&
                env_steps_ % opts_.update_every == 0)
                update_once(rng);
            if (env_steps_ % opts_.target_sync == 0) target_ = online_;
            if (result.terminated || result.truncated) {
                record.terminated = result.terminated;
                record.truncated = result.truncated;
                break;
            }
        }
        ++episodes_;
        record.cumulative_env_steps = env_steps_;
        record.epsilon = opts_.epsilon.value(env_steps_);
        return record;
    }

    const Network& online() const { return online_; }
    Network& online() { return online_; }
    const Network& target() const { return target_; }
    const ReplayBuffer<DqnTransition>& replay() const { return replay_; }
    long env_steps() const { return env_steps_; }
    int episodes() const { return episodes_; }

private:
    // one mean-gradient step on a replay batch, loss taken on the chosen
    // action's output only
    void update_once(Rng& rng) {
        const auto batch = replay_.sample(static_cast<std::size_t>(opts_.batch_size), rng);
        Gradients grads = online_.zero_grads();
        for (const auto& rec : batch) {
            const std::vector<double> input = normalized(rec.s_t, scales_);
            const std::vector<double> q = online_.forward(input);
            std::vector<double> dloss(q.size(), 0.0);
            dloss[rec.a_t] =
                2.0 * (q[rec.a_t] - bellman_target(target_, scales_, rec, opts_.gamma));
            grads.add(online_.backward(input, dloss));
        }
        grads.scale(1.0 / static_cast<double>(batch.size()));
        online_.apply_update(grads, opts_.learning_rate);
    }

    DqnOptions opts_;
    std::vector<double> scales_;
    Network online_;
    Network target_;
    ReplayBuffer<DqnTransition> replay_;
    long env_steps_ = 0;
    int episodes_ = 0;
};

} // namespace survive
