#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "survive/danger.hpp"
#include "survive/env.hpp"
#include "survive/memory.hpp"
#include "survive/nn.hpp"
#include "survive/rng.hpp"
#include "survive/transition.hpp"

namespace survive {

struct EpsilonSchedule {
    double start = 1.0;
    double end = 0.05;
    long decay_steps = 5000;

    double value(long env_steps) const {
        if (env_steps >= decay_steps) return end;
        const double frac = static_cast<double>(env_steps) / static_cast<double>(decay_steps);
        return start + (end - start) * frac;
    }
};

// argmin with ties broken by lowest index
inline int greedy_action(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("greedy_action: empty value list");
    return static_cast<int>(std::min_element(values.begin(), values.end()) -
                            values.begin());
}

struct EpisodeRecord {
    int length = 0;
    double episode_return = 0.0;
    bool terminated = false;
    bool truncated = false;
    long cumulative_env_steps = 0;
    double epsilon = 0.0; // schedule value when the episode ended
};

struct SurviveOptions {
    int reverse_horizon = 20;
    double gamma = 0.95;
    double alpha = 0.1;
    DangerTrainMode mode = DangerTrainMode::regression;
    int danger_epochs = 50;
    int transition_batch = 64;
    int transition_steps = 100;
    double learning_rate = 1e-3;
    std::size_t replay_capacity = 100000;
    EpsilonSchedule epsilon;
    int warmup_episodes = 3; // purely random episodes before model lookahead
    std::vector<int> hidden_sizes{64};
};

// The Survive control loop: act by one-step lookahead through the per-action
// transition models, pick the least dangerous predicted next state, and on
// every true termination fit the danger map to reverse-horizon head/tail
// targets and
// refresh the transition models from replay.
class SurviveAgent {
public:
    SurviveAgent(int state_dim, int num_actions, std::vector<double> scales,
                 const SurviveOptions& opts, Rng& rng)
        : opts_(opts),
          danger_(state_dim, opts.hidden_sizes, scales, rng),
          transitions_(num_actions, state_dim, opts.hidden_sizes, scales, rng),
          replay_(opts.replay_capacity) {}

    // danger of each action's predicted next state
    std::vector<double> lookahead_dangers(const State& s) const {
        std::vector<double> dangers;
        dangers.reserve(transitions_.num_actions());
        for (const auto& next : transitions_.predict_all(s))
            dangers.push_back(danger_.eval(next));
        return dangers;
    }

    int select_action(const State& s, Rng& rng) const {
        if (episodes_ < opts_.warmup_episodes)
            return rng.uniform_int(transitions_.num_actions());
        if (rng.uniform() < opts_.epsilon.value(env_steps_))
            return rng.uniform_int(transitions_.num_actions());
        return greedy_action(lookahead_dangers(s));
    }

    EpisodeRecord run_episode(Environment& env, Rng& rng) {
        episode_.clear();
        State s = env.reset(rng);
        EpisodeRecord record;
        for (;;) {
            const int a = select_action(s, rng);
            const StepResult result = env.step(a);
            TransitionRecord tr{s, a, result.next_state, result.terminated,
                                result.truncated};
            replay_.push(tr);
            episode_.push(tr);
            ++env_steps_;
            ++record.length;
            record.episode_return += result.reward;
            s = result.next_state;
            if (result.terminated || result.truncated) {
                record.terminated = result.terminated;
                record.truncated = result.truncated;
                break;
            }
        }
        if (record.terminated) train_on_episode(rng);
        ++episodes_;
        record.cumulative_env_steps = env_steps_;
        record.epsilon = opts_.epsilon.value(env_steps_);
        return record;
    }

    const DangerNet& danger() const { return danger_; }
    DangerNet& danger() { return danger_; }
    const TransitionModelSet& transitions() const { return transitions_; }
    TransitionModelSet& transitions() { return transitions_; }
    const ReplayBuffer<TransitionRecord>& replay() const { return replay_; }
    const EpisodeBuffer& episode_buffer() const { return episode_; }
    long env_steps() const { return env_steps_; }
    int episodes() const { return episodes_; }

private:
    // Head/tail targets for the just-finished episode, then danger and
    // transition training, in that order.
    void train_on_episode(Rng& rng) {
        const HeadTailSplit split =
            head_tail_split(episode_, opts_.reverse_horizon, rng);
        const std::vector<double> series =
            danger_target_series(episode_.size(), opts_.reverse_horizon, opts_.gamma);
        std::vector<DangerTarget> head;
        std::vector<DangerTarget> tail;
        head.reserve(split.head.size());
        tail.reserve(split.tail.size());
        for (std::size_t i = 0; i < split.head.size(); ++i)
            head.push_back({split.head[i], series[split.head_indices[i]]});
        for (const auto& s : split.tail) tail.push_back({s, 0.0});
        danger_.train(head, tail, opts_.danger_epochs, opts_.learning_rate, opts_.mode,
                      opts_.alpha, rng);
        transitions_.train(replay_, opts_.transition_batch, opts_.transition_steps,
                           opts_.learning_rate, rng);
    }

    SurviveOptions opts_;
    DangerNet danger_;
    TransitionModelSet transitions_;
    ReplayBuffer<TransitionRecord> replay_;
    EpisodeBuffer episode_;
    long env_steps_ = 0;
    int episodes_ = 0;
};

} // namespace survive
