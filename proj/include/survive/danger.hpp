#pragma once

#include <stdexcept>
#include <vector>

#include "survive/env.hpp"
#include "survive/memory.hpp"
#include "survive/nn.hpp"
#include "survive/rng.hpp"

namespace survive {

struct DangerTarget {
    State state;
    double target = 0.0; // in [0,1]
};

// Per-index target series for a terminated episode of states s_0..s_T:
// gamma^(T-t) for T-H_r <= t <= T, zero earlier. The discount powers are
// accumulated by repeated multiplication so the same k always yields the
// same bits regardless of how the caller slices the series.
inline std::vector<double> danger_target_series(std::size_t num_states, int reverse_horizon,
                                                double gamma) {
    if (num_states == 0)
        throw std::invalid_argument("danger_target_series: empty episode");
    if (reverse_horizon < 1)
        throw std::invalid_argument("danger_target_series: reverse horizon must be >= 1");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("danger_target_series: gamma must be in (0,1)");
    std::vector<double> targets(num_states, 0.0);
    double value = 1.0;
    std::size_t t = num_states; // walks T down to max(T - H_r, 0)
    for (int k = 0; k <= reverse_horizon && t-- > 0;
         ++k, value *= gamma)
        targets[t] = value;
    return targets;
}

// Head/tail targets for a terminated episode: head states carry their
// discounted target, tail states carry 0.
inline std::vector<DangerTarget> compute_targets(const EpisodeBuffer& episode,
                                                 int reverse_horizon, double gamma,
                                                 Rng& rng) {
    const HeadTailSplit split = head_tail_split(episode, reverse_horizon, rng);
    const std::vector<double> series =
        danger_target_series(episode.size(), reverse_horizon, gamma);
    std::vector<DangerTarget> targets;
    targets.reserve(split.head.size() + split.tail.size());
    for (std::size_t i = 0; i < split.head.size(); ++i)
        targets.push_back({split.head[i], series[split.head_indices[i]]});
    for (const auto& s : split.tail) targets.push_back({s, 0.0});
    return targets;
}

// One incremental step of the danger estimate toward 1.
inline double soft_blend(double current, double alpha) {
    return current + alpha * (1.0 - current);
}

// The same step generalized to an arbitrary target, used by blend-mode
// training.
inline double blend_toward(double current, double target, double alpha) {
    return current + alpha * (target - current);
}

enum class DangerTrainMode { regression, blend };

struct DangerTrainStats {
    double initial_loss = 0.0; // mean squared error before the first update
    double final_loss = 0.0;   // after the last epoch
    std::size_t samples = 0;
};

// Sigmoid-headed danger map D(s) in (0,1). The output layer starts at zero
// weights with a -4 bias, so a fresh net reports ~0.018 everywhere: all
// states look safe until evidence arrives.
class DangerNet {
public:
    DangerNet(int state_dim, const std::vector<int>& hidden_sizes,
              std::vector<double> scales, Rng& rng)
        : scales_(std::move(scales)) {
        if (static_cast<int>(scales_.size()) != state_dim)
            throw std::invalid_argument("DangerNet: scale dimension mismatch");
        std::vector<int> sizes{state_dim};
        sizes.insert(sizes.end(), hidden_sizes.begin(), hidden_sizes.end());
        sizes.push_back(1);
        Network::Options opts;
        opts.output_activation = Activation::sigmoid;
        opts.output_bias = -4.0;
        opts.zero_output_weights = true;
        net_ = Network(sizes, opts, rng);
    }

    DangerNet(Network net, std::vector<double> scales)
        : net_(std::move(net)), scales_(std::move(scales)) {
        if (net_.output_size() != 1)
            throw std::invalid_argument("DangerNet: network must have a scalar head");
        if (static_cast<int>(scales_.size()) != net_.input_size())
            throw std::invalid_argument("DangerNet: scale dimension mismatch");
    }

    double eval(const State& s) const { return net_.forward(normalized(s, scales_))[0]; }

    // Squared-error regression over the combined head+tail batch. In blend
    // mode each sample's effective target is the current estimate nudged
    // toward its raw target by alpha (computed once, before any update).
    DangerTrainStats train(const std::vector<DangerTarget>& head,
                           const std::vector<DangerTarget>& tail, int epochs,
                           double learning_rate, DangerTrainMode mode, double alpha,
                           Rng& rng) {
        if (head.empty())
            throw std::invalid_argument("DangerNet::train: head must be non-empty");
        if (epochs < 1)
            throw std::invalid_argument("DangerNet::train: epochs must be >= 1");

        std::vector<std::vector<double>> inputs;
        std::vector<double> targets;
        inputs.reserve(head.size() + tail.size());
        targets.reserve(head.size() + tail.size());
        for (const auto* batch : {&head, &tail})
            for (const auto& dt : *batch) {
                inputs.push_back(normalized(dt.state, scales_));
                targets.push_back(mode == DangerTrainMode::blend
                                      ? blend_toward(eval(dt.state), dt.target, alpha)
                                      : dt.target);
            }

        DangerTrainStats stats;
        stats.samples = inputs.size();
        stats.initial_loss = mean_loss(inputs, targets);
        for (int e = 0; e < epochs; ++e) {
            for (std::size_t i : rng.permutation(inputs.size())) {
                const double pred = net_.forward(inputs[i])[0];
                net_.apply_update(net_.backward(inputs[i], {2.0 * (pred - targets[i])}),
                                  learning_rate);
            }
        }
        stats.final_loss = mean_loss(inputs, targets);
        return stats;
    }

    Network& network() { return net_; }
    const Network& network() const { return net_; }
    const std::vector<double>& scales() const { return scales_; }

private:
    double mean_loss(const std::vector<std::vector<double>>& inputs,
                     const std::vector<double>& targets) const {
        double sum = 0.0;
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            const double d = net_.forward(inputs[i])[0] - targets[i];
            sum += d * d;
        }
        return sum / static_cast<double>(inputs.size());
    }

    Network net_;
    std::vector<double> scales_;
};

} // namespace survive
