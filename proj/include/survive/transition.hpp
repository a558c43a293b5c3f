#pragma once

#include <stdexcept>
#include <vector>

#include "survive/env.hpp"
#include "survive/memory.hpp"
#include "survive/nn.hpp"
#include "survive/rng.hpp"

namespace survive {

struct TransitionTrainReport {
    std::vector<double> model_loss;        // mean squared delta error per model
    std::vector<std::size_t> model_samples; // records routed to each model
    std::vector<double> step_loss;          // mean batch loss per optimizer step
};

// One next-state predictor per action (the action is encoded by network
// identity). Each net maps the normalized state to a raw state delta, so a
// freshly zero-initialized model predicts "stay put" exactly.
class TransitionModelSet {
public:
    TransitionModelSet(int num_actions, int state_dim,
                       const std::vector<int>& hidden_sizes, std::vector<double> scales,
                       Rng& rng)
        : scales_(std::move(scales)) {
        if (num_actions < 1)
            throw std::invalid_argument("TransitionModelSet: need at least one action");
        if (static_cast<int>(scales_.size()) != state_dim)
            throw std::invalid_argument("TransitionModelSet: scale dimension mismatch");
        std::vector<int> sizes{state_dim};
        sizes.insert(sizes.end(), hidden_sizes.begin(), hidden_sizes.end());
        sizes.push_back(state_dim);
        Network::Options opts;
        opts.output_activation = Activation::identity;
        opts.zero_output_weights = true;
        models_.reserve(num_actions);
        for (int i = 0; i < num_actions; ++i) models_.emplace_back(sizes, opts, rng);
    }

    int num_actions() const { return static_cast<int>(models_.size()); }
    int state_dim() const { return models_.front().input_size(); }
    Network& model(int action) { return models_.at(action); }
    const Network& model(int action) const { return models_.at(action); }
    const std::vector<double>& scales() const { return scales_; }

    State predict(int action, const State& s) const {
        const std::vector<double> delta = models_.at(action).forward(normalized(s, scales_));
        State next = s;
        for (std::size_t i = 0; i < next.size(); ++i) next[i] += delta[i];
        return next;
    }

    std::vector<State> predict_all(const State& s) const {
        std::vector<State> out;
        out.reserve(models_.size());
        for (int i = 0; i < num_actions(); ++i) out.push_back(predict(i, s));
        return out;
    }

    // Replay-sampled regression of per-action deltas: each step draws one
    // batch, routes records to their action's model, and applies one mean-
    // gradient update per model that received samples.
    TransitionTrainReport train(const ReplayBuffer<TransitionRecord>& replay,
                                int batch_size, int steps, double learning_rate,
                                Rng& rng) {
        if (batch_size < 1)
            throw std::invalid_argument("TransitionModelSet::train: batch_size must be >= 1");
        if (steps < 0)
            throw std::invalid_argument("TransitionModelSet::train: steps must be >= 0");

        TransitionTrainReport report;
        report.model_loss.assign(models_.size(), 0.0);
        report.model_samples.assign(models_.size(), 0);
        report.step_loss.reserve(steps);

        for (int step = 0; step < steps; ++step) {
            const auto batch = replay.sample(static_cast<std::size_t>(batch_size), rng);
            std::vector<Gradients> grads(models_.size());
            std::vector<std::size_t> counts(models_.size(), 0);
            double batch_loss = 0.0;
            for (const auto& rec : batch) {
                const int a = rec.a_t;
                if (a < 0 || a >= num_actions())
                    throw std::invalid_argument("TransitionModelSet::train: bad action index");
                const std::vector<double> input = normalized(rec.s_t, scales_);
                const std::vector<double> pred = models_[a].forward(input);
                std::vector<double> dloss(pred.size());
                double loss = 0.0;
                for (std::size_t i = 0; i < pred.size(); ++i) {
                    const double err = pred[i] - (rec.s_next[i] - rec.s_t[i]);
                    dloss[i] = 2.0 * err;
                    loss += err * err;
                }
                if (counts[a] == 0) grads[a] = models_[a].zero_grads();
                grads[a].add(models_[a].backward(input, dloss));
                ++counts[a];
                batch_loss += loss;
                report.model_loss[a] += loss;
                ++report.model_samples[a];
            }
            for (std::size_t a = 0; a < models_.size(); ++a) {
                if (counts[a] == 0) continue;
                grads[a].scale(1.0 / static_cast<double>(counts[a]));
                models_[a].apply_update(grads[a], learning_rate);
            }
            report.step_loss.push_back(batch_loss / static_cast<double>(batch.size()));
        }
        for (std::size_t a = 0; a < models_.size(); ++a)
            if (report.model_samples[a] > 0)
                report.model_loss[a] /= static_cast<double>(report.model_samples[a]);
        return report;
    }

private:
    std::vector<Network> models_;
    std::vector<double> scales_;
};

} // namespace survive
