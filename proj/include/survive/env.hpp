#pragma once

#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "survive/rng.hpp"

namespace survive {

// Environment observation: fixed-length real vector.
using State = std::vector<double>;

struct StepResult {
    State next_state;
    double reward = 0.0;
    bool terminated = false; // entered a terminal state
    bool truncated = false;  // hit the episode step limit
};

struct CartPoleParams {
    double gravity = 9.8;
    double mass_cart = 1.0;            // kg
    double mass_pole = 0.1;            // kg
    double pole_half_length = 0.5;     // m, pivot to center of mass
    double force_magnitude = 10.0;     // N
    double time_step = 0.02;           // s
    double angle_threshold = 12.0 * 2.0 * std::numbers::pi / 360.0; // rad
    double position_threshold = 2.4;   // m
    int max_steps = 500;

    void validate() const {
        auto positive = [](double v, const char* name) {
            if (!(v > 0.0))
                throw std::invalid_argument(std::string("CartPoleParams: ") + name +
                                            " must be positive");
        };
        positive(gravity, "gravity");
        positive(mass_cart, "mass_cart");
        positive(mass_pole, "mass_pole");
        positive(pole_half_length, "pole_half_length");
        positive(force_magnitude, "force_magnitude");
        positive(time_step, "time_step");
        positive(angle_threshold, "angle_threshold");
        positive(position_threshold, "position_threshold");
        if (max_steps < 1)
            throw std::invalid_argument("CartPoleParams: max_steps must be >= 1");
    }
};

// One explicit-Euler step of the standard cart-pole dynamics. Pure function:
// state is (x, x_dot, beta, beta_dot), action 0 pushes left, 1 pushes right.
inline State cartpole_step(const State& s, int action, const CartPoleParams& p) {
    if (s.size() != 4)
        throw std::invalid_argument("cartpole_step: state must have 4 components");
    if (action != 0 && action != 1)
        throw std::invalid_argument("cartpole_step: action must be 0 or 1");

    const double x = s[0], x_dot = s[1], beta = s[2], beta_dot = s[3];
    const double force = action == 1 ? p.force_magnitude : -p.force_magnitude;
    const double total_mass = p.mass_cart + p.mass_pole;
    const double polemass_length = p.mass_pole * p.pole_half_length;
    const double cos_b = std::cos(beta);
    const double sin_b = std::sin(beta);

    const double temp =
        (force + polemass_length * beta_dot * beta_dot * sin_b) / total_mass;
    const double beta_acc =
        (p.gravity * sin_b - cos_b * temp) /
        (p.pole_half_length * (4.0 / 3.0 - p.mass_pole * cos_b * cos_b / total_mass));
    const double x_acc = temp - polemass_length * beta_acc * cos_b / total_mass;

    return {x + p.time_step * x_dot,
            x_dot + p.time_step * x_acc,
            beta + p.time_step * beta_dot,
            beta_dot + p.time_step * beta_acc};
}

//Environment base: value-like objects, one owner at a time, all
// randomness through the explicitly passed generator.
class Environment {
public:
    virtual ~Environment() = default;
    virtual std::string name() const = 0;
    virtual int state_dim() const = 0;
    virtual int num_actions() const = 0;
    // Fixed per-dimension scales used to normalize states before they enter
    // any network.
    virtual std::vector<double> state_scales() const = 0;
    virtual State reset(Rng& rng) = 0;
    virtual StepResult step(int action) = 0;
    virtual const State& state() const = 0;
};

class CartPole final : public Environment {
public:
    explicit CartPole(const CartPoleParams& params = {}) : params_(params) {
        params_.validate();
    }

    std::string name() const override { return "cartpole"; }
    int state_dim() const override { return 4; }
    int num_actions() const override { return 2; }
    const CartPoleParams& params() const { return params_; }

    std::vector<double> state_scales() const override {
        return {params_.position_threshold, 3.0, params_.angle_threshold, 3.5};
    }

    State reset(Rng& rng) override {
        state_.assign(4, 0.0);
        for (auto& v : state_) v = rng.uniform(-0.05, 0.05);
        steps_ = 0;
        done_ = false;
        return state_;
    }

    StepResult step(int action) override {
        if (done_) throw std::logic_error("CartPole::step: episode already finished");
        state_ = cartpole_step(state_, action, params_);
        ++steps_;
        StepResult result;
        result.next_state = state_;
        result.reward = 1.0;
        result.terminated = std::abs(state_[0]) > params_.position_threshold ||
                            std::abs(state_[2]) > params_.angle_threshold;
        result.truncated = !result.terminated && steps_ >= params_.max_steps;
        done_ = result.terminated || result.truncated;
        return result;
    }

    const State& state() const override { return state_; }

private:
    CartPoleParams params_;
    State state_{0.0, 0.0, 0.0, 0.0};
    int steps_ = 0;
    bool done_ = true; // unusable until reset
};

// Deterministic strip of cells 0..length-1. Cell 0 is terminal; action 0
// moves left, action 1 moves right (the top cell blocks further right moves).
// Reward is 0 on every step. Small enough to enumerate exactly in tests.
class Corridor final : public Environment {
public:
    explicit Corridor(int length = 5, int max_steps = 500)
        : length_(length), max_steps_(max_steps) {
        if (length_ < 2) throw std::invalid_argument("Corridor: length must be >= 2");
        if (max_steps_ < 1) throw std::invalid_argument("Corridor: max_steps must be >= 1");
    }

    std::string name() const override { return "corridor"; }
    int state_dim() const override { return 1; }
    int num_actions() const override { return 2; }
    int length() const { return length_; }

    std::vector<double> state_scales() const override {
        return {static_cast<double>(length_ - 1)};
    }

    State reset(Rng&) override {
        cell_ = (length_ - 1) / 2; // midpoint of the track
        steps_ = 0;
        done_ = false;
        state_ = {static_cast<double>(cell_)};
        return state_;
    }

    StepResult step(int action) override {
        if (done_) throw std::logic_error("Corridor::step: episode already finished");
        if (action != 0 && action != 1)
            throw std::invalid_argument("Corridor::step: action must be 0 or 1");
        int next = action == 0 ? cell_ - 1 : cell_ + 1;
        if (next > length_ - 1) next = length_ - 1;
        cell_ = next;
        ++steps_;
        state_ = {static_cast<double>(cell_)};
        StepResult result;
        result.next_state = state_;
        result.reward = 0.0;
        result.terminated = cell_ == 0;
        result.truncated = !result.terminated && steps_ >= max_steps_;
        done_ = result.terminated || result.truncated;
        return result;
    }

    const State& state() const override { return state_; }

private:
    int length_;
    int max_steps_;
    int cell_ = 0;
    int steps_ = 0;
    bool done_ = true;
    State state_;
};

// componentwise division by the environment's fixed scales
inline State normalized(const State& s, const std::vector<double>& scales) {
    if (s.size() != scales.size())
        throw std::invalid_argument("normalized: scale dimension mismatch");
    State out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i] / scales[i];
    return out;
}

} // namespace survive
