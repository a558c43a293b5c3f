#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "survive/rng.hpp"

namespace survive {

enum class Activation { identity, sigmoid };
enum class Optimizer { sgd, adam };

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct LayerGrads {
    std::vector<double> weights;
    std::vector<double> biases;
};

struct Gradients {
    std::vector<LayerGrads> layers;

    void add(const Gradients& other) {
        for (std::size_t l = 0; l < layers.size(); ++l) {
            auto& g = layers[l];
            const auto& o = other.layers[l];
            for (std::size_t i = 0; i < g.weights.size(); ++i) g.weights[i] += o.weights[i];
            for (std::size_t i = 0; i < g.biases.size(); ++i) g.biases[i] += o.biases[i];
        }
    }

    void scale(double factor) {
        for (auto& g : layers) {
            for (auto& w : g.weights) w *= factor;
            for (auto& b : g.biases) b *= factor;
        }
    }

    bool finite() const {
        for (const auto& g : layers) {
            for (double w : g.weights)
                if (!std::isfinite(w)) return false;
            for (double b : g.biases)
                if (!std::isfinite(b)) return false;
        }
        return true;
    }
};

// Fully connected feed-forward network: tanh on hidden layers, identity or
// sigmoid on the output head. Weights are row-major [out x in]. The network
// owns its optimizer state, so it is a self-contained trainable value.
class Network {
public:
    struct Layer {
        int in = 0;
        int out = 0;
        std::vector<double> w; // row-major, w[r * in + c]
        std::vector<double> b;
    };

    struct Options {
        Activation output_activation = Activation::identity;
        double output_bias = 0.0;
        // When set, the output layer's weights start at exactly zero so the
        // head emits output_bias (through its activation) for every input.
        bool zero_output_weights = false;
        Optimizer optimizer = Optimizer::adam;
        double adam_beta1 = 0.9;
        double adam_beta2 = 0.999;
        double adam_eps = 1e-8;
    };

    Network() = default;

    Network(const std::vector<int>& layer_sizes, const Options& opts, Rng& rng)
        : sizes_(layer_sizes), opts_(opts) {
        if (layer_sizes.size() < 2)
            throw std::invalid_argument("Network: need at least 2 layer sizes");
        for (int s : layer_sizes)
            if (s <= 0) throw std::invalid_argument("Network: layer sizes must be positive");

        const std::size_t n_layers = layer_sizes.size() - 1;
        layers_.resize(n_layers);
        for (std::size_t l = 0; l < n_layers; ++l) {
            Layer& layer = layers_[l];
            layer.in = layer_sizes[l];
            layer.out = layer_sizes[l + 1];
            layer.w.assign(static_cast<std::size_t>(layer.in) * layer.out, 0.0);
            layer.b.assign(layer.out, 0.0);
            const bool last = l + 1 == n_layers;
            if (!(last && opts.zero_output_weights)) {
                const double scale = 1.0 / std::sqrt(static_cast<double>(layer.in));
                for (auto& w : layer.w) w = rng.uniform(-scale, scale);
            }
            if (last)
                for (auto& b : layer.b) b = opts.output_bias;
        }
        init_opt_state();
    }

    const std::vector<int>& layer_sizes() const { return sizes_; }
    int input_size() const { return sizes_.front(); }
    int output_size() const { return sizes_.back(); }
    Activation output_activation() const { return opts_.output_activation; }
    const std::vector<Layer>& layers() const { return layers_; }
    Layer& layer(std::size_t l) { return layers_[l]; }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const auto& l : layers_) n += l.w.size() + l.b.size();
        return n;
    }

    std::vector<double> forward(const std::vector<double>& input) const {
        check_input(input);
        std::vector<double> a = input;
        std::vector<double> z;
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            affine(layers_[l], a, z);
            activate(z, l + 1 == layers_.size());
            a.swap(z);
        }
        return a;
    }

    // Gradients of a scalar loss w.r.t. every parameter, given dLoss/dOutput.
    // Recomputes the forward pass internally, so it stays a pure function of
    // (parameters, input, loss gradient).
    Gradients backward(const std::vector<double>& input,
                       const std::vector<double>& dloss_dout) const {
        check_input(input);
        if (static_cast<int>(dloss_dout.size()) != output_size())
            throw std::invalid_argument("Network::backward: loss gradient size mismatch");

        const std::size_t n_layers = layers_.size();
        std::vector<std::vector<double>> acts(n_layers + 1);
        acts[0] = input;
        for (std::size_t l = 0; l < n_layers; ++l) {
            affine(layers_[l], acts[l], acts[l + 1]);
            activate(acts[l + 1], l + 1 == n_layers);
        }

        Gradients grads = zero_grads();
        std::vector<double> delta(dloss_dout);
        // output activation derivative
        if (opts_.output_activation == Activation::sigmoid) {
            const auto& out = acts[n_layers];
            for (std::size_t i = 0; i < delta.size(); ++i)
                delta[i] *= out[i] * (1.0 - out[i]);
        }
        for (std::size_t l = n_layers; l-- > 0;) {
            const Layer& layer = layers_[l];
            auto& g = grads.layers[l];
            const auto& a_in = acts[l];
            for (int r = 0; r < layer.out; ++r) {
                g.biases[r] = delta[r];
                const std::size_t row = static_cast<std::size_t>(r) * layer.in;
                for (int c = 0; c < layer.in; ++c)
                    g.weights[row + c] = delta[r] * a_in[c];
            }
            if (l > 0) {
                std::vector<double> prev(layer.in, 0.0);
                for (int r = 0; r < layer.out; ++r) {
                    const std::size_t row = static_cast<std::size_t>(r) * layer.in;
                    for (int c = 0; c < layer.in; ++c)
                        prev[c] += layer.w[row + c] * delta[r];
                }
                // hidden layers are tanh; derivative from the stored activation
                for (int c = 0; c < layer.in; ++c)
                    prev[c] *= 1.0 - a_in[c] * a_in[c];
                delta.swap(prev);
            }
        }
        return grads;
    }

    Gradients zero_grads() const {
        Gradients g;
        g.layers.resize(layers_.size());
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            g.layers[l].weights.assign(layers_[l].w.size(), 0.0);
            g.layers[l].biases.assign(layers_[l].b.size(), 0.0);
        }
        return g;
    }

    // Moves parameters against the gradient with the configured optimizer.
    void apply_update(const Gradients& grads, double learning_rate) {
        if (grads.layers.size() != layers_.size())
            throw std::invalid_argument("Network::apply_update: gradient shape mismatch");
        for (std::size_t l = 0; l < layers_.size(); ++l)
            if (grads.layers[l].weights.size() != layers_[l].w.size() ||
                grads.layers[l].biases.size() != layers_[l].b.size())
                throw std::invalid_argument("Network::apply_update: gradient shape mismatch");
        if (!grads.finite())
            throw std::runtime_error("Network::apply_update: non-finite gradient");

        if (opts_.optimizer == Optimizer::sgd) {
            for (std::size_t l = 0; l < layers_.size(); ++l) {
                auto& layer = layers_[l];
                const auto& g = grads.layers[l];
                for (std::size_t i = 0; i < layer.w.size(); ++i)
                    layer.w[i] -= learning_rate * g.weights[i];
                for (std::size_t i = 0; i < layer.b.size(); ++i)
                    layer.b[i] -= learning_rate * g.biases[i];
            }
            return;
        }

        ++adam_step_;
        const double b1 = opts_.adam_beta1;
        const double b2 = opts_.adam_beta2;
        const double bc1 = 1.0 - std::pow(b1, static_cast<double>(adam_step_));
        const double bc2 = 1.0 - std::pow(b2, static_cast<double>(adam_step_));
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            auto& layer = layers_[l];
            const auto& g = grads.layers[l];
            auto& st = adam_[l];
            for (std::size_t i = 0; i < layer.w.size(); ++i) {
                st.mw[i] = b1 * st.mw[i] + (1.0 - b1) * g.weights[i];
                st.vw[i] = b2 * st.vw[i] + (1.0 - b2) * g.weights[i] * g.weights[i];
                layer.w[i] -= learning_rate * (st.mw[i] / bc1) /
                              (std::sqrt(st.vw[i] / bc2) + opts_.adam_eps);
            }
            for (std::size_t i = 0; i < layer.b.size(); ++i) {
                st.mb[i] = b1 * st.mb[i] + (1.0 - b1) * g.biases[i];
                st.vb[i] = b2 * st.vb[i] + (1.0 - b2) * g.biases[i] * g.biases[i];
                layer.b[i] -= learning_rate * (st.mb[i] / bc1) /
                              (std::sqrt(st.vb[i] / bc2) + opts_.adam_eps);
            }
        }
    }

    bool parameters_finite() const {
        for (const auto& l : layers_) {
            for (double w : l.w)
                if (!std::isfinite(w)) return false;
            for (double b : l.b)
                if (!std::isfinite(b)) return false;
        }
        return true;
    }

    bool same_parameters(const Network& other) const {
        if (sizes_ != other.sizes_) return false;
        for (std::size_t l = 0; l < layers_.size(); ++l)
            if (layers_[l].w != other.layers_[l].w || layers_[l].b != other.layers_[l].b)
                return false;
        return true;
    }

    void save(const std::string& path) const;
    static Network load(const std::string& path);

private:
    struct AdamState {
        std::vector<double> mw, vw, mb, vb;
    };

    void init_opt_state() {
        adam_.resize(layers_.size());
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            adam_[l].mw.assign(layers_[l].w.size(), 0.0);
            adam_[l].vw.assign(layers_[l].w.size(), 0.0);
            adam_[l].mb.assign(layers_[l].b.size(), 0.0);
            adam_[l].vb.assign(layers_[l].b.size(), 0.0);
        }
        adam_step_ = 0;
    }

    void check_input(const std::vector<double>& input) const {
        if (layers_.empty())
            throw std::logic_error("Network: uninitialized");
        if (static_cast<int>(input.size()) != input_size())
            throw std::invalid_argument("Network: input size mismatch");
    }

    static void affine(const Layer& layer, const std::vector<double>& a,
                       std::vector<double>& out) {
        out.assign(layer.out, 0.0);
        for (int r = 0; r < layer.out; ++r) {
            double acc = layer.b[r];
            const std::size_t row = static_cast<std::size_t>(r) * layer.in;
            for (int c = 0; c < layer.in; ++c) acc += layer.w[row + c] * a[c];
            out[r] = acc;
        }
    }

    void activate(std::vector<double>& z, bool last) const {
        if (!last) {
            for (auto& v : z) v = std::tanh(v);
        } else if (opts_.output_activation == Activation::sigmoid) {
            for (auto& v : z) v = sigmoid(v);
        }
    }

    std::vector<int> sizes_;
    Options opts_;
    std::vector<Layer> layers_;
    std::vector<AdamState> adam_;
    long adam_step_ = 0;
};

// --- checkpoint format -----------------------------------------------------
// Versioned flat file, little-endian throughout:
//   u32 version (1), u32 n_sizes, u32 sizes..., u32 hidden activation tag
//   (0 = tanh), u32 output activation tag (0 = identity, 1 = sigmoid),
// followed per layer by the row-major weight matrix then the bias vector,
// all as 64-bit floats.

namespace detail {

inline void write_u32(std::ostream& os, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    os.write(b, 4);
}

inline std::uint32_t read_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw std::runtime_error("checkpoint: truncated header");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

inline void write_f64(std::ostream& os, double d) {
    std::uint64_t u;
    std::memcpy(&u, &d, 8);
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((u >> (8 * i)) & 0xff);
    os.write(b, 8);
}

inline double read_f64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    if (!is) throw std::runtime_error("checkpoint: truncated data");
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double d;
    std::memcpy(&d, &u, 8);
    return d;
}

} // namespace detail

inline void Network::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("checkpoint: cannot open " + path + " for writing");
    detail::write_u32(os, 1u);
    detail::write_u32(os, static_cast<std::uint32_t>(sizes_.size()));
    for (int s : sizes_) detail::write_u32(os, static_cast<std::uint32_t>(s));
    detail::write_u32(os, 0u); // hidden activation: tanh
    detail::write_u32(os, opts_.output_activation == Activation::sigmoid ? 1u : 0u);
    for (const auto& l : layers_) {
        for (double w : l.w) detail::write_f64(os, w);
        for (double b : l.b) detail::write_f64(os, b);
    }
    if (!os) throw std::runtime_error("checkpoint: write failed for " + path);
}

inline Network Network::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("checkpoint: cannot open " + path);
    const std::uint32_t version = detail::read_u32(is);
    if (version != 1)
        throw std::runtime_error("checkpoint: unsupported version in " + path);
    const std::uint32_t n_sizes = detail::read_u32(is);
    if (n_sizes < 2 || n_sizes > 64)
        throw std::runtime_error("checkpoint: invalid layer count in " + path);
    std::vector<int> sizes(n_sizes);
    for (auto& s : sizes) {
        s = static_cast<int>(detail::read_u32(is));
        if (s <= 0) throw std::runtime_error("checkpoint: invalid layer size in " + path);
    }
    const std::uint32_t hidden_tag = detail::read_u32(is);
    if (hidden_tag != 0)
        throw std::runtime_error("checkpoint: unknown hidden activation in " + path);
    const std::uint32_t out_tag = detail::read_u32(is);
    if (out_tag > 1)
        throw std::runtime_error("checkpoint: unknown output activation in " + path);

    Network net;
    net.sizes_ = sizes;
    net.opts_.output_activation = out_tag == 1 ? Activation::sigmoid : Activation::identity;
    net.layers_.resize(n_sizes - 1);
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        Layer& layer = net.layers_[l];
        layer.in = sizes[l];
        layer.out = sizes[l + 1];
        layer.w.resize(static_cast<std::size_t>(layer.in) * layer.out);
        layer.b.resize(layer.out);
        for (auto& w : layer.w) w = detail::read_f64(is);
        for (auto& b : layer.b) b = detail::read_f64(is);
    }
    net.init_opt_state();
    return net;
}

} // namespace survive
