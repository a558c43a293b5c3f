#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

namespace survive {

// Deterministic random source. The transforms are hand-rolled on top of
// mt19937_64 so that generated sequences do not depend on the standard
// library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // uniform double in [0, 1)
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    // uniform integer in [0, n), n > 0
    int uniform_int(int n) {
        return static_cast<int>(uniform() * static_cast<double>(n));
    }

    std::uint64_t raw() { return gen_(); }

    // random permutation of 0..n-1 (Fisher-Yates)
    std::vector<std::size_t> permutation(std::size_t n) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            std::size_t j = i + static_cast<std::size_t>(
                                    uniform() * static_cast<double>(n - i));
            std::swap(idx[i], idx[j]);
        }
        return idx;
    }

    // k distinct indices drawn uniformly from [0, n), returned ascending.
    // If k > n, all n indices are returned.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k) {
        if (k > n) k = n;
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        for (std::size_t i = 0; i < k; ++i) {
            std::size_t j = i + static_cast<std::size_t>(
                                    uniform() * static_cast<double>(n - i));
            std::swap(idx[i], idx[j]);
        }
        idx.resize(k);
        std::sort(idx.begin(), idx.end());
        return idx;
    }

private:
    std::mt19937_64 gen_;
};

} // namespace survive
