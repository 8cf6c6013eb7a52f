#pragma once

#include <cstdint>
#include <random>

#include "harmonics/core.hpp"

namespace harmonics {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic sub-stream seed from a master seed and an index path,
/// e.g. derive_seed(master, epoch, batch) or derive_seed(master, alpha_rank).
inline uint64_t derive_seed(uint64_t master) { return splitmix64(master); }

template <typename... Rest>
uint64_t derive_seed(uint64_t master, uint64_t first, Rest... rest) {
    return derive_seed(splitmix64(master ^ splitmix64(first)), rest...);
}

struct Rng {
    std::mt19937_64 gen;
    std::normal_distribution<double> normal{0.0, 1.0};
    std::uniform_real_distribution<double> unit{0.0, 1.0};

    explicit Rng(uint64_t seed) : gen(seed) {}

    double gauss() { return normal(gen); }
    double uniform() { return unit(gen); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(gen); }

    Vec gauss_vec(int n) {
        Vec v(n);
        for (double& x : v) x = gauss();
        return v;
    }
};

} // namespace harmonics
