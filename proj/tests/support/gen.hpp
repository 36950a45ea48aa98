#pragma once

// Minimal generator helpers for property tests: a seeded engine plus a few
// samplers. Seeds are fixed so failures reproduce.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace medcalc::testing {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

    /// Log-uniform magnitude with random sign; covers 1e-6 .. 1e6.
    double magnitude() {
        const double v = std::pow(10.0, uniform(-6.0, 6.0));
        return coin() ? v : -v;
    }

    template <class T>
    const T& pick(const std::vector<T>& xs) {
        return xs[static_cast<size_t>(integer(0, static_cast<int>(xs.size()) - 1))];
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

}  // namespace medcalc::testing
