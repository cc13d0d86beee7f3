#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace rtd {

/// Seeded generator whose output is identical on every platform: the engine
/// is std::mt19937_64 (fully specified by the standard) and all derived
/// distributions are implemented here instead of using the
/// implementation-defined std:: distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, bound) by rejection, bound > 0.
    std::uint64_t below(std::uint64_t bound);

    /// Standard normal via the Box-Muller transform (second value cached).
    double normal();
    double normal(double mean, double sigma) { return mean + sigma * normal(); }

    /// Fisher-Yates shuffle of 0..n-1.
    std::vector<int> permutation(int n);

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace rtd
