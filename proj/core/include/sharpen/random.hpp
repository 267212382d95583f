#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace sharpen {

/// Seeded random stream with platform-independent draws.
///
/// std::mt19937_64 is bit-specified by the standard, but the standard
/// distributions are not, so every derived draw here is computed by hand
/// from the raw 64-bit output.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi] (inclusive); rejection sampling avoids modulo bias.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    /// Exponential(1) variate via inversion.
    double exponential();

    /// Flat Dirichlet draw on the (n-1)-simplex, strictly positive entries.
    std::vector<double> simplex(std::size_t n);

private:
    std::mt19937_64 engine_;
};

}  // namespace sharpen
