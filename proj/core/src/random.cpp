#include "sharpen/random.hpp"

#include <cmath>
#include <limits>

#include "sharpen/errors.hpp"

namespace sharpen {

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
    if (hi < lo) {
        throw ParameterError("uniform_int: empty range");
    }
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) {  // full 64-bit range
        return static_cast<std::int64_t>(engine_());
    }
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t x = engine_();
    while (x >= limit) {
        x = engine_();
    }
    return lo + static_cast<std::int64_t>(x % span);
}

double Rng::exponential() { return -std::log1p(-uniform()); }

std::vector<double> Rng::simplex(std::size_t n) {
    std::vector<double> out(n);
    double total = 0.0;
    for (auto& x : out) {
        // Floor keeps every entry strictly positive.
        x = exponential() + 1e-12;
        total += x;
    }
    for (auto& x : out) {
        x /= total;
    }
    return out;
}

}  // namespace sharpen
