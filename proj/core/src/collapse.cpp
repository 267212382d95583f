#include "sharpen/collapse.hpp"

#include <algorithm>

namespace sharpen {

std::optional<std::size_t> detect_collapse(std::span<const double> series, double threshold,
                                           std::size_t window) {
    // Scan backwards tracking the length of the run of above-threshold values
    // starting at each index.
    std::optional<std::size_t> first;
    std::size_t run = 0;
    for (std::size_t i = series.size(); i-- > 0;) {
        run = series[i] >= threshold ? run + 1 : 0;
        const std::size_t needed = std::min(window, series.size() - i);
        if (run >= needed && needed > 0) {
            first = i;
        }
    }
    return first;
}

}  // namespace sharpen
