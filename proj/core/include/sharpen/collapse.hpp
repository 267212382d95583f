#pragma once

#include <cstddef>
#include <optional>
#include <span>

namespace sharpen {

inline constexpr double kCollapseThreshold = 0.99;
inline constexpr std::size_t kCollapseWindow = 50;

/// First index t with series[u] >= threshold for every u in [t, t + window).
/// A window running past the end only needs the condition through the end.
std::optional<std::size_t> detect_collapse(std::span<const double> series,
                                           double threshold = kCollapseThreshold,
                                           std::size_t window = kCollapseWindow);

}  // namespace sharpen
