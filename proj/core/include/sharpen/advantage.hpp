#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sharpen/theory.hpp"

namespace sharpen {

/// One group of G sampled modes for a single query with binary verifiable rewards.
class RolloutBatch {
public:
    RolloutBatch(std::string query, std::vector<std::size_t> samples, std::vector<double> rewards,
                 std::size_t num_modes);

    const std::string& query() const noexcept { return query_; }
    std::size_t group_size() const noexcept { return samples_.size(); }
    std::span<const std::size_t> samples() const noexcept { return samples_; }
    std::span<const double> rewards() const noexcept { return rewards_; }
    const BatchCounts& counts() const noexcept { return counts_; }

    /// Sample indices s with reward 1 (S+) and reward 0 (S-).
    const std::vector<std::size_t>& success_set() const noexcept { return success_; }
    const std::vector<std::size_t>& failure_set() const noexcept { return failure_; }

    double p_plus() const noexcept { return p_plus_; }
    /// Population standard deviation sqrt(p+(1 - p+)).
    double sigma() const noexcept { return sigma_; }

private:
    std::string query_;
    std::vector<std::size_t> samples_;
    std::vector<double> rewards_;
    BatchCounts counts_;
    std::vector<std::size_t> success_;
    std::vector<std::size_t> failure_;
    double p_plus_;
    double sigma_;
};

enum class Estimator { Raw, MeanShifted, Normalized, RLOO, ReinforcePP };

std::string_view to_string(Estimator e);
Estimator parse_estimator(std::string_view name);

struct AdvantageVector {
    std::vector<double> values;
    Estimator estimator;
    /// Set when a normalizing std was zero and the vector was zeroed.
    bool degenerate = false;

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }

    /// Per-mode advantages for sampled modes (zero elsewhere). All samples of a
    /// mode share a reward, hence an advantage, for every estimator here.
    std::vector<double> per_mode(const RolloutBatch& batch, std::size_t num_modes) const;
};

/// Reward mean and population std aggregated over every group of a training step.
struct GlobalRewardStats {
    double mean;
    double std;

    static GlobalRewardStats from_batches(std::span<const RolloutBatch> batches);
};

/// Raw: r. MeanShifted: r - mean. Normalized: (r - mean)/std. RLOO: r_s - mean(r_{-s}).
/// ReinforcePP: (r - global mean)/global std, which requires global_stats.
AdvantageVector estimate_advantages(const RolloutBatch& batch, Estimator estimator,
                                    std::optional<GlobalRewardStats> global_stats = std::nullopt);

/// (G - |S+|)^alpha.
double iac_scale(std::size_t group_size, std::size_t num_success, double alpha);

/// Scales positive entries by iac_scale; zero and negative entries pass through untouched.
AdvantageVector iac_calibrate(const AdvantageVector& adv, const RolloutBatch& batch, double alpha);

}  // namespace sharpen
