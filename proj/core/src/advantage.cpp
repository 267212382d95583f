#include "sharpen/advantage.hpp"

#include <cmath>
#include <numeric>

#include "sharpen/errors.hpp"

namespace sharpen {

namespace {

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double population_std(std::span<const double> v, double mean) {
    double ss = 0.0;
    for (double x : v) {
        ss += (x - mean) * (x - mean);
    }
    return std::sqrt(ss / static_cast<double>(v.size()));
}

}  // namespace

RolloutBatch::RolloutBatch(std::string query, std::vector<std::size_t> samples,
                           std::vector<double> rewards, std::size_t num_modes)
    : query_(std::move(query)),
      samples_(std::move(samples)),
      rewards_(std::move(rewards)),
      counts_(BatchCounts::from_samples(samples_, num_modes)) {
    if (samples_.size() != rewards_.size()) {
        throw StructuralError("RolloutBatch: samples and rewards differ in length");
    }
    for (std::size_t s = 0; s < rewards_.size(); ++s) {
        if (rewards_[s] == 1.0) {
            success_.push_back(s);
        } else if (rewards_[s] == 0.0) {
            failure_.push_back(s);
        } else {
            throw ParameterError("RolloutBatch: rewards must be binary (0 or 1)");
        }
    }
    p_plus_ = static_cast<double>(success_.size()) / static_cast<double>(samples_.size());
    sigma_ = std::sqrt(p_plus_ * (1.0 - p_plus_));
}

std::string_view to_string(Estimator e) {
    switch (e) {
        case Estimator::Raw: return "raw";
        case Estimator::MeanShifted: return "mean_shifted";
        case Estimator::Normalized: return "normalized";
        case Estimator::RLOO: return "rloo";
        case Estimator::ReinforcePP: return "reinforce_pp";
    }
    return "unknown";
}

Estimator parse_estimator(std::string_view name) {
    if (name == "raw") return Estimator::Raw;
    if (name == "mean_shifted") return Estimator::MeanShifted;
    if (name == "normalized") return Estimator::Normalized;
    if (name == "rloo") return Estimator::RLOO;
    if (name == "reinforce_pp") return Estimator::ReinforcePP;
    throw ConfigError("unknown estimator '" + std::string(name) + "'");
}

std::vector<double> AdvantageVector::per_mode(const RolloutBatch& batch,
                                              std::size_t num_modes) const {
    if (values.size() != batch.group_size()) {
        throw StructuralError("AdvantageVector: length does not match the group size");
    }
    std::vector<double> out(num_modes, 0.0);
    const auto samples = batch.samples();
    for (std::size_t s = 0; s < samples.size(); ++s) {
        out.at(samples[s]) = values[s];
    }
    return out;
}

GlobalRewardStats GlobalRewardStats::from_batches(std::span<const RolloutBatch> batches) {
    std::vector<double> all;
    for (const auto& b : batches) {
        all.insert(all.end(), b.rewards().begin(), b.rewards().end());
    }
    if (all.empty()) {
        throw StructuralError("GlobalRewardStats: no rewards");
    }
    const double m = mean_of(all);
    return {m, population_std(all, m)};
}

AdvantageVector estimate_advantages(const RolloutBatch& batch, Estimator estimator,
                                    std::optional<GlobalRewardStats> global_stats) {
    const auto r = batch.rewards();
    const std::size_t g = r.size();
    AdvantageVector out{std::vector<double>(g, 0.0), estimator, false};

    switch (estimator) {
        case Estimator::Raw:
            out.values.assign(r.begin(), r.end());
            break;
        case Estimator::MeanShifted: {
            const double m = mean_of(r);
            for (std::size_t s = 0; s < g; ++s) out.values[s] = r[s] - m;
            break;
        }
        case Estimator::Normalized: {
            const double m = mean_of(r);
            const double sd = population_std(r, m);
            if (sd == 0.0) {
                out.degenerate = true;
                break;
            }
            for (std::size_t s = 0; s < g; ++s) out.values[s] = (r[s] - m) / sd;
            break;
        }
        case Estimator::RLOO: {
            if (g < 2) {
                throw ParameterError("RLOO requires a group size of at least 2");
            }
            const double total = std::accumulate(r.begin(), r.end(), 0.0);
            for (std::size_t s = 0; s < g; ++s) {
                out.values[s] = r[s] - (total - r[s]) / static_cast<double>(g - 1);
            }
            break;
        }
        case Estimator::ReinforcePP: {
            if (!global_stats) {
                throw ParameterError("ReinforcePP requires global reward statistics");
            }
            if (global_stats->std == 0.0) {
                out.degenerate = true;
                break;
            }
            for (std::size_t s = 0; s < g; ++s) {
                out.values[s] = (r[s] - global_stats->mean) / global_stats->std;
            }
            break;
        }
    }
    return out;
}

double iac_scale(std::size_t group_size, std::size_t num_success, double alpha) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw ParameterError("iac: alpha must be finite and >= 0");
    }
    if (num_success > group_size) {
        throw StructuralError("iac: more successes than samples");
    }
    return std::pow(static_cast<double>(group_size - num_success), alpha);
}

AdvantageVector iac_calibrate(const AdvantageVector& adv, const RolloutBatch& batch,
                              double alpha) {
    if (adv.size() != batch.group_size()) {
        throw StructuralError("iac_calibrate: advantage length does not match the group size");
    }
    const double scale = iac_scale(batch.group_size(), batch.success_set().size(), alpha);
    AdvantageVector out = adv;
    for (auto& a : out.values) {
        if (a > 0.0) {
            a *= scale;
        }
    }
    return out;
}

}  // namespace sharpen
