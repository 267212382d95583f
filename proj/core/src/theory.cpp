#include "sharpen/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sharpen/errors.hpp"

namespace sharpen {

namespace {

void check_beta(double beta, const char* where) {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw ParameterError(std::string(where) + ": beta must be finite and > 0");
    }
}

void check_finite(std::span<const double> values, const char* where) {
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw ParameterError(std::string(where) + ": non-finite advantage");
        }
    }
}

// pi_ref(o) exp(score(o)) normalized in log-space; zero-probability modes stay at zero.
TiltedPolicy tilt(const Distribution& pi_ref, std::span<const double> scores) {
    const double neg_inf = -std::numeric_limits<double>::infinity();
    std::vector<double> log_w(pi_ref.size());
    for (std::size_t i = 0; i < log_w.size(); ++i) {
        log_w[i] = pi_ref[i] > 0.0 ? std::log(pi_ref[i]) + scores[i] : neg_inf;
    }
    const double log_z = log_sum_exp(log_w);
    std::vector<double> p(log_w.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = std::isfinite(log_w[i]) ? std::exp(log_w[i] - log_z) : 0.0;
    }
    return {Distribution(std::move(p)), log_z};
}

}  // namespace

BatchCounts::BatchCounts(std::vector<std::size_t> counts, std::size_t group_size)
    : counts_(std::move(counts)), group_size_(group_size) {
    if (group_size_ == 0) {
        throw ParameterError("BatchCounts: group size must be >= 1");
    }
    const auto total = std::accumulate(counts_.begin(), counts_.end(), std::size_t{0});
    if (total != group_size_) {
        throw StructuralError("BatchCounts: counts do not sum to the group size");
    }
}

BatchCounts BatchCounts::from_samples(std::span<const std::size_t> samples,
                                      std::size_t num_modes) {
    std::vector<std::size_t> counts(num_modes, 0);
    for (std::size_t s : samples) {
        if (s >= num_modes) {
            throw StructuralError("BatchCounts: sample index out of range");
        }
        ++counts[s];
    }
    return BatchCounts(std::move(counts), samples.size());
}

double TiltedPolicy::partition() const { return std::exp(log_partition); }

TiltedPolicy optimal_policy(const Distribution& pi_ref, std::span<const double> advantages,
                            double beta) {
    check_beta(beta, "optimal_policy");
    check_finite(advantages, "optimal_policy");
    if (advantages.size() != pi_ref.size()) {
        throw StructuralError("optimal_policy: advantage length does not match modes");
    }
    std::vector<double> scores(advantages.begin(), advantages.end());
    for (auto& s : scores) {
        s /= beta;
    }
    return tilt(pi_ref, scores);
}

TiltedPolicy batch_optimal_policy(const Distribution& pi_ref, const BatchCounts& counts,
                                  std::span<const double> advantages, double beta) {
    std::vector<double> n(counts.size());
    for (std::size_t i = 0; i < n.size(); ++i) {
        n[i] = static_cast<double>(counts[i]);
    }
    return batch_optimal_policy(pi_ref, n, static_cast<double>(counts.group_size()), advantages,
                                beta);
}

TiltedPolicy batch_optimal_policy(const Distribution& pi_ref, std::span<const double> counts,
                                  double group_size, std::span<const double> advantages,
                                  double beta) {
    check_beta(beta, "batch_optimal_policy");
    check_finite(advantages, "batch_optimal_policy");
    if (counts.size() != pi_ref.size() || advantages.size() != pi_ref.size()) {
        throw StructuralError("batch_optimal_policy: counts/advantages do not match modes");
    }
    if (!(group_size > 0.0)) {
        throw ParameterError("batch_optimal_policy: group size must be positive");
    }
    std::vector<double> scores(pi_ref.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        // N_i = 0 gives an exact zero exponent regardless of the advantage placeholder.
        scores[i] = counts[i] == 0.0 ? 0.0 : counts[i] * advantages[i] / (beta * group_size);
    }
    return tilt(pi_ref, scores);
}

BinaryStats BinaryStats::from_accuracy(double p_plus) {
    if (!(p_plus >= 0.0 && p_plus <= 1.0)) {
        throw ParameterError("BinaryStats: accuracy outside [0, 1]");
    }
    return {p_plus, std::sqrt(p_plus * (1.0 - p_plus))};
}

ZPrimeReport z_prime_report(const Distribution& pi_ref, const BatchCounts& counts,
                            const ModeSpace& modes, std::span<const double> advantages,
                            double beta, std::optional<BinaryStats> binary_stats) {
    if (modes.size() != pi_ref.size() || counts.size() != pi_ref.size()) {
        throw StructuralError("z_prime_report: mode space, counts and pi_ref disagree");
    }
    const auto hat = batch_optimal_policy(pi_ref, counts, advantages, beta);
    const double g = static_cast<double>(counts.group_size());

    double weighted = 0.0;
    for (std::size_t i = 0; i < pi_ref.size(); ++i) {
        if (counts[i] > 0) {
            weighted += static_cast<double>(counts[i]) * advantages[i] * pi_ref[i];
        }
    }

    ZPrimeReport report{};
    report.z_prime = hat.partition();
    report.general_lower_bound = 1.0 + weighted / (beta * g);
    report.suppresses_unsampled = report.z_prime > 1.0;

    if (binary_stats) {
        const double p = binary_stats->p_plus;
        const double sigma = binary_stats->sigma;
        if (sigma > 0.0) {
            const double a_plus = (1.0 - p) / sigma;
            const double a_minus = -p / sigma;
            double min_pos = std::numeric_limits<double>::infinity();
            double max_neg = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < pi_ref.size(); ++i) {
                if (counts[i] == 0) {
                    continue;
                }
                const double expected = modes.is_correct(i) ? a_plus : a_minus;
                if (std::abs(advantages[i] - expected) > 1e-9 * std::max(1.0, std::abs(expected))) {
                    throw ParameterError(
                        "z_prime_report: advantages are not the normalized binary pair for p+");
                }
                if (modes.is_correct(i)) {
                    min_pos = std::min(min_pos, pi_ref[i]);
                } else {
                    max_neg = std::max(max_neg, pi_ref[i]);
                }
            }
            if (std::isfinite(min_pos) && std::isfinite(max_neg)) {
                const double gap = min_pos - max_neg;
                report.delta_pi = gap;
                report.binary_lower_bound = 1.0 + p * (1.0 - p) * gap / (beta * sigma);
            }
        }
    }
    return report;
}

Distribution geometric_interpolation(const Distribution& pi_t, const Distribution& pi_hat,
                                     double eta_beta) {
    if (pi_t.size() != pi_hat.size()) {
        throw StructuralError("geometric_interpolation: dimension mismatch");
    }
    if (!(eta_beta >= 0.0 && eta_beta <= 1.0)) {
        throw ParameterError("geometric_interpolation: eta_beta must lie in [0, 1]");
    }
    if (!pi_t.strictly_positive() || !pi_hat.strictly_positive()) {
        throw DomainError("geometric_interpolation: geometric mean undefined for zero entries");
    }
    if (eta_beta == 0.0) {
        return pi_t;
    }
    if (eta_beta == 1.0) {
        return pi_hat;
    }
    std::vector<double> log_w(pi_t.size());
    for (std::size_t i = 0; i < log_w.size(); ++i) {
        log_w[i] = (1.0 - eta_beta) * std::log(pi_t[i]) + eta_beta * std::log(pi_hat[i]);
    }
    return Distribution::from_log_weights(log_w);
}

double kl_divergence(const Distribution& p, const Distribution& q) {
    if (p.size() != q.size()) {
        throw StructuralError("kl_divergence: dimension mismatch");
    }
    double kl = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) {
            continue;
        }
        if (q[i] == 0.0) {
            throw DomainError("kl_divergence: reference has zero mass where policy is positive");
        }
        kl += p[i] * (std::log(p[i]) - std::log(q[i]));
    }
    return kl;
}

double empirical_objective(const Distribution& pi, const Distribution& pi_ref,
                           const BatchCounts& counts, std::span<const double> advantages,
                           double beta) {
    std::vector<double> n(counts.size());
    for (std::size_t i = 0; i < n.size(); ++i) {
        n[i] = static_cast<double>(counts[i]);
    }
    return empirical_objective(pi, pi_ref, n, static_cast<double>(counts.group_size()),
                               advantages, beta);
}

double empirical_objective(const Distribution& pi, const Distribution& pi_ref,
                           std::span<const double> counts, double group_size,
                           std::span<const double> advantages, double beta) {
    check_beta(beta, "empirical_objective");
    if (pi.size() != pi_ref.size() || counts.size() != pi.size() ||
        advantages.size() != pi.size()) {
        throw StructuralError("empirical_objective: dimension mismatch");
    }
    for (std::size_t i = 0; i < pi.size(); ++i) {
        if (pi[i] <= 0.0 && (counts[i] > 0.0 || pi_ref[i] > 0.0)) {
            throw DomainError("empirical_objective: policy has zero mass on a required mode");
        }
    }
    double value = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i) {
        if (counts[i] != 0.0) {
            value += counts[i] / group_size * advantages[i] * pi[i];
        }
    }
    return value - beta * kl_divergence(pi, pi_ref);
}

std::vector<double> empirical_objective_gradient(const Distribution& pi, const Distribution& pi_ref,
                                                 const BatchCounts& counts,
                                                 std::span<const double> advantages, double beta) {
    check_beta(beta, "empirical_objective_gradient");
    if (pi.size() != pi_ref.size() || counts.size() != pi.size() ||
        advantages.size() != pi.size()) {
        throw StructuralError("empirical_objective_gradient: dimension mismatch");
    }
    const double g = static_cast<double>(counts.group_size());
    std::vector<double> grad(pi.size());
    for (std::size_t i = 0; i < pi.size(); ++i) {
        if (pi[i] <= 0.0 || pi_ref[i] <= 0.0) {
            throw DomainError("empirical_objective_gradient: log of zero probability");
        }
        const double linear =
            counts[i] == 0 ? 0.0 : static_cast<double>(counts[i]) * advantages[i] / g;
        grad[i] = linear - beta * (std::log(pi[i] / pi_ref[i]) + 1.0);
    }
    return grad;
}

}  // namespace sharpen
