#pragma once

// Closed-form KL-regularized policies, the batch partition function and its
// lower bounds, and the geometric-interpolation view of a single update.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sharpen/mode_space.hpp"

namespace sharpen {

/// Per-mode sample counts N_i of one group of size G.
class BatchCounts {
public:
    BatchCounts(std::vector<std::size_t> counts, std::size_t group_size);

    static BatchCounts from_samples(std::span<const std::size_t> samples, std::size_t num_modes);

    std::size_t group_size() const noexcept { return group_size_; }
    std::size_t size() const noexcept { return counts_.size(); }
    std::size_t operator[](std::size_t i) const { return counts_[i]; }
    std::span<const std::size_t> counts() const noexcept { return counts_; }

private:
    std::vector<std::size_t> counts_;
    std::size_t group_size_;
};

/// A reference policy tilted by exp(score / beta), with its log partition function.
struct TiltedPolicy {
    Distribution policy;
    double log_partition;

    double partition() const;
};

/// pi*(o) proportional to pi_ref(o) exp(A(o) / beta).
TiltedPolicy optimal_policy(const Distribution& pi_ref, std::span<const double> advantages,
                            double beta);

/// pi_hat(o_i) proportional to pi_ref(o_i) exp(N_i A_i / (beta G)); log_partition is log Z'.
TiltedPolicy batch_optimal_policy(const Distribution& pi_ref, const BatchCounts& counts,
                                  std::span<const double> advantages, double beta);

/// Same tilt with real-valued (expected) counts N_i summing to group_size.
TiltedPolicy batch_optimal_policy(const Distribution& pi_ref, std::span<const double> counts,
                                  double group_size, std::span<const double> advantages,
                                  double beta);

/// Batch accuracy p+ and population standard deviation sigma of binary rewards.
struct BinaryStats {
    double p_plus;
    double sigma;

    static BinaryStats from_accuracy(double p_plus);
};

struct ZPrimeReport {
    double z_prime;
    double general_lower_bound;
    std::optional<double> binary_lower_bound;
    std::optional<double> delta_pi;
    bool suppresses_unsampled;
};

/// Exact Z' and its lower bounds.
///
/// The general bound is 1 + (1/(beta G)) sum_i N_i A_i pi_ref(o_i), which for
/// shared advantages is A+ sum_{S+} N_i pi_ref - |A-| sum_{S-} N_j pi_ref.
/// With binary_stats the advantages must be the normalized binary pair
/// A+ = (1 - p+)/sigma, A- = -p+/sigma on sampled modes, and the report adds
/// delta_pi = min_{S+} pi_ref - max_{S-} pi_ref and 1 + p+(1 - p+) delta_pi / (beta sigma).
/// A degenerate sigma = 0 batch leaves the binary bound absent.
ZPrimeReport z_prime_report(const Distribution& pi_ref, const BatchCounts& counts,
                            const ModeSpace& modes, std::span<const double> advantages,
                            double beta, std::optional<BinaryStats> binary_stats = std::nullopt);

/// normalize(pi_t^(1 - eta_beta) * pi_hat^eta_beta), computed in log-space.
Distribution geometric_interpolation(const Distribution& pi_t, const Distribution& pi_hat,
                                     double eta_beta);

/// Batch surrogate sum_i (N_i / G) A_i pi(o_i) - beta KL(pi || pi_ref).
///
/// This is the objective whose unique maximizer over the simplex is
/// batch_optimal_policy; its policy gradient at the sampling policy coincides
/// with the sampled estimator (1/G) sum_s A_s grad log pi(o_s).
double empirical_objective(const Distribution& pi, const Distribution& pi_ref,
                           const BatchCounts& counts, std::span<const double> advantages,
                           double beta);

/// Same objective with real-valued (expected) counts N_i summing to group_size.
double empirical_objective(const Distribution& pi, const Distribution& pi_ref,
                           std::span<const double> counts, double group_size,
                           std::span<const double> advantages, double beta);

/// Partial derivatives of the surrogate with respect to each pi(o_i), treated as free coordinates.
std::vector<double> empirical_objective_gradient(const Distribution& pi, const Distribution& pi_ref,
                                                 const BatchCounts& counts,
                                                 std::span<const double> advantages, double beta);

/// KL(p || q) in nats. Throws DomainError when q(o) = 0 < p(o).
double kl_divergence(const Distribution& p, const Distribution& q);

}  // namespace sharpen
