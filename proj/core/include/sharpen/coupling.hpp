#pragma once

// Linearized (kernel) view of a single batch update and how it leaks to a
// second query through shared parameters.

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "sharpen/advantage.hpp"
#include "sharpen/policy.hpp"

namespace sharpen {

/// Diagonal bounds (lambda), off-diagonal bounds (rho) of a batch kernel, plus transfer decay.
struct KernelEnvelope {
    double lambda_min;
    double lambda_max;
    double rho_min;
    double rho_max;
    double transfer_decay;

    /// rho_min <= rho_max < lambda_min <= lambda_max.
    bool diagonally_dominant() const noexcept;
    bool uniform(double tol = 1e-9) const noexcept;

    /// Extremes of the diagonal and off-diagonal entries of a square kernel.
    static KernelEnvelope from_kernel(const Eigen::MatrixXd& kernel, double transfer_decay);
};

/// Target logit shifts y_s = N_s |A_s| / (beta G) and their sum.
struct TargetShiftVector {
    std::vector<double> values;
    double total;

    explicit TargetShiftVector(std::vector<double> values);

    static TargetShiftVector from_batch(const RolloutBatch& batch, const AdvantageVector& adv,
                                        double beta);
};

struct BatchKernel {
    Eigen::MatrixXd jacobian;  // G x P, row s = grad_theta f(q, o_s)
    Eigen::MatrixXd kernel;    // J J^T
};

BatchKernel batch_kernel(const LinearSoftmaxPolicy& policy, const QueryEmbedding& query,
                         std::span<const std::size_t> samples);

/// Kernel vector k_s = grad f(q', o')^T grad f(q, o_s).
Eigen::VectorXd cross_kernel(const LinearSoftmaxPolicy& policy, const QueryEmbedding& target_query,
                             std::size_t target_mode, const QueryEmbedding& source_query,
                             std::span<const std::size_t> samples);

/// M(lambda, rho) = (lambda - rho) I + rho 1 1^T.
Eigen::MatrixXd structured_kernel(std::size_t g, double lambda, double rho);

/// k'^T (K + jitter I)^{-1} y. With jitter = 0 a near-singular K falls back to
/// 1e-8 * trace / G; NumericalError if still singular.
double exact_logit_shift(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& k_prime,
                         const TargetShiftVector& y, double jitter = 0.0);

struct UnseenMode {};
struct SeenMode {
    std::size_t index;  // batch position k of one occurrence of the mode
    std::size_t count;  // N_{o'}
};
using ShiftCase = std::variant<UnseenMode, SeenMode>;

/// Upper bound on the shift of a batch-unseen mode, or lower bound for a seen one.
double logit_shift_bound(const KernelEnvelope& env, const TargetShiftVector& y,
                         std::size_t group_size, const ShiftCase& shift_case);

struct SuppressionRatio {
    double general;
    std::optional<double> simplified;
};

/// Ratio of the seen-mode lower bound to the unseen-mode upper bound. The
/// closed form N[(y_k / A_sum)(lambda / rho + G - 1) - 1] is added when the
/// envelope is uniform.
SuppressionRatio suppression_ratio(const KernelEnvelope& env, const TargetShiftVector& y,
                                   std::size_t group_size, std::size_t k, std::size_t count);

struct AlignmentReport {
    std::vector<double> cross_products;  // grad f(q', o'_i)^T grad f(q, o_j) for all pairs
    double cross_min;
    double cross_mean;
    KernelEnvelope envelope;             // from the within-query kernel at q, eta = eta_hat
    double eta_hat;                      // least-squares fit of cross ~ eta * within
    bool assumption1_holds;              // every cross product >= 0
    bool assumption3_holds;              // envelope diagonally dominant
};

/// Measures gradient alignment between a source query (with its batch modes)
/// and a target query, over the same mode list.
AlignmentReport alignment_stats(const LinearSoftmaxPolicy& policy, const QueryEmbedding& source,
                                const QueryEmbedding& target,
                                std::span<const std::size_t> modes);

}  // namespace sharpen
