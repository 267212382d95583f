#include "sharpen/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sharpen/errors.hpp"

namespace sharpen {

bool KernelEnvelope::diagonally_dominant() const noexcept {
    return rho_min <= rho_max && rho_max < lambda_min && lambda_min <= lambda_max;
}

bool KernelEnvelope::uniform(double tol) const noexcept {
    return std::abs(lambda_max - lambda_min) <= tol && std::abs(rho_max - rho_min) <= tol;
}

KernelEnvelope KernelEnvelope::from_kernel(const Eigen::MatrixXd& kernel, double transfer_decay) {
    if (kernel.rows() == 0 || kernel.rows() != kernel.cols()) {
        throw StructuralError("kernel must be square and non-empty");
    }
    const double inf = std::numeric_limits<double>::infinity();
    KernelEnvelope env{inf, -inf, inf, -inf, transfer_decay};
    for (Eigen::Index i = 0; i < kernel.rows(); ++i) {
        for (Eigen::Index j = 0; j < kernel.cols(); ++j) {
            const double v = kernel(i, j);
            if (i == j) {
                env.lambda_min = std::min(env.lambda_min, v);
                env.lambda_max = std::max(env.lambda_max, v);
            } else {
                env.rho_min = std::min(env.rho_min, v);
                env.rho_max = std::max(env.rho_max, v);
            }
        }
    }
    if (kernel.rows() == 1) {
        env.rho_min = env.rho_max = 0.0;
    }
    return env;
}

TargetShiftVector::TargetShiftVector(std::vector<double> v) : values(std::move(v)), total(0.0) {
    for (double x : values) {
        if (!std::isfinite(x) || x < 0.0) {
            throw ParameterError("target shifts must be finite and non-negative");
        }
        total += x;
    }
}

TargetShiftVector TargetShiftVector::from_batch(const RolloutBatch& batch,
                                                const AdvantageVector& adv, double beta) {
    if (!(beta > 0.0)) {
        throw ParameterError("beta must be positive");
    }
    if (adv.size() != batch.group_size()) {
        throw StructuralError("advantage length does not match the group size");
    }
    const double g = static_cast<double>(batch.group_size());
    const auto samples = batch.samples();
    std::vector<double> y(samples.size());
    for (std::size_t s = 0; s < samples.size(); ++s) {
        y[s] = static_cast<double>(batch.counts()[samples[s]]) * std::abs(adv[s]) / (beta * g);
    }
    return TargetShiftVector(std::move(y));
}

BatchKernel batch_kernel(const LinearSoftmaxPolicy& policy, const QueryEmbedding& query,
                         std::span<const std::size_t> samples) {
    if (samples.empty()) {
        throw StructuralError("batch_kernel: empty batch");
    }
    const auto g = static_cast<Eigen::Index>(samples.size());
    const auto p = static_cast<Eigen::Index>(policy.parameter_count());
    BatchKernel out{Eigen::MatrixXd(g, p), Eigen::MatrixXd()};
    for (Eigen::Index s = 0; s < g; ++s) {
        const auto row = policy.logit_gradient(query, samples[static_cast<std::size_t>(s)]);
        out.jacobian.row(s) = Eigen::Map<const Eigen::RowVectorXd>(row.data(), p);
    }
    out.kernel = out.jacobian * out.jacobian.transpose();
    return out;
}

Eigen::VectorXd cross_kernel(const LinearSoftmaxPolicy& policy, const QueryEmbedding& target_query,
                             std::size_t target_mode, const QueryEmbedding& source_query,
                             std::span<const std::size_t> samples) {
    const auto bk = batch_kernel(policy, source_query, samples);
    const auto t = policy.logit_gradient(target_query, target_mode);
    const Eigen::Map<const Eigen::VectorXd> tv(t.data(), static_cast<Eigen::Index>(t.size()));
    return bk.jacobian * tv;
}

Eigen::MatrixXd structured_kernel(std::size_t g, double lambda, double rho) {
    const auto n = static_cast<Eigen::Index>(g);
    Eigen::MatrixXd m = Eigen::MatrixXd::Constant(n, n, rho);
    m.diagonal().setConstant(lambda);
    return m;
}

double exact_logit_shift(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& k_prime,
                         const TargetShiftVector& y, double jitter) {
    const auto g = kernel.rows();
    if (g == 0 || kernel.cols() != g || k_prime.size() != g ||
        static_cast<Eigen::Index>(y.values.size()) != g) {
        throw StructuralError("exact_logit_shift: dimension mismatch");
    }
    if (!(jitter >= 0.0)) {
        throw ParameterError("jitter must be >= 0");
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(kernel, Eigen::EigenvaluesOnly);
    const double ev_max = eig.eigenvalues().cwiseAbs().maxCoeff();
    const double ev_min = eig.eigenvalues().minCoeff();
    constexpr double kRelTol = 1e-12;
    if (jitter == 0.0 && !(ev_min > kRelTol * ev_max)) {
        jitter = 1e-8 * kernel.trace() / static_cast<double>(g);
    }
    if (!(ev_min + jitter > kRelTol * ev_max) || !(ev_max > 0.0)) {
        std::ostringstream msg;
        msg << "exact_logit_shift: kernel singular (eigenvalues in [" << ev_min << ", " << ev_max
            << "], jitter " << jitter << ")";
        throw NumericalError(msg.str());
    }
    Eigen::MatrixXd reg = kernel;
    reg.diagonal().array() += jitter;
    const Eigen::Map<const Eigen::VectorXd> yv(y.values.data(), g);
    const Eigen::VectorXd alpha = reg.ldlt().solve(yv);
    return k_prime.dot(alpha);
}

double logit_shift_bound(const KernelEnvelope& env, const TargetShiftVector& y,
                         std::size_t group_size, const ShiftCase& shift_case) {
    if (!env.diagonally_dominant()) {
        throw DomainError("kernel envelope violates rho_min <= rho_max < lambda_min <= lambda_max");
    }
    if (group_size == 0 || y.values.size() != group_size) {
        throw StructuralError("target shift length does not match the group size");
    }
    const double g1 = static_cast<double>(group_size) - 1.0;
    if (std::holds_alternative<UnseenMode>(shift_case)) {
        return env.transfer_decay * env.rho_max * y.total / (env.lambda_min + g1 * env.rho_min);
    }
    const auto& seen = std::get<SeenMode>(shift_case);
    if (seen.index >= group_size || seen.count == 0) {
        throw ParameterError("seen mode needs a valid batch index and a count >= 1");
    }
    const double ratio = (env.lambda_min - env.rho_min) / (env.lambda_max - env.rho_max);
    const double margin =
        y.values[seen.index] - env.rho_max * y.total / (env.lambda_max + g1 * env.rho_max);
    return env.transfer_decay * static_cast<double>(seen.count) * ratio * margin;
}

SuppressionRatio suppression_ratio(const KernelEnvelope& env, const TargetShiftVector& y,
                                   std::size_t group_size, std::size_t k, std::size_t count) {
    if (!(y.total > 0.0)) {
        throw DomainError("suppression ratio undefined for zero total target shift");
    }
    const double unseen = logit_shift_bound(env, y, group_size, UnseenMode{});
    if (!(unseen > 0.0)) {
        throw DomainError("suppression ratio undefined: unseen-mode bound is zero");
    }
    SuppressionRatio out{logit_shift_bound(env, y, group_size, SeenMode{k, count}) / unseen, std::nullopt};
    if (env.uniform()) {
        const double lr = env.lambda_max / env.rho_max;
        out.simplified = static_cast<double>(count) *
                         ((y.values[k] / y.total) * (lr + static_cast<double>(group_size) - 1.0) -
                          1.0);
    }
    return out;
}

AlignmentReport alignment_stats(const LinearSoftmaxPolicy& policy, const QueryEmbedding& source,
                                const QueryEmbedding& target, std::span<const std::size_t> modes) {
    if (modes.size() < 2) {
        throw StructuralError("alignment_stats needs at least two modes");
    }
    const auto src = batch_kernel(policy, source, modes);
    const auto tgt = batch_kernel(policy, target, modes);
    const Eigen::MatrixXd cross = tgt.jacobian * src.jacobian.transpose();
    const Eigen::MatrixXd& within = src.kernel;

    AlignmentReport r;
    r.cross_products.assign(cross.data(), cross.data() + cross.size());
    r.cross_min = cross.minCoeff();
    r.cross_mean = cross.mean();
    const double denom = within.squaredNorm();
    r.eta_hat = denom > 0.0 ? cross.cwiseProduct(within).sum() / denom : 0.0;
    r.envelope = KernelEnvelope::from_kernel(within, r.eta_hat);
    r.assumption1_holds = r.cross_min >= 0.0;
    r.assumption3_holds = r.envelope.diagonally_dominant();
    return r;
}

}  // namespace sharpen
