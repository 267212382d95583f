#pragma once

// Parameterized softmax policies and the sampled policy-gradient estimator.
// All gradients here use ascent orientation: the training objective is maximized.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sharpen/advantage.hpp"
#include "sharpen/mode_space.hpp"
#include "sharpen/random.hpp"

namespace sharpen {

struct PolicyOutput {
    std::vector<double> logits;
    Distribution dist;
};

/// Reference-policy penalty beta * KL(pi || pi_ref).
struct KlPenalty {
    double beta;
    Distribution pi_ref;
};

/// pi(o | q) = softmax(W e_q)_o with W of shape (num_modes x dim), stored row-major.
class LinearSoftmaxPolicy {
public:
    LinearSoftmaxPolicy(std::size_t num_modes, std::size_t dim);
    LinearSoftmaxPolicy(std::size_t num_modes, std::size_t dim, std::vector<double> weights);

    std::size_t num_modes() const noexcept { return num_modes_; }
    std::size_t dim() const noexcept { return dim_; }
    std::size_t parameter_count() const noexcept { return weights_.size(); }

    double weight(std::size_t mode, std::size_t j) const { return weights_[mode * dim_ + j]; }
    std::span<double> parameters() noexcept { return weights_; }
    std::span<const double> parameters() const noexcept { return weights_; }

    std::vector<double> logits(const QueryEmbedding& query) const;
    PolicyOutput forward(const QueryEmbedding& query) const;

    /// Chain rule from a logit-space gradient g to parameters: dW[o][j] = g_o e_q[j].
    std::vector<double> parameter_gradient(const QueryEmbedding& query,
                                           std::span<const double> logit_grad) const;

    /// Flattened grad_theta f(q, o).
    std::vector<double> logit_gradient(const QueryEmbedding& query, std::size_t mode) const;

private:
    void check_query(const QueryEmbedding& query) const;

    std::size_t num_modes_;
    std::size_t dim_;
    std::vector<double> weights_;
};

/// Free logits per (query, mode); queries share no parameters.
class TabularPolicy {
public:
    TabularPolicy(std::size_t num_queries, std::size_t num_modes);

    std::size_t num_queries() const noexcept { return num_queries_; }
    std::size_t num_modes() const noexcept { return num_modes_; }
    std::size_t parameter_count() const noexcept { return logits_.size(); }

    std::span<double> parameters() noexcept { return logits_; }
    std::span<const double> parameters() const noexcept { return logits_; }

    std::vector<double> logits(std::size_t query) const;
    void set_logits(std::size_t query, std::span<const double> logits);
    PolicyOutput forward(std::size_t query) const;

    std::vector<double> parameter_gradient(std::size_t query,
                                           std::span<const double> logit_grad) const;

private:
    void check_query(std::size_t query) const;

    std::size_t num_queries_;
    std::size_t num_modes_;
    std::vector<double> logits_;
};

/// G independent categorical draws by inverse CDF over the canonical mode ordering.
std::vector<std::size_t> sample_group(const Distribution& dist, std::size_t group_size, Rng& rng);

/// (1/G) sum_s A_s log pi(o_s) - beta KL(pi || pi_ref).
double pg_objective(const Distribution& pi, const RolloutBatch& batch, const AdvantageVector& adv,
                    const std::optional<KlPenalty>& kl = std::nullopt);

/// Logit-space gradient of pg_objective: (1/G) sum_s A_s (onehot(o_s) - pi) - beta dKL/dlogits.
std::vector<double> pg_logit_gradient(const Distribution& pi, const RolloutBatch& batch,
                                      const AdvantageVector& adv,
                                      const std::optional<KlPenalty>& kl = std::nullopt);

std::vector<double> pg_gradient(const LinearSoftmaxPolicy& policy, const QueryEmbedding& query,
                                const RolloutBatch& batch, const AdvantageVector& adv,
                                const std::optional<KlPenalty>& kl = std::nullopt);

std::vector<double> pg_gradient(const TabularPolicy& policy, std::size_t query,
                                const RolloutBatch& batch, const AdvantageVector& adv,
                                const std::optional<KlPenalty>& kl = std::nullopt);

/// Logit-space gradient of the batch surrogate (see empirical_objective) with
/// real-valued counts. Ascending it drives a tabular policy to batch_optimal_policy.
std::vector<double> surrogate_logit_gradient(const Distribution& pi, const Distribution& pi_ref,
                                             std::span<const double> counts, double group_size,
                                             std::span<const double> advantages, double beta);

/// Exact-expectation mirror step on one tabular query:
/// log pi <- log pi + step_size * (N_i A_i / G - beta (log pi - log pi_ref)), renormalized.
void functional_mirror_step(TabularPolicy& policy, std::size_t query, const BatchCounts& counts,
                            std::span<const double> advantages, double beta,
                            const Distribution& pi_ref, double step_size);

}  // namespace sharpen
