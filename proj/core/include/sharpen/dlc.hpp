#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sharpen/optimizer.hpp"
#include "sharpen/policy.hpp"

namespace sharpen {

struct CalibrationConfig {
    double mu = 0.5;
    OptimizerConfig memory_optimizer{};

    void validate() const;
};

struct Observation {
    const QueryEmbedding* query;
    std::size_t mode;
};

/// Learned frequency prior over rollouts, same linear-softmax shape as the policy.
class MemoryModel {
public:
    MemoryModel(std::size_t num_modes, std::size_t dim, OptimizerConfig optimizer);

    std::vector<double> logits(const QueryEmbedding& query) const { return net_.logits(query); }
    Distribution distribution(const QueryEmbedding& query) const;
    const LinearSoftmaxPolicy& network() const noexcept { return net_; }

    /// One optimizer step on the mean cross-entropy of the observed (query, mode) pairs.
    void update(std::span<const Observation> observed);

private:
    LinearSoftmaxPolicy net_;
    Optimizer optimizer_;
};

/// f_theta - mu * f_phi, elementwise.
std::vector<double> calibrated_logits(std::span<const double> policy_logits,
                                      std::span<const double> memory_logits, double mu);

}  // namespace sharpen
