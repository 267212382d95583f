#include "sharpen/dlc.hpp"

#include <cmath>

#include "sharpen/errors.hpp"

namespace sharpen {

void CalibrationConfig::validate() const {
    if (!(std::isfinite(mu) && mu >= 0.0)) {
        throw ParameterError("dlc: mu must be finite and >= 0");
    }
    memory_optimizer.validate();
}

MemoryModel::MemoryModel(std::size_t num_modes, std::size_t dim, OptimizerConfig optimizer)
    : net_(num_modes, dim), optimizer_(optimizer, num_modes * dim) {}

Distribution MemoryModel::distribution(const QueryEmbedding& query) const {
    return net_.forward(query).dist;
}

void MemoryModel::update(std::span<const Observation> observed) {
    if (observed.empty()) {
        throw StructuralError("memory update needs at least one observation");
    }
    // Ascent on the mean log-likelihood, i.e. descent on cross-entropy.
    std::vector<double> grad(net_.parameter_count(), 0.0);
    const double inv_n = 1.0 / static_cast<double>(observed.size());
    for (const auto& ob : observed) {
        if (ob.query == nullptr || ob.mode >= net_.num_modes()) {
            throw StructuralError("memory observation has no query or an invalid mode");
        }
        const auto pi = net_.forward(*ob.query).dist;
        std::vector<double> lg(net_.num_modes());
        for (std::size_t o = 0; o < lg.size(); ++o) {
            lg[o] = ((o == ob.mode ? 1.0 : 0.0) - pi[o]) * inv_n;
        }
        const auto pg = net_.parameter_gradient(*ob.query, lg);
        for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += pg[i];
    }
    optimizer_.step(net_.parameters(), grad);
}

std::vector<double> calibrated_logits(std::span<const double> policy_logits,
                                      std::span<const double> memory_logits, double mu) {
    if (policy_logits.size() != memory_logits.size()) {
        throw StructuralError("calibrated_logits: length mismatch");
    }
    std::vector<double> out(policy_logits.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = mu == 0.0 ? policy_logits[i] : policy_logits[i] - mu * memory_logits[i];
    }
    return out;
}

}  // namespace sharpen
