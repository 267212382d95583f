#include "sharpen/optimizer.hpp"

#include <cmath>
#include <string>

#include "sharpen/errors.hpp"

namespace sharpen {

std::string_view to_string(OptimizerKind k) {
    switch (k) {
        case OptimizerKind::SGD: return "sgd";
        case OptimizerKind::Momentum: return "momentum";
        case OptimizerKind::AdamW: return "adamw";
    }
    return "unknown";
}

OptimizerKind parse_optimizer(std::string_view name) {
    if (name == "sgd") return OptimizerKind::SGD;
    if (name == "momentum") return OptimizerKind::Momentum;
    if (name == "adamw") return OptimizerKind::AdamW;
    throw ConfigError("unknown optimizer '" + std::string(name) + "'");
}

void OptimizerConfig::validate() const {
    auto finite_nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
    if (!(std::isfinite(learning_rate) && learning_rate > 0.0)) {
        throw ParameterError("optimizer: learning rate must be positive");
    }
    if (!finite_nonneg(momentum) || momentum >= 1.0) {
        throw ParameterError("optimizer: momentum must lie in [0, 1)");
    }
    if (!finite_nonneg(beta1) || beta1 >= 1.0 || !finite_nonneg(beta2) || beta2 >= 1.0) {
        throw ParameterError("optimizer: Adam betas must lie in [0, 1)");
    }
    if (!(std::isfinite(eps) && eps > 0.0)) {
        throw ParameterError("optimizer: eps must be positive");
    }
    if (!finite_nonneg(weight_decay)) {
        throw ParameterError("optimizer: weight decay must be >= 0");
    }
}

Optimizer::Optimizer(OptimizerConfig config, std::size_t parameter_count)
    : config_(config), first_(parameter_count, 0.0), second_(parameter_count, 0.0) {
    config_.validate();
}

void Optimizer::step(std::span<double> params, std::span<const double> grad) {
    if (params.size() != first_.size() || grad.size() != first_.size()) {
        throw StructuralError("optimizer: parameter and gradient sizes must match the state");
    }
    for (std::size_t i = 0; i < grad.size(); ++i) {
        if (!std::isfinite(grad[i])) {
            throw NumericalError("optimizer: non-finite gradient at index " + std::to_string(i));
        }
    }
    ++step_count_;
    const double lr = config_.learning_rate;
    switch (config_.kind) {
        case OptimizerKind::SGD:
            for (std::size_t i = 0; i < grad.size(); ++i) params[i] += lr * grad[i];
            break;
        case OptimizerKind::Momentum:
            for (std::size_t i = 0; i < grad.size(); ++i) {
                first_[i] = config_.momentum * first_[i] + grad[i];
                params[i] += lr * first_[i];
            }
            break;
        case OptimizerKind::AdamW: {
            const double t = static_cast<double>(step_count_);
            const double c1 = 1.0 - std::pow(config_.beta1, t);
            const double c2 = 1.0 - std::pow(config_.beta2, t);
            for (std::size_t i = 0; i < grad.size(); ++i) {
                first_[i] = config_.beta1 * first_[i] + (1.0 - config_.beta1) * grad[i];
                second_[i] = config_.beta2 * second_[i] + (1.0 - config_.beta2) * grad[i] * grad[i];
                params[i] -= lr * config_.weight_decay * params[i];
                params[i] += lr * (first_[i] / c1) / (std::sqrt(second_[i] / c2) + config_.eps);
            }
            break;
        }
    }
}

}  // namespace sharpen
