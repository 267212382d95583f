#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace sharpen {

enum class OptimizerKind { SGD, Momentum, AdamW };

std::string_view to_string(OptimizerKind k);
OptimizerKind parse_optimizer(std::string_view name);

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::SGD;
    double learning_rate = 3.0;
    double momentum = 0.9;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;

    void validate() const;
};

/// Gradient-ascent optimizer state for one flat parameter vector.
///
///   SGD:      theta += lr * g
///   Momentum: buf = m * buf + g;  theta += lr * buf
///   AdamW:    bias-corrected moments, decoupled decay theta -= lr * wd * theta,
///             then theta += lr * m_hat / (sqrt(v_hat) + eps)
class Optimizer {
public:
    Optimizer(OptimizerConfig config, std::size_t parameter_count);

    /// Throws NumericalError (with the offending index) on a non-finite gradient.
    void step(std::span<double> params, std::span<const double> grad);

    const OptimizerConfig& config() const noexcept { return config_; }
    std::size_t step_count() const noexcept { return step_count_; }
    std::span<const double> first_moment() const noexcept { return first_; }
    std::span<const double> second_moment() const noexcept { return second_; }

private:
    OptimizerConfig config_;
    std::vector<double> first_;
    std::vector<double> second_;
    std::size_t step_count_ = 0;
};

}  // namespace sharpen
