#include "sharpen/mode_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sharpen/errors.hpp"

namespace sharpen {

ModeSpace::ModeSpace(std::size_t num_correct, std::size_t num_incorrect)
    : num_correct_(num_correct), num_incorrect_(num_incorrect) {
    if (num_correct == 0) {
        throw ParameterError("ModeSpace: at least one correct mode is required");
    }
}

ModeLabel ModeSpace::label(std::size_t mode) const {
    if (mode >= size()) {
        throw StructuralError("ModeSpace: mode index out of range");
    }
    return mode < num_correct_ ? ModeLabel::Correct : ModeLabel::Incorrect;
}

std::vector<ModeLabel> ModeSpace::labels() const {
    std::vector<ModeLabel> out(size(), ModeLabel::Incorrect);
    std::fill_n(out.begin(), num_correct_, ModeLabel::Correct);
    return out;
}

Distribution::Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) {
        throw StructuralError("Distribution: empty probability vector");
    }
    double total = 0.0;
    for (double p : probs_) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw ParameterError("Distribution: entry outside [0, 1]");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > kSimplexTolerance) {
        throw ParameterError("Distribution: entries do not sum to 1");
    }
}

Distribution Distribution::uniform(std::size_t n) {
    if (n == 0) {
        throw StructuralError("Distribution: empty probability vector");
    }
    return Distribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Distribution Distribution::one_hot(std::size_t n, std::size_t mode) {
    if (mode >= n) {
        throw StructuralError("Distribution: one-hot index out of range");
    }
    std::vector<double> p(n, 0.0);
    p[mode] = 1.0;
    return Distribution(std::move(p));
}

Distribution Distribution::from_logits(std::span<const double> logits) {
    return from_log_weights(logits);
}

Distribution Distribution::from_log_weights(std::span<const double> log_weights) {
    if (log_weights.empty()) {
        throw StructuralError("Distribution: empty logit vector");
    }
    const double top = *std::max_element(log_weights.begin(), log_weights.end());
    if (!std::isfinite(top)) {
        throw DomainError("Distribution: non-finite logits");
    }
    std::vector<double> p(log_weights.size());
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = std::exp(log_weights[i] - top);
        total += p[i];
    }
    for (auto& x : p) {
        x /= total;
    }
    return Distribution(std::move(p));
}

bool Distribution::strictly_positive() const {
    return std::all_of(probs_.begin(), probs_.end(), [](double p) { return p > 0.0; });
}

QueryEmbedding::QueryEmbedding(std::string name, std::vector<double> vector)
    : name_(std::move(name)), vector_(std::move(vector)) {
    if (vector_.empty()) {
        throw StructuralError("QueryEmbedding '" + name_ + "': empty vector");
    }
    for (double x : vector_) {
        if (!std::isfinite(x)) {
            throw ParameterError("QueryEmbedding '" + name_ + "': non-finite coordinate");
        }
    }
}

double QueryEmbedding::dot(const QueryEmbedding& other) const {
    if (other.dim() != dim()) {
        throw StructuralError("QueryEmbedding: dimension mismatch");
    }
    return std::inner_product(vector_.begin(), vector_.end(), other.vector_.begin(), 0.0);
}

AdvantageSpec::AdvantageSpec(double a_plus_, double a_minus_, double beta_)
    : a_plus(a_plus_), a_minus(a_minus_), beta(beta_) {
    if (!(a_plus >= 0.0) || !std::isfinite(a_plus)) {
        throw ParameterError("AdvantageSpec: a_plus must be finite and >= 0");
    }
    if (!(a_minus < 0.0) || !std::isfinite(a_minus)) {
        throw ParameterError("AdvantageSpec: a_minus must be finite and < 0");
    }
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw ParameterError("AdvantageSpec: beta must be finite and > 0");
    }
}

std::vector<double> AdvantageSpec::expand(const ModeSpace& modes) const {
    std::vector<double> out(modes.size(), a_minus);
    std::fill_n(out.begin(), modes.num_correct(), a_plus);
    return out;
}

const char* to_string(Sharpening s) {
    return s == Sharpening::Moderate ? "moderate" : "over";
}

Sharpening classify_sharpening(const Distribution& pi_new, const Distribution& pi_ref,
                               const ModeSpace& modes) {
    if (pi_new.size() != pi_ref.size() || pi_new.size() != modes.size()) {
        throw StructuralError("classify_sharpening: dimension mismatch");
    }
    for (std::size_t i = 0; i < modes.num_correct(); ++i) {
        if (pi_new[i] < pi_ref[i] - kSharpeningTolerance) {
            return Sharpening::Over;
        }
    }
    return Sharpening::Moderate;
}

double entropy(const Distribution& pi) {
    double h = 0.0;
    for (double p : pi.probs()) {
        if (p > 0.0) {
            h -= p * std::log(p);
        }
    }
    return h;
}

double total_variation(const Distribution& a, const Distribution& b) {
    if (a.size() != b.size()) {
        throw StructuralError("total_variation: dimension mismatch");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += std::abs(a[i] - b[i]);
    }
    return 0.5 * s;
}

double log_sum_exp(std::span<const double> values) {
    if (values.empty()) {
        return -std::numeric_limits<double>::infinity();
    }
    const double top = *std::max_element(values.begin(), values.end());
    if (!std::isfinite(top)) {
        return top;
    }
    double s = 0.0;
    for (double v : values) {
        s += std::exp(v - top);
    }
    return top + std::log(s);
}

}  // namespace sharpen
