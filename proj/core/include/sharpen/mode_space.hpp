#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace sharpen {

enum class ModeLabel { Correct, Incorrect };

/// Coarsened output space of one query: K1 correct modes followed by K2 incorrect ones.
/// Indices are stable identifiers; the canonical ordering puts every correct mode first.
class ModeSpace {
public:
    ModeSpace(std::size_t num_correct, std::size_t num_incorrect);

    std::size_t num_correct() const noexcept { return num_correct_; }
    std::size_t num_incorrect() const noexcept { return num_incorrect_; }
    std::size_t size() const noexcept { return num_correct_ + num_incorrect_; }

    ModeLabel label(std::size_t mode) const;
    bool is_correct(std::size_t mode) const { return label(mode) == ModeLabel::Correct; }
    std::vector<ModeLabel> labels() const;

private:
    std::size_t num_correct_;
    std::size_t num_incorrect_;
};

/// Probability vector over modes. Entries lie in [0, 1] and sum to one within kSimplexTolerance.
class Distribution {
public:
    static constexpr double kSimplexTolerance = 1e-9;

    explicit Distribution(std::vector<double> probs);

    static Distribution uniform(std::size_t n);
    static Distribution one_hot(std::size_t n, std::size_t mode);
    /// Max-subtracted softmax of a logit vector.
    static Distribution from_logits(std::span<const double> logits);
    /// Normalizes exp(log_weights) in log-space.
    static Distribution from_log_weights(std::span<const double> log_weights);

    std::size_t size() const noexcept { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }
    std::span<const double> probs() const noexcept { return probs_; }
    const std::vector<double>& vector() const noexcept { return probs_; }

    bool strictly_positive() const;

    friend bool operator==(const Distribution&, const Distribution&) = default;

private:
    std::vector<double> probs_;
};

/// Named query embedding with finite coordinates.
class QueryEmbedding {
public:
    QueryEmbedding(std::string name, std::vector<double> vector);

    const std::string& name() const noexcept { return name_; }
    std::span<const double> vector() const noexcept { return vector_; }
    std::size_t dim() const noexcept { return vector_.size(); }
    double dot(const QueryEmbedding& other) const;

private:
    std::string name_;
    std::vector<double> vector_;
};

/// Shared binary advantages: A+ >= 0 on correct modes, A- < 0 on incorrect ones, KL weight beta > 0.
struct AdvantageSpec {
    double a_plus;
    double a_minus;
    double beta;

    AdvantageSpec(double a_plus, double a_minus, double beta);

    /// Expands to a per-mode advantage vector in the mode space's canonical ordering.
    std::vector<double> expand(const ModeSpace& modes) const;
};

enum class Sharpening { Moderate, Over };

const char* to_string(Sharpening s);

/// Tolerance below which a correct-mode probability drop is not counted.
inline constexpr double kSharpeningTolerance = 1e-12;

Sharpening classify_sharpening(const Distribution& pi_new, const Distribution& pi_ref,
                               const ModeSpace& modes);

/// Shannon entropy in nats, with 0 log 0 = 0.
double entropy(const Distribution& pi);

/// Total-variation distance: half the L1 norm of the difference.
double total_variation(const Distribution& a, const Distribution& b);

double log_sum_exp(std::span<const double> values);

}  // namespace sharpen
