#include "sharpen/policy.hpp"

#include <cmath>
#include <string>

#include "sharpen/errors.hpp"

namespace sharpen {

namespace {

// d KL(softmax(z) || ref) / dz_j = pi_j (log(pi_j / ref_j) - KL).
std::vector<double> kl_logit_gradient(const Distribution& pi, const Distribution& ref) {
    const double kl = kl_divergence(pi, ref);
    std::vector<double> g(pi.size(), 0.0);
    for (std::size_t j = 0; j < pi.size(); ++j) {
        if (pi[j] > 0.0) {
            g[j] = pi[j] * (std::log(pi[j] / ref[j]) - kl);
        }
    }
    return g;
}

void check_batch(const Distribution& pi, const RolloutBatch& batch, const AdvantageVector& adv) {
    if (adv.size() != batch.group_size()) {
        throw StructuralError("advantage length does not match the group size");
    }
    if (batch.counts().size() != pi.size()) {
        throw StructuralError("batch mode count does not match the policy");
    }
}

}  // namespace

LinearSoftmaxPolicy::LinearSoftmaxPolicy(std::size_t num_modes, std::size_t dim)
    : LinearSoftmaxPolicy(num_modes, dim, std::vector<double>(num_modes * dim, 0.0)) {}

LinearSoftmaxPolicy::LinearSoftmaxPolicy(std::size_t num_modes, std::size_t dim,
                                         std::vector<double> weights)
    : num_modes_(num_modes), dim_(dim), weights_(std::move(weights)) {
    if (num_modes == 0 || dim == 0) {
        throw StructuralError("LinearSoftmaxPolicy: empty shape");
    }
    if (weights_.size() != num_modes * dim) {
        throw StructuralError("LinearSoftmaxPolicy: weight count does not match the shape");
    }
}

void LinearSoftmaxPolicy::check_query(const QueryEmbedding& query) const {
    if (query.dim() != dim_) {
        throw StructuralError("query '" + query.name() + "' has dimension " +
                              std::to_string(query.dim()) + ", policy expects " +
                              std::to_string(dim_));
    }
}

std::vector<double> LinearSoftmaxPolicy::logits(const QueryEmbedding& query) const {
    check_query(query);
    const auto e = query.vector();
    std::vector<double> z(num_modes_, 0.0);
    for (std::size_t o = 0; o < num_modes_; ++o) {
        double acc = 0.0;
        for (std::size_t j = 0; j < dim_; ++j) {
            acc += weights_[o * dim_ + j] * e[j];
        }
        z[o] = acc;
    }
    return z;
}

PolicyOutput LinearSoftmaxPolicy::forward(const QueryEmbedding& query) const {
    auto z = logits(query);
    auto dist = Distribution::from_logits(z);
    return {std::move(z), std::move(dist)};
}

std::vector<double> LinearSoftmaxPolicy::parameter_gradient(
    const QueryEmbedding& query, std::span<const double> logit_grad) const {
    check_query(query);
    if (logit_grad.size() != num_modes_) {
        throw StructuralError("logit gradient length does not match the mode count");
    }
    const auto e = query.vector();
    std::vector<double> g(weights_.size(), 0.0);
    for (std::size_t o = 0; o < num_modes_; ++o) {
        for (std::size_t j = 0; j < dim_; ++j) {
            g[o * dim_ + j] = logit_grad[o] * e[j];
        }
    }
    return g;
}

std::vector<double> LinearSoftmaxPolicy::logit_gradient(const QueryEmbedding& query,
                                                        std::size_t mode) const {
    if (mode >= num_modes_) {
        throw StructuralError("mode index out of range");
    }
    std::vector<double> onehot(num_modes_, 0.0);
    onehot[mode] = 1.0;
    return parameter_gradient(query, onehot);
}

TabularPolicy::TabularPolicy(std::size_t num_queries, std::size_t num_modes)
    : num_queries_(num_queries), num_modes_(num_modes), logits_(num_queries * num_modes, 0.0) {
    if (num_queries == 0 || num_modes == 0) {
        throw StructuralError("TabularPolicy: empty shape");
    }
}

void TabularPolicy::check_query(std::size_t query) const {
    if (query >= num_queries_) {
        throw StructuralError("TabularPolicy: query index out of range");
    }
}

std::vector<double> TabularPolicy::logits(std::size_t query) const {
    check_query(query);
    const auto first = logits_.begin() + static_cast<std::ptrdiff_t>(query * num_modes_);
    return {first, first + static_cast<std::ptrdiff_t>(num_modes_)};
}

void TabularPolicy::set_logits(std::size_t query, std::span<const double> logits) {
    check_query(query);
    if (logits.size() != num_modes_) {
        throw StructuralError("TabularPolicy: logit length does not match the mode count");
    }
    for (std::size_t o = 0; o < num_modes_; ++o) {
        if (!std::isfinite(logits[o])) {
            throw NumericalError("TabularPolicy: non-finite logit");
        }
        logits_[query * num_modes_ + o] = logits[o];
    }
}

PolicyOutput TabularPolicy::forward(std::size_t query) const {
    auto z = logits(query);
    auto dist = Distribution::from_logits(z);
    return {std::move(z), std::move(dist)};
}

std::vector<double> TabularPolicy::parameter_gradient(std::size_t query,
                                                      std::span<const double> logit_grad) const {
    check_query(query);
    if (logit_grad.size() != num_modes_) {
        throw StructuralError("logit gradient length does not match the mode count");
    }
    std::vector<double> g(logits_.size(), 0.0);
    for (std::size_t o = 0; o < num_modes_; ++o) {
        g[query * num_modes_ + o] = logit_grad[o];
    }
    return g;
}

std::vector<std::size_t> sample_group(const Distribution& dist, std::size_t group_size, Rng& rng) {
    if (group_size == 0) {
        throw ParameterError("group size must be at least 1");
    }
    std::vector<std::size_t> out;
    out.reserve(group_size);
    const auto p = dist.probs();
    for (std::size_t s = 0; s < group_size; ++s) {
        const double u = rng.uniform();
        double cum = 0.0;
        std::size_t pick = p.size() - 1;
        for (std::size_t i = 0; i < p.size(); ++i) {
            cum += p[i];
            if (u < cum) {
                pick = i;
                break;
            }
        }
        // Rounding can leave the cumulative sum short of 1; never land on a zero-mass mode.
        while (p[pick] == 0.0 && pick > 0) {
            --pick;
        }
        out.push_back(pick);
    }
    return out;
}

double pg_objective(const Distribution& pi, const RolloutBatch& batch, const AdvantageVector& adv,
                    const std::optional<KlPenalty>& kl) {
    check_batch(pi, batch, adv);
    const auto samples = batch.samples();
    double acc = 0.0;
    for (std::size_t s = 0; s < samples.size(); ++s) {
        if (adv[s] != 0.0) {
            acc += adv[s] * std::log(pi[samples[s]]);
        }
    }
    acc /= static_cast<double>(samples.size());
    if (kl) {
        acc -= kl->beta * kl_divergence(pi, kl->pi_ref);
    }
    return acc;
}

std::vector<double> pg_logit_gradient(const Distribution& pi, const RolloutBatch& batch,
                                      const AdvantageVector& adv,
                                      const std::optional<KlPenalty>& kl) {
    check_batch(pi, batch, adv);
    const auto samples = batch.samples();
    const double inv_g = 1.0 / static_cast<double>(samples.size());
    std::vector<double> g(pi.size(), 0.0);
    for (std::size_t s = 0; s < samples.size(); ++s) {
        const double a = adv[s] * inv_g;
        if (a == 0.0) continue;
        for (std::size_t j = 0; j < pi.size(); ++j) {
            g[j] -= a * pi[j];
        }
        g[samples[s]] += a;
    }
    if (kl) {
        if (kl->pi_ref.size() != pi.size()) {
            throw StructuralError("reference policy length does not match the policy");
        }
        const auto kg = kl_logit_gradient(pi, kl->pi_ref);
        for (std::size_t j = 0; j < g.size(); ++j) {
            g[j] -= kl->beta * kg[j];
        }
    }
    return g;
}

std::vector<double> pg_gradient(const LinearSoftmaxPolicy& policy, const QueryEmbedding& query,
                                const RolloutBatch& batch, const AdvantageVector& adv,
                                const std::optional<KlPenalty>& kl) {
    const auto out = policy.forward(query);
    return policy.parameter_gradient(query, pg_logit_gradient(out.dist, batch, adv, kl));
}

std::vector<double> pg_gradient(const TabularPolicy& policy, std::size_t query,
                                const RolloutBatch& batch, const AdvantageVector& adv,
                                const std::optional<KlPenalty>& kl) {
    const auto out = policy.forward(query);
    return policy.parameter_gradient(query, pg_logit_gradient(out.dist, batch, adv, kl));
}

std::vector<double> surrogate_logit_gradient(const Distribution& pi, const Distribution& pi_ref,
                                             std::span<const double> counts, double group_size,
                                             std::span<const double> advantages, double beta) {
    const std::size_t n = pi.size();
    if (pi_ref.size() != n || counts.size() != n || advantages.size() != n) {
        throw StructuralError("surrogate gradient: length mismatch");
    }
    if (!(group_size > 0.0) || !(beta > 0.0)) {
        throw ParameterError("surrogate gradient: group size and beta must be positive");
    }
    // dL/dpi_i = c_i - beta (log(pi_i / ref_i) + 1); the constant drops out of the softmax chain rule.
    std::vector<double> d(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (pi[i] <= 0.0 || pi_ref[i] <= 0.0) {
            throw DomainError("surrogate gradient requires strictly positive policies");
        }
        d[i] = counts[i] * advantages[i] / group_size - beta * std::log(pi[i] / pi_ref[i]);
    }
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += pi[i] * d[i];
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = pi[i] * (d[i] - mean);
    return g;
}

void functional_mirror_step(TabularPolicy& policy, std::size_t query, const BatchCounts& counts,
                            std::span<const double> advantages, double beta,
                            const Distribution& pi_ref, double step_size) {
    const std::size_t n = policy.num_modes();
    if (counts.size() != n || advantages.size() != n || pi_ref.size() != n) {
        throw StructuralError("mirror step: length mismatch");
    }
    if (!(step_size >= 0.0) || !(beta > 0.0)) {
        throw ParameterError("mirror step: step size must be >= 0 and beta > 0");
    }
    const auto pi = policy.forward(query).dist;
    const double g = static_cast<double>(counts.group_size());
    std::vector<double> next(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (pi[i] <= 0.0 || pi_ref[i] <= 0.0) {
            throw DomainError("mirror step requires strictly positive policies");
        }
        const double lp = std::log(pi[i]);
        next[i] = lp + step_size * (static_cast<double>(counts[i]) * advantages[i] / g -
                                    beta * (lp - std::log(pi_ref[i])));
    }
    const double lse = log_sum_exp(next);
    for (auto& v : next) v -= lse;
    policy.set_logits(query, next);
}

}  // namespace sharpen
