#include "sharpen/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "sharpen/config.hpp"
#include "sharpen/coupling.hpp"
#include "sharpen/csv.hpp"
#include "sharpen/errors.hpp"
#include "sharpen/policy.hpp"
#include "sharpen/random.hpp"
#include "sharpen/theory.hpp"

namespace sharpen {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
    return static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(lo),
                                                    static_cast<std::int64_t>(hi)));
}

Distribution random_simplex(Rng& rng, std::size_t n) { return Distribution(rng.simplex(n)); }

CheckResult finish(std::string name, std::size_t trials, std::size_t violations,
                   std::string detail, Clock::time_point t0, bool extra_ok = true) {
    return {std::move(name), violations == 0 && extra_ok, trials, violations, std::move(detail),
            seconds_since(t0)};
}

/// Free coordinates of an L2 norm after removing the mean.
double projected_norm(const std::vector<double>& g) {
    double mean = 0.0;
    for (double x : g) mean += x;
    mean /= static_cast<double>(g.size());
    double ss = 0.0;
    for (double x : g) ss += (x - mean) * (x - mean);
    return std::sqrt(ss);
}

}  // namespace

CheckResult check_optimal_policy_moderate(std::size_t trials, std::uint64_t seed) {
    const auto t0 = Clock::now();
    Rng rng(seed);
    std::size_t violations = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        const ModeSpace modes(pick(rng, 1, 4), pick(rng, 1, 4));
        const auto pi_ref = random_simplex(rng, modes.size());
        const AdvantageSpec spec(rng.uniform(0.0, 3.0), -rng.uniform(1e-3, 3.0),
                                 rng.uniform(0.05, 5.0));
        const auto a = spec.expand(modes);
        const auto pi = optimal_policy(pi_ref, a, spec.beta).policy;
        if (classify_sharpening(pi, pi_ref, modes) != Sharpening::Moderate) ++violations;
    }
    return finish("optimal policy is moderate", trials, violations, "binary advantages", t0);
}

CheckResult check_batch_optimal_policy(std::size_t trials, std::uint64_t seed) {
    const auto t0 = Clock::now();
    Rng rng(seed);
    std::size_t violations = 0;
    double worst_tv = 0.0;
    double worst_grad = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t n = pick(rng, 2, 6);
        const std::size_t g = pick(rng, 1, 16);
        const auto pi_ref = random_simplex(rng, n);
        const auto counts = BatchCounts::from_samples(sample_group(pi_ref, g, rng), n);
        std::vector<double> adv(n);
        for (auto& a : adv) a = rng.uniform(-2.0, 2.0);
        const double beta = rng.uniform(0.5, 5.0);

        const auto hat = batch_optimal_policy(pi_ref, counts, adv, beta).policy;

        // Numerical maximizer: exponentiated-gradient ascent with finite-difference
        // gradients of the objective through a softmax parameterization.
        std::vector<double> z(n, 0.0);
        const double step = 0.5 / beta;
        const double h = 1e-5;
        for (int it = 0; it < 120; ++it) {
            const auto pi = Distribution::from_logits(z);
            std::vector<double> dz(n);
            for (std::size_t i = 0; i < n; ++i) {
                auto zp = z;
                auto zm = z;
                zp[i] += h;
                zm[i] -= h;
                dz[i] = (empirical_objective(Distribution::from_logits(zp), pi_ref, counts, adv, beta) -
                         empirical_objective(Distribution::from_logits(zm), pi_ref, counts, adv, beta)) /
                        (2.0 * h);
            }
            for (std::size_t i = 0; i < n; ++i) z[i] += step * dz[i] / pi[i];
        }
        const double tv = total_variation(Distribution::from_logits(z), hat);
        const double gnorm = projected_norm(empirical_objective_gradient(hat, pi_ref, counts, adv, beta));
        worst_tv = std::max(worst_tv, tv);
        worst_grad = std::max(worst_grad, gnorm);
        if (!(tv < 1e-4) || !(gnorm < 1e-7)) ++violations;
    }
    std::ostringstream d;
    d << "max TV " << worst_tv << ", max projected gradient " << worst_grad;
    return finish("batch optimal policy maximizes the surrogate", trials, violations, d.str(), t0);
}

CheckResult check_partition_bounds(std::size_t trials, std::uint64_t seed) {
    const auto t0 = Clock::now();
    Rng rng(seed);
    std::size_t violations = 0;
    std::size_t binary_cases = 0;
    std::size_t gap_cases = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        const ModeSpace modes(pick(rng, 1, 4), pick(rng, 1, 4));
        const std::size_t n = modes.size();
        const std::size_t g = pick(rng, 1, 16);
        const auto pi_ref = random_simplex(rng, n);
        const auto samples = sample_group(pi_ref, g, rng);
        const auto counts = BatchCounts::from_samples(samples, n);
        std::size_t successes = 0;
        for (auto o : samples) successes += modes.is_correct(o) ? 1 : 0;
        const auto stats = BinaryStats::from_accuracy(static_cast<double>(successes) / static_cast<double>(g));
        const double beta = rng.uniform(0.1, 5.0);

        double a_plus = rng.uniform(0.0, 2.0);
        double a_minus = -rng.uniform(1e-3, 2.0);
        std::optional<BinaryStats> binary;
        if (stats.sigma > 0.0) {
            a_plus = (1.0 - stats.p_plus) / stats.sigma;
            a_minus = -stats.p_plus / stats.sigma;
            binary = stats;
            ++binary_cases;
        }
        std::vector<double> adv(n);
        for (std::size_t i = 0; i < n; ++i) adv[i] = modes.is_correct(i) ? a_plus : a_minus;

        const auto rep = z_prime_report(pi_ref, counts, modes, adv, beta, binary);
        const double tol = 1e-12 * std::max(1.0, rep.z_prime);
        bool ok = rep.z_prime >= rep.general_lower_bound - tol;
        if (rep.binary_lower_bound) ok = ok && rep.z_prime >= *rep.binary_lower_bound - tol;
        if (rep.delta_pi && *rep.delta_pi > 0.0 && stats.sigma > 0.0) {
            ++gap_cases;
            ok = ok && rep.z_prime > 1.0;
            const auto hat = batch_optimal_policy(pi_ref, counts, adv, beta).policy;
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[i] == 0) ok = ok && hat[i] < pi_ref[i];
            }
        }
        if (!ok) ++violations;
    }
    std::ostringstream d;
    d << binary_cases << " with binary bound, " << gap_cases << " with positive gap";
    return finish("partition function bounds", trials, violations, d.str(), t0, gap_cases > 0);
}

CheckResult check_mirror_step(std::size_t trials, std::uint64_t seed) {
    const auto t0 = Clock::now();
    Rng rng(seed);
    std::size_t violations = 0;
    double worst = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t n = pick(rng, 2, 6);
        const std::size_t g = pick(rng, 1, 16);
        TabularPolicy policy(1, n);
        std::vector<double> logits(n);
        for (auto& z : logits) z = rng.uniform(-3.0, 3.0);
        policy.set_logits(0, logits);
        const auto pi_t = policy.forward(0).dist;
        const auto pi_ref = random_simplex(rng, n);
        const auto counts = BatchCounts::from_samples(sample_group(pi_t, g, rng), n);
        std::vector<double> adv(n);
        for (auto& a : adv) a = rng.uniform(-2.0, 2.0);
        const double beta = rng.uniform(0.1, 5.0);
        const double eta_beta = rng.uniform();
        const auto hat = batch_optimal_policy(pi_ref, counts, adv, beta).policy;

        functional_mirror_step(policy, 0, counts, adv, beta, pi_ref, eta_beta / beta);
        const auto stepped = policy.forward(0).dist;
        const auto interp = geometric_interpolation(pi_t, hat, eta_beta);
        double diff = 0.0;
        for (std::size_t i = 0; i < n; ++i) diff = std::max(diff, std::abs(stepped[i] - interp[i]));
        worst = std::max(worst, diff);
        if (!(diff < 1e-10)) ++violations;
    }
    std::ostringstream d;
    d << "max abs difference " << worst;
    return finish("mirror step is geometric interpolation", trials, violations, d.str(), t0);
}

CheckResult check_shift_bounds(std::size_t trials, std::uint64_t seed) {
    const auto t0 = Clock::now();
    Rng rng(seed);
    std::size_t violations = 0;

    // Worked G = 2 case.
    const auto k2 = structured_kernel(2, 2.0, 1.0);
    const TargetShiftVector y2({1.0, 0.0});
    const KernelEnvelope env2{2.0, 2.0, 1.0, 1.0, 1.0};
    const double seen_exact = exact_logit_shift(k2, Eigen::Vector2d(2.0, 1.0), y2);
    const double seen_bound = logit_shift_bound(env2, y2, 2, SeenMode{0, 1});
    const double unseen_exact = exact_logit_shift(k2, Eigen::Vector2d(1.0, 1.0), y2);
    const double unseen_bound = logit_shift_bound(env2, y2, 2, UnseenMode{});
    const bool worked = std::abs(seen_exact - 1.0) < 1e-12 && std::abs(seen_bound - 2.0 / 3.0) < 1e-12 &&
                        std::abs(unseen_exact - 1.0 / 3.0) < 1e-12 &&
                        std::abs(unseen_bound - 1.0 / 3.0) < 1e-12;

    for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t g = pick(rng, 1, 16);
        const double lambda = rng.uniform(0.1, 5.0);
        const double rho = lambda * rng.uniform(0.01, 0.99);
        const double eta = rng.uniform(1e-3, 1.0);
        const std::size_t count = pick(rng, 1, g);
        std::vector<double> yv(g);
        for (auto& v : yv) v = rng.uniform(0.0, 2.0);
        // Repeated samples of the seen mode share one target shift.
        for (std::size_t s = 1; s < count; ++s) yv[s] = yv[0];
        const TargetShiftVector y(yv);
        const auto k = structured_kernel(g, lambda, rho);
        const KernelEnvelope env{lambda, lambda, rho, rho, eta};
        const auto gi = static_cast<Eigen::Index>(g);

        const Eigen::VectorXd unseen_k = Eigen::VectorXd::Constant(gi, eta * rho);
        Eigen::VectorXd seen_k = Eigen::VectorXd::Constant(gi, eta * rho);
        seen_k.head(static_cast<Eigen::Index>(count)).setConstant(eta * lambda);

        const double ue = exact_logit_shift(k, unseen_k, y);
        const double ub = logit_shift_bound(env, y, g, UnseenMode{});
        const double se = exact_logit_shift(k, seen_k, y);
        const double sb = logit_shift_bound(env, y, g, SeenMode{0, count});
        const double scale = std::max(1.0, y.total);
        if (!(ue <= ub + 1e-9 * scale) || !(se >= sb - 1e-9 * scale)) ++violations;
    }
    std::ostringstream d;
    d << "worked case exact " << seen_exact << " vs lower " << seen_bound << ", exact "
      << unseen_exact << " vs upper " << unseen_bound << (worked ? "" : " (MISMATCH)");
    return finish("logit shift bounds bracket exact shifts", trials, violations, d.str(), t0, worked);
}

CheckResult check_suppression_ratio(std::size_t trials, std::uint64_t seed) {
    const auto t0 = Clock::now();
    Rng rng(seed);
    std::size_t violations = 0;
    const KernelEnvelope env2{2.0, 2.0, 1.0, 1.0, 1.0};
    const auto worked = suppression_ratio(env2, TargetShiftVector({1.0, 0.0}), 2, 0, 1);
    const bool worked_ok = worked.simplified && std::abs(*worked.simplified - 2.0) < 1e-12 &&
                           std::abs(worked.general - 2.0) < 1e-12;
    for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t g = pick(rng, 1, 16);
        const double lambda = rng.uniform(0.1, 5.0);
        const double rho = lambda * rng.uniform(0.01, 0.99);
        std::vector<double> yv(g);
        for (auto& v : yv) v = rng.uniform(0.01, 2.0);
        const TargetShiftVector y(yv);
        const KernelEnvelope env{lambda, lambda, rho, rho, rng.uniform(1e-3, 1.0)};
        const std::size_t k = pick(rng, 0, g - 1);
        const auto r = suppression_ratio(env, y, g, k, pick(rng, 1, g));
        if (!r.simplified ||
            std::abs(r.general - *r.simplified) > 1e-9 * std::max(1.0, std::abs(r.general))) {
            ++violations;
        }
    }
    std::ostringstream d;
    d << "worked ratio " << worked.general;
    return finish("suppression ratio closed form", trials, violations, d.str(), t0, worked_ok);
}

CheckResult check_envelope_premises(std::size_t trials, std::uint64_t seed) {
    const auto t0 = Clock::now();
    Rng rng(seed);
    std::size_t violations = 0;
    std::size_t premised = 0;
    std::size_t unconditional = 0;
    std::size_t tested = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t g = pick(rng, 2, 8);
        const auto gi = static_cast<Eigen::Index>(g);
        Eigen::MatrixXd k(gi, gi);
        double off_max = 0.0;
        for (Eigen::Index i = 0; i < gi; ++i) {
            for (Eigen::Index j = i + 1; j < gi; ++j) {
                k(i, j) = k(j, i) = rng.uniform(0.0, 1.0);
                off_max = std::max(off_max, k(i, j));
            }
        }
        for (Eigen::Index i = 0; i < gi; ++i) k(i, i) = off_max + rng.uniform(0.05, 2.0);
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k, Eigen::EigenvaluesOnly);
        if (eig.eigenvalues().minCoeff() <= 1e-6) continue;
        ++tested;
        const double eta = rng.uniform(1e-3, 1.0);
        auto env = KernelEnvelope::from_kernel(k, eta);
        std::vector<double> yv(g);
        for (auto& v : yv) v = rng.uniform(0.0, 2.0);
        const TargetShiftVector y(yv);
        Eigen::VectorXd kp(gi);
        for (Eigen::Index i = 0; i < gi; ++i) kp(i) = rng.uniform(0.0, eta * env.rho_max);

        const double exact = exact_logit_shift(k, kp, y);
        const double bound = logit_shift_bound(env, y, g, UnseenMode{});
        const Eigen::VectorXd alpha = k.ldlt().solve(Eigen::Map<const Eigen::VectorXd>(yv.data(), gi));
        const bool holds = exact <= bound + 1e-9 * std::max(1.0, bound);
        if (!holds) ++unconditional;
        const bool premise = alpha.minCoeff() >= 0.0 &&
                             alpha.sum() <= y.total / (env.lambda_min + static_cast<double>(g - 1) * env.rho_min) + 1e-12;
        if (premise) {
            ++premised;
            if (!holds) ++violations;
        }
    }
    std::ostringstream d;
    d << tested << " PSD kernels, " << premised << " meet the premises; unconditional exceedances "
      << unconditional;
    return finish("unseen-mode bound under its premises", tested, violations, d.str(), t0, premised > 0);
}

CheckResult check_idealized_reweighting(std::size_t trials, std::uint64_t seed) {
    const auto t0 = Clock::now();
    Rng rng(seed);
    std::size_t violations = 0;
    double worst = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        const ModeSpace modes(pick(rng, 1, 4), pick(rng, 1, 4));
        const std::size_t n = modes.size();
        const std::size_t g = pick(rng, 2, 16);
        const auto pi_ref = random_simplex(rng, n);
        const auto samples = sample_group(pi_ref, g, rng);
        std::vector<double> rewards;
        for (auto o : samples) rewards.push_back(modes.is_correct(o) ? 1.0 : 0.0);
        const RolloutBatch batch("q", samples, rewards, n);
        const auto adv = estimate_advantages(batch, Estimator::MeanShifted).per_mode(batch, n);
        std::vector<double> calibrated(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (batch.counts()[i] > 0) calibrated[i] = adv[i] / pi_ref[i];
        }
        const auto rep = z_prime_report(pi_ref, batch.counts(), modes, calibrated, rng.uniform(0.1, 5.0));
        const double err = std::abs(rep.general_lower_bound - 1.0);
        worst = std::max(worst, err);
        if (!(err < 1e-12)) ++violations;
    }
    std::ostringstream d;
    d << "max |bound - 1| " << worst;
    return finish("inverse-probability reweighting zeroes the bound", trials, violations, d.str(), t0);
}

CheckResult check_pg_gradient(std::size_t trials, std::uint64_t seed) {
    const auto t0 = Clock::now();
    Rng rng(seed);
    std::size_t violations = 0;
    std::size_t with_kl = 0;
    double worst = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t n = pick(rng, 2, 6);
        const std::size_t dim = pick(rng, 2, 6);
        std::vector<double> w(n * dim);
        for (auto& x : w) x = rng.uniform(-1.0, 1.0);
        LinearSoftmaxPolicy policy(n, dim, w);
        std::vector<double> e(dim);
        for (auto& x : e) x = rng.uniform(-1.0, 1.0);
        const QueryEmbedding q("q", e);
        const std::size_t g = pick(rng, 1, 12);
        const auto samples = sample_group(policy.forward(q).dist, g, rng);
        std::vector<double> rewards;
        for (std::size_t s = 0; s < g; ++s) rewards.push_back(rng.uniform() < 0.5 ? 1.0 : 0.0);
        const RolloutBatch batch("q", samples, rewards, n);
        AdvantageVector adv{{}, Estimator::Raw, false};
        for (std::size_t s = 0; s < g; ++s) adv.values.push_back(rng.uniform(-2.0, 2.0));
        std::optional<KlPenalty> kl;
        if (t % 2 == 1) {
            kl = KlPenalty{rng.uniform(0.1, 2.0), random_simplex(rng, n)};
            ++with_kl;
        }

        const auto grad = pg_gradient(policy, q, batch, adv, kl);
        const double h = 1e-6;
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            auto wp = w;
            auto wm = w;
            wp[i] += h;
            wm[i] -= h;
            const double fp = pg_objective(LinearSoftmaxPolicy(n, dim, wp).forward(q).dist, batch, adv, kl);
            const double fm = pg_objective(LinearSoftmaxPolicy(n, dim, wm).forward(q).dist, batch, adv, kl);
            const double fd = (fp - fm) / (2.0 * h);
            num += (grad[i] - fd) * (grad[i] - fd);
            den += fd * fd;
        }
        const double rel = std::sqrt(num) / std::max(std::sqrt(den), 1e-8);
        worst = std::max(worst, rel);
        if (!(rel < 1e-5)) ++violations;
    }
    std::ostringstream d;
    d << with_kl << " with KL, max relative error " << worst;
    return finish("policy gradient matches finite differences", trials, violations, d.str(), t0);
}

CheckResult check_toy_alignment() {
    const auto t0 = Clock::now();
    std::size_t violations = 0;
    std::size_t checks = 0;
    std::ostringstream d;
    const auto base = ExperimentConfig::preset(ExperimentKind::SemanticCoupling);
    std::vector<QueryEmbedding> queries;
    for (const auto& [name, v] : base.embeddings) {
        if (name != "Siamese") queries.emplace_back(name, v);
    }
    for (auto v : {SimilarityVariant::High, SimilarityVariant::Mid, SimilarityVariant::Low}) {
        queries.emplace_back("Siamese-" + std::string(to_string(v)), siamese_embedding(v));
    }
    const std::size_t n = base.modes.size();
    const LinearSoftmaxPolicy policy(n, 4);

    // Separability: <grad f(q,o), grad f(q',o')> = [o == o'] e_q . e_q'.
    for (const auto& a : queries) {
        for (const auto& b : queries) {
            for (std::size_t o = 0; o < n; ++o) {
                for (std::size_t p = 0; p < n; ++p) {
                    const auto ga = policy.logit_gradient(a, o);
                    const auto gb = policy.logit_gradient(b, p);
                    double dot = 0.0;
                    for (std::size_t i = 0; i < ga.size(); ++i) dot += ga[i] * gb[i];
                    const double expect = o == p ? a.dot(b) : 0.0;
                    ++checks;
                    if (std::abs(dot - expect) > 1e-12) ++violations;
                }
            }
        }
    }

    // Non-negative alignment among the rewarded modes, decreasing transfer across variants.
    const QueryEmbedding persian("Persian", base.embeddings.at("Persian"));
    const std::vector<std::size_t> rewarded = {0, 1};
    double prev = std::numeric_limits<double>::infinity();
    d << "eta_hat";
    for (std::size_t v = 0; v < 3; ++v) {
        const auto& target = queries[queries.size() - 3 + v];
        const auto rep = alignment_stats(policy, persian, target, rewarded);
        const double oracle = target.dot(persian) / persian.dot(persian);
        d << " " << target.name() << "=" << rep.eta_hat;
        checks += 4;
        if (!rep.assumption1_holds) ++violations;
        if (!rep.assumption3_holds) ++violations;
        if (std::abs(rep.eta_hat - oracle) > 1e-12) ++violations;
        if (!(rep.eta_hat < prev)) ++violations;
        prev = rep.eta_hat;
    }

    // Identical queries transfer fully; disjoint supports do not transfer.
    const auto self = alignment_stats(policy, persian, persian, rewarded);
    const QueryEmbedding left("left", {1.0, 1.0, 0.0, 0.0});
    const QueryEmbedding right("right", {0.0, 0.0, 1.0, 1.0});
    const auto ortho = alignment_stats(policy, left, right, rewarded);
    checks += 2;
    if (std::abs(self.eta_hat - 1.0) > 1e-12) ++violations;
    if (std::abs(ortho.eta_hat) > 1e-12) ++violations;

    // Duplicate samples give identical kernel rows.
    const std::vector<std::size_t> dup = {1, 1, 0};
    const auto bk = batch_kernel(policy, persian, dup);
    ++checks;
    if ((bk.kernel.row(0) - bk.kernel.row(1)).cwiseAbs().maxCoeff() > 0.0) ++violations;

    // Logit gradient against finite differences at a non-trivial point.
    std::vector<double> w(n * 4);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.1 * static_cast<double>(i % 7) - 0.3;
    const LinearSoftmaxPolicy moved(n, 4, w);
    for (std::size_t o = 0; o < n; ++o) {
        const auto gr = moved.logit_gradient(persian, o);
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            auto wp = w;
            auto wm = w;
            wp[i] += 1e-6;
            wm[i] -= 1e-6;
            const double fd = (LinearSoftmaxPolicy(n, 4, wp).logits(persian)[o] -
                               LinearSoftmaxPolicy(n, 4, wm).logits(persian)[o]) / 2e-6;
            num += (gr[i] - fd) * (gr[i] - fd);
            den += fd * fd;
        }
        ++checks;
        if (std::sqrt(num) / std::sqrt(den) >= 1e-5) ++violations;
    }
    return finish("toy gradient alignment", checks, violations, d.str(), t0);
}

std::string coupling_report_csv() {
    const auto base = ExperimentConfig::preset(ExperimentKind::SemanticCoupling);
    const QueryEmbedding persian("Persian", base.embeddings.at("Persian"));
    const LinearSoftmaxPolicy policy(base.modes.size(), 4);
    std::vector<std::size_t> modes(base.modes.size());
    for (std::size_t i = 0; i < modes.size(); ++i) modes[i] = i;
    std::string out =
        "source,target,eta_hat,cross_min,cross_mean,lambda_min,lambda_max,rho_min,rho_max,"
        "assumption1,assumption3\n";
    for (auto v : {SimilarityVariant::High, SimilarityVariant::Mid, SimilarityVariant::Low}) {
        const QueryEmbedding target("Siamese-" + std::string(to_string(v)), siamese_embedding(v));
        const auto r = alignment_stats(policy, persian, target, modes);
        out += "Persian," + target.name() + "," + format_double(r.eta_hat) + "," +
               format_double(r.cross_min) + "," + format_double(r.cross_mean) + "," +
               format_double(r.envelope.lambda_min) + "," + format_double(r.envelope.lambda_max) +
               "," + format_double(r.envelope.rho_min) + "," + format_double(r.envelope.rho_max) +
               "," + (r.assumption1_holds ? "1" : "0") + "," + (r.assumption3_holds ? "1" : "0") +
               "\n";
    }
    return out;
}

std::vector<CheckResult> run_verify(std::string_view module, std::size_t trials) {
    auto n = [&](std::size_t def) { return trials == 0 ? def : trials; };
    const bool theory = module == "theory" || module == "all";
    const bool coupling = module == "coupling" || module == "all";
    if (!theory && !coupling) {
        throw ConfigError("unknown verify module '" + std::string(module) + "'");
    }
    std::vector<CheckResult> out;
    if (theory) {
        out.push_back(check_optimal_policy_moderate(n(10000)));
        out.push_back(check_batch_optimal_policy(n(1000)));
        out.push_back(check_partition_bounds(n(10000)));
        out.push_back(check_mirror_step(n(1000)));
        out.push_back(check_idealized_reweighting(n(1000)));
        out.push_back(check_pg_gradient(n(100)));
    }
    if (coupling) {
        out.push_back(check_shift_bounds(n(10000)));
        out.push_back(check_suppression_ratio(n(1000)));
        out.push_back(check_envelope_premises(n(2000)));
        out.push_back(check_toy_alignment());
    }
    return out;
}

std::string format_check(const CheckResult& r) {
    std::ostringstream out;
    out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.trials << " trials, "
        << r.violations << " violations; " << r.detail << " (" << r.seconds << " s)";
    return out.str();
}

}  // namespace sharpen
