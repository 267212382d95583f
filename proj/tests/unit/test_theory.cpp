#include <cmath>

#include <doctest.h>

#include "sharpen/errors.hpp"
#include "sharpen/policy.hpp"
#include "sharpen/random.hpp"
#include "sharpen/theory.hpp"

using namespace sharpen;

namespace {

double per_query_objective(double p0, const std::vector<double>& ref, const std::vector<double>& a,
                           double beta) {
    const double p1 = 1.0 - p0;
    return p0 * a[0] + p1 * a[1] -
           beta * (p0 * std::log(p0 / ref[0]) + p1 * std::log(p1 / ref[1]));
}

}  // namespace

TEST_CASE("optimal policy examples") {
    const Distribution half({0.5, 0.5});
    const std::vector<double> zero = {0.0, 0.0};
    CHECK(optimal_policy(half, zero, 1.0).policy[0] == doctest::Approx(0.5));

    const std::vector<double> a = {1.0, -1.0};
    const auto pi = optimal_policy(half, a, 1.0).policy;
    CHECK(pi[0] == doctest::Approx(0.88080).epsilon(1e-5));
    CHECK(pi[1] == doctest::Approx(0.11920).epsilon(1e-4));

    // Oracle: grid maximization of the per-query KL-regularized objective.
    double best = 0.0;
    double best_val = -INFINITY;
    for (int i = 1; i < 200000; ++i) {
        const double p0 = i / 200000.0;
        const double v = per_query_objective(p0, {0.5, 0.5}, a, 1.0);
        if (v > best_val) {
            best_val = v;
            best = p0;
        }
    }
    CHECK(std::abs(best - pi[0]) < 1e-4);

    CHECK_THROWS_AS(optimal_policy(half, a, 0.0), ParameterError);
    CHECK_THROWS_AS(optimal_policy(half, std::vector<double>{1.0}, 1.0), StructuralError);
}

TEST_CASE("optimal policy is moderate with two correct modes") {
    const Distribution ref({0.4, 0.4, 0.2});
    const ModeSpace m(2, 1);
    const auto a = AdvantageSpec(1.0, -1.0, 1.0).expand(m);
    const auto pi = optimal_policy(ref, a, 1.0).policy;
    CHECK(pi[0] > 0.4);
    CHECK(pi[1] > 0.4);
    CHECK(classify_sharpening(pi, ref, m) == Sharpening::Moderate);
}

TEST_CASE("optimal policy does not overflow for tiny beta") {
    const Distribution ref({0.3, 0.7});
    const auto pi = optimal_policy(ref, std::vector<double>{5.0, -5.0}, 1e-3).policy;
    CHECK(pi[0] == doctest::Approx(1.0));
    CHECK(std::isfinite(optimal_policy(ref, std::vector<double>{5.0, -5.0}, 1e-3).log_partition));
}

TEST_CASE("batch optimal policy worked example") {
    const Distribution ref({0.4, 0.4, 0.2});
    const BatchCounts counts({2, 2, 0}, 4);
    const std::vector<double> a = {1.0, -1.0, 0.0};
    const auto hat = batch_optimal_policy(ref, counts, a, 1.0);
    CHECK(hat.policy[0] == doctest::Approx(0.59840).epsilon(1e-4));
    CHECK(hat.policy[1] == doctest::Approx(0.22014).epsilon(1e-4));
    CHECK(hat.policy[2] == doctest::Approx(0.18147).epsilon(1e-4));
    const double z = 0.4 * std::exp(0.5) + 0.4 * std::exp(-0.5) + 0.2;
    CHECK(hat.partition() == doctest::Approx(z).epsilon(1e-14));
    CHECK(hat.partition() == doctest::Approx(1.10210).epsilon(1e-5));
    // Unsampled mode is scaled down by Z'.
    CHECK(hat.policy[2] < 0.2);
    CHECK(hat.policy[2] == doctest::Approx(0.2 / z).epsilon(1e-14));

    // Oracle: numerical maximizer of the surrogate by exponentiated gradient.
    std::vector<double> z_log(3, 0.0);
    for (int it = 0; it < 200; ++it) {
        const auto pi = Distribution::from_logits(z_log);
        const auto g = empirical_objective_gradient(pi, ref, counts, a, 1.0);
        for (int i = 0; i < 3; ++i) z_log[i] += 0.5 * g[i];
    }
    CHECK(total_variation(Distribution::from_logits(z_log), hat.policy) < 1e-5);
}

TEST_CASE("batch optimal policy with zero advantages returns the reference") {
    Rng rng(3);
    for (int t = 0; t < 50; ++t) {
        const Distribution ref(rng.simplex(4));
        const BatchCounts counts({1, 0, 2, 1}, 4);
        const auto hat = batch_optimal_policy(ref, counts, std::vector<double>(4, 0.0), 0.7);
        CHECK(total_variation(hat.policy, ref) < 1e-15);
    }
}

TEST_CASE("unsampled modes move by the inverse partition function") {
    Rng rng(4);
    int above = 0;
    int below = 0;
    for (int t = 0; t < 2000; ++t) {
        const std::size_t n = 5;
        const Distribution ref(rng.simplex(n));
        const auto counts = BatchCounts::from_samples(sample_group(ref, 4, rng), n);
        std::vector<double> a(n);
        for (auto& x : a) x = rng.uniform(-1.0, 1.0);
        const auto hat = batch_optimal_policy(ref, counts, a, rng.uniform(0.2, 3.0));
        for (std::size_t i = 0; i < n; ++i) {
            if (counts[i] != 0) continue;
            if (hat.partition() > 1.0) {
                CHECK(hat.policy[i] < ref[i]);
                ++above;
            } else if (hat.partition() < 1.0) {
                CHECK(hat.policy[i] > ref[i]);
                ++below;
            }
        }
    }
    CHECK(above > 0);
    CHECK(below > 0);
}

TEST_CASE("batch counts validate") {
    CHECK_THROWS(BatchCounts({1, 1}, 3));
    CHECK_THROWS(BatchCounts({}, 0));
    const std::vector<std::size_t> samples = {0, 2, 2};
    const auto c = BatchCounts::from_samples(samples, 3);
    CHECK(c[2] == 2);
    CHECK(c.group_size() == 3);
    const std::vector<std::size_t> bad = {3};
    CHECK_THROWS(BatchCounts::from_samples(bad, 3));
}

TEST_CASE("z prime report worked example") {
    const Distribution ref({0.4, 0.4, 0.2});
    const BatchCounts counts({2, 2, 0}, 4);
    const ModeSpace m(1, 2);
    const std::vector<double> a = {1.0, -1.0, -1.0};
    const auto rep = z_prime_report(ref, counts, m, a, 1.0, BinaryStats::from_accuracy(0.5));
    CHECK(rep.z_prime == doctest::Approx(1.102101).epsilon(1e-6));
    REQUIRE(rep.delta_pi);
    CHECK(*rep.delta_pi == doctest::Approx(0.0));
    REQUIRE(rep.binary_lower_bound);
    CHECK(*rep.binary_lower_bound == doctest::Approx(1.0));
    // General bound: 1 + (1/4)(2 * 0.4 - 2 * 0.4) = 1.
    CHECK(rep.general_lower_bound == doctest::Approx(1.0));
    CHECK(rep.suppresses_unsampled);
}

TEST_CASE("z prime report rejects advantages that do not match p+") {
    const Distribution ref({0.4, 0.4, 0.2});
    const BatchCounts counts({2, 2, 0}, 4);
    const std::vector<double> a = {2.0, -1.0, -1.0};
    CHECK_THROWS_AS(z_prime_report(ref, counts, ModeSpace(1, 2), a, 1.0, BinaryStats::from_accuracy(0.5)),
                    ParameterError);
}

TEST_CASE("degenerate batches leave the binary bound absent") {
    const Distribution ref({0.4, 0.4, 0.2});
    const BatchCounts counts({4, 0, 0}, 4);
    const std::vector<double> a = {0.0, -1.0, -1.0};
    for (double p : {0.0, 1.0}) {
        const auto stats = BinaryStats::from_accuracy(p);
        CHECK(stats.sigma == 0.0);
        const auto rep = z_prime_report(ref, counts, ModeSpace(1, 2), a, 1.0, stats);
        CHECK_FALSE(rep.binary_lower_bound);
        CHECK(rep.z_prime >= rep.general_lower_bound);
    }
}

TEST_CASE("geometric interpolation") {
    const Distribution a({0.8, 0.2});
    const Distribution b({0.2, 0.8});
    CHECK(geometric_interpolation(a, b, 0.0) == a);
    CHECK(geometric_interpolation(a, b, 1.0) == b);
    const auto mid = geometric_interpolation(a, b, 0.5);
    CHECK(mid[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(geometric_interpolation(Distribution({1.0, 0.0}), b, 0.5), DomainError);
    CHECK_THROWS_AS(geometric_interpolation(a, b, 1.5), ParameterError);
}

TEST_CASE("empirical objective") {
    const Distribution ref({0.3, 0.3, 0.4});
    const BatchCounts counts({1, 2, 1}, 4);
    CHECK(empirical_objective(ref, ref, counts, std::vector<double>(3, 0.0), 1.0) == 0.0);
    CHECK_THROWS_AS(empirical_objective(Distribution({0.5, 0.5, 0.0}), ref, counts,
                                        std::vector<double>(3, 0.0), 1.0),
                    DomainError);
}

TEST_CASE("batch optimal policy maximizes the empirical objective") {
    Rng rng(5);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 4;
        const Distribution ref(rng.simplex(n));
        const auto counts = BatchCounts::from_samples(sample_group(ref, 6, rng), n);
        std::vector<double> a(n);
        for (auto& x : a) x = rng.uniform(-2.0, 2.0);
        const double beta = rng.uniform(0.3, 3.0);
        const auto hat = batch_optimal_policy(ref, counts, a, beta).policy;
        const double top = empirical_objective(hat, ref, counts, a, beta);
        for (int k = 0; k < 10; ++k) {
            std::vector<double> z(n);
            for (std::size_t i = 0; i < n; ++i) z[i] = std::log(hat[i]) + rng.uniform(-0.3, 0.3);
            CHECK(empirical_objective(Distribution::from_logits(z), ref, counts, a, beta) <= top + 1e-12);
        }

        // Central differences along simplex directions e_i - e_0; round-off limits them to ~1e-7.
        double norm2 = 0.0;
        for (std::size_t i = 1; i < n; ++i) {
            auto up = hat.vector();
            auto down = hat.vector();
            up[i] += 1e-6;
            up[0] -= 1e-6;
            down[i] -= 1e-6;
            down[0] += 1e-6;
            const double d = (empirical_objective(Distribution(up), ref, counts, a, beta) -
                              empirical_objective(Distribution(down), ref, counts, a, beta)) / 2e-6;
            norm2 += d * d;
        }
        CHECK(std::sqrt(norm2) < 1e-6);

        // Analytic gradient projected onto the simplex tangent space.
        const auto grad = empirical_objective_gradient(hat, ref, counts, a, beta);
        double mean = 0.0;
        for (double g : grad) mean += g / static_cast<double>(n);
        double proj = 0.0;
        for (double g : grad) proj += (g - mean) * (g - mean);
        CHECK(std::sqrt(proj) < 1e-7);
    }
}

TEST_CASE("kl divergence") {
    const Distribution p({0.5, 0.5});
    CHECK(kl_divergence(p, p) == 0.0);
    CHECK(kl_divergence(Distribution({1.0, 0.0}), p) == doctest::Approx(std::log(2.0)));
    CHECK_THROWS_AS(kl_divergence(p, Distribution({1.0, 0.0})), DomainError);
}
