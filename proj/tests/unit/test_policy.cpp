#include <cmath>

#include <doctest.h>

#include "sharpen/errors.hpp"
#include "sharpen/policy.hpp"
#include "sharpen/theory.hpp"

using namespace sharpen;

TEST_CASE("linear softmax policy forward") {
    const LinearSoftmaxPolicy zero(4, 4);
    const QueryEmbedding q("q", {0.75, 0.5, 0.25, 0.1});
    const auto out = zero.forward(q);
    for (std::size_t i = 0; i < 4; ++i) CHECK(out.dist[i] == doctest::Approx(0.25));

    const LinearSoftmaxPolicy p(2, 2, {1.0, 0.0, 0.0, 1.0});
    const QueryEmbedding e("e", {2.0, 1.0});
    CHECK(p.logits(e) == std::vector<double>{2.0, 1.0});
    CHECK_THROWS_AS(p.logits(q), StructuralError);
    CHECK_THROWS_AS(LinearSoftmaxPolicy(2, 2, {1.0}), StructuralError);
}

TEST_CASE("logit gradient is the outer product with the embedding") {
    const LinearSoftmaxPolicy p(3, 2);
    const QueryEmbedding e("e", {2.0, -1.0});
    const auto g = p.logit_gradient(e, 1);
    CHECK(g == std::vector<double>{0, 0, 2, -1, 0, 0});
}

TEST_CASE("sample_group follows the inverse CDF") {
    Rng rng(1);
    const auto s = sample_group(Distribution({0.0, 1.0, 0.0}), 16, rng);
    for (auto o : s) CHECK(o == 1);
    const Distribution d({0.2, 0.5, 0.3});
    std::vector<double> freq(3, 0.0);
    const auto many = sample_group(d, 100000, rng);
    for (auto o : many) freq[o] += 1.0 / 100000.0;
    for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(freq[i] - d[i]) < 0.01);
    CHECK_THROWS_AS(sample_group(d, 0, rng), ParameterError);
}

TEST_CASE("sampling is reproducible from a seed") {
    Rng a(99);
    Rng b(99);
    const Distribution d({0.1, 0.2, 0.3, 0.4});
    CHECK(sample_group(d, 50, a) == sample_group(d, 50, b));
}

TEST_CASE("pg gradient matches finite differences with and without KL") {
    Rng rng(7);
    for (int t = 0; t < 40; ++t) {
        std::vector<double> w(12);
        for (auto& x : w) x = rng.uniform(-1.0, 1.0);
        const LinearSoftmaxPolicy p(3, 4, w);
        const QueryEmbedding q("q", {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), 0.3});
        const RolloutBatch b("q", sample_group(p.forward(q).dist, 5, rng), {1, 0, 1, 0, 0}, 3);
        const auto adv = estimate_advantages(b, Estimator::Normalized);
        std::optional<KlPenalty> kl;
        if (t % 2) kl = KlPenalty{0.5, Distribution({0.2, 0.3, 0.5})};
        const auto g = pg_gradient(p, q, b, adv, kl);
        for (std::size_t i = 0; i < w.size(); ++i) {
            auto up = w;
            auto dn = w;
            up[i] += 1e-6;
            dn[i] -= 1e-6;
            const double fd = (pg_objective(LinearSoftmaxPolicy(3, 4, up).forward(q).dist, b, adv, kl) -
                               pg_objective(LinearSoftmaxPolicy(3, 4, dn).forward(q).dist, b, adv, kl)) /
                              2e-6;
            CHECK(g[i] == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
        }
    }
}

TEST_CASE("pg logit gradient is the mean of A (onehot - pi)") {
    const Distribution pi({0.25, 0.25, 0.5});
    const RolloutBatch b("q", {0, 2}, {1, 0}, 3);
    const AdvantageVector adv{{1.0, -1.0}, Estimator::Raw};
    const auto g = pg_logit_gradient(pi, b, adv);
    CHECK(g[0] == doctest::Approx(0.5 * (1 - 0.25) + 0.5 * 0.25));
    CHECK(g[1] == doctest::Approx(0.0));
    CHECK(g[2] == doctest::Approx(0.5 * (-0.5) - 0.5 * 0.5));
    CHECK_THROWS_AS(pg_logit_gradient(pi, b, AdvantageVector{{1.0}, Estimator::Raw}), StructuralError);
}

TEST_CASE("tabular policy isolates queries") {
    TabularPolicy t(2, 3);
    t.set_logits(1, std::vector<double>{1.0, 2.0, 3.0});
    CHECK(t.forward(0).dist[0] == doctest::Approx(1.0 / 3.0));
    const auto g = t.parameter_gradient(1, std::vector<double>{1.0, 1.0, 1.0});
    CHECK(g == std::vector<double>{0, 0, 0, 1, 1, 1});
    CHECK_THROWS_AS(t.logits(2), StructuralError);
}

TEST_CASE("mirror step equals geometric interpolation toward the batch target") {
    TabularPolicy t(1, 3);
    t.set_logits(0, std::vector<double>{0.3, -0.2, 0.1});
    const auto pi_t = t.forward(0).dist;
    const Distribution ref({0.4, 0.4, 0.2});
    const BatchCounts counts({2, 2, 0}, 4);
    const std::vector<double> a = {1.0, -1.0, 0.0};
    const double beta = 2.0;
    const double eta = 0.3;
    const auto hat = batch_optimal_policy(ref, counts, a, beta).policy;
    functional_mirror_step(t, 0, counts, a, beta, ref, eta);
    const auto expect = geometric_interpolation(pi_t, hat, eta * beta);
    for (std::size_t i = 0; i < 3; ++i) CHECK(t.forward(0).dist[i] == doctest::Approx(expect[i]).epsilon(1e-12));
}

TEST_CASE("ascending the surrogate gradient reaches the batch target") {
    TabularPolicy t(1, 3);
    const Distribution ref({0.4, 0.4, 0.2});
    const std::vector<double> counts = {2.0, 2.0, 0.0};
    const std::vector<double> a = {1.0, -1.0, 0.0};
    for (int it = 0; it < 3000; ++it) {
        const auto g = surrogate_logit_gradient(t.forward(0).dist, ref, counts, 4.0, a, 1.0);
        auto z = t.logits(0);
        for (int i = 0; i < 3; ++i) z[i] += 2.0 * g[i];
        t.set_logits(0, z);
    }
    const auto hat = batch_optimal_policy(ref, counts, 4.0, a, 1.0).policy;
    CHECK(total_variation(t.forward(0).dist, hat) < 1e-9);
}
