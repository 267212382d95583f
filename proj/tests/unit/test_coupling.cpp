#include <cmath>

#include <doctest.h>

#include "sharpen/config.hpp"
#include "sharpen/coupling.hpp"
#include "sharpen/errors.hpp"

using namespace sharpen;

namespace {

Eigen::MatrixXd k22() {
    Eigen::MatrixXd k(2, 2);
    k << 2, 1, 1, 2;
    return k;
}

}  // namespace

TEST_CASE("exact logit shift examples") {
    const TargetShiftVector y({1.0, 0.0});
    Eigen::VectorXd seen(2);
    seen << 2, 1;
    Eigen::VectorXd unseen(2);
    unseen << 1, 1;
    CHECK(exact_logit_shift(k22(), seen, y) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(exact_logit_shift(k22(), unseen, y) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    const Eigen::MatrixXd k = structured_kernel(5, 3.0, 0.5);
    for (int s = 0; s < 5; ++s) {
        std::vector<double> e(5, 0.0);
        e[s] = 0.7;
        CHECK(exact_logit_shift(k, k.row(s).transpose(), TargetShiftVector(e)) ==
              doctest::Approx(0.7).epsilon(1e-12));
    }
}

TEST_CASE("exact logit shift on a singular kernel") {
    Eigen::MatrixXd k = Eigen::MatrixXd::Ones(2, 2);
    Eigen::VectorXd kp(2);
    kp << 1, 1;
    // Falls back to a small jitter and still returns a finite value.
    CHECK(std::isfinite(exact_logit_shift(k, kp, TargetShiftVector({1.0, 0.0}))));
    CHECK_THROWS_AS(exact_logit_shift(Eigen::MatrixXd::Zero(2, 2), kp, TargetShiftVector({1.0, 0.0})),
                    NumericalError);
    CHECK_THROWS_AS(TargetShiftVector({-1.0}), ParameterError);
}

TEST_CASE("shift bounds on the exact two-sample envelope") {
    const KernelEnvelope env{2.0, 2.0, 1.0, 1.0, 1.0};
    CHECK(env.diagonally_dominant());
    CHECK(env.uniform());
    const TargetShiftVector y({1.0, 0.0});
    CHECK(logit_shift_bound(env, y, 2, UnseenMode{}) == doctest::Approx(1.0 / 3.0));
    CHECK(logit_shift_bound(env, y, 2, SeenMode{0, 1}) == doctest::Approx(2.0 / 3.0));
    const TargetShiftVector zero({0.0, 0.0});
    CHECK(logit_shift_bound(env, zero, 2, UnseenMode{}) == 0.0);
    CHECK(logit_shift_bound(env, zero, 2, SeenMode{0, 1}) == 0.0);

    const KernelEnvelope bad{1.0, 1.0, 2.0, 2.0, 1.0};
    CHECK_THROWS_AS(logit_shift_bound(bad, y, 2, UnseenMode{}), DomainError);
}

TEST_CASE("suppression ratio") {
    const KernelEnvelope env{2.0, 2.0, 1.0, 1.0, 1.0};
    const auto r = suppression_ratio(env, TargetShiftVector({1.0, 0.0}), 2, 0, 1);
    CHECK(r.general == doctest::Approx(2.0));
    REQUIRE(r.simplified.has_value());
    CHECK(*r.simplified == doctest::Approx(2.0));
    CHECK_THROWS_AS(suppression_ratio(env, TargetShiftVector({0.0, 0.0}), 2, 0, 1), DomainError);

    // Concentrating more of the target mass on k raises the ratio.
    const KernelEnvelope e4{3.0, 3.0, 1.0, 1.0, 0.5};
    double prev = -1e300;
    for (double share : {0.25, 0.5, 0.75, 1.0}) {
        const double rest = (1.0 - share) / 3.0;
        const auto s = suppression_ratio(e4, TargetShiftVector({share, rest, rest, rest}), 4, 0, 1);
        CHECK(s.general > prev);
        prev = s.general;
    }
}

TEST_CASE("envelope from a kernel") {
    Eigen::MatrixXd k(3, 3);
    k << 4, 1, 2, 1, 3, 0.5, 2, 0.5, 5;
    const auto env = KernelEnvelope::from_kernel(k, 0.8);
    CHECK(env.lambda_min == 3);
    CHECK(env.lambda_max == 5);
    CHECK(env.rho_min == 0.5);
    CHECK(env.rho_max == 2);
    CHECK(env.transfer_decay == 0.8);
    CHECK(env.diagonally_dominant());
    CHECK_FALSE(env.uniform());
}

TEST_CASE("target shifts from a batch") {
    const RolloutBatch b("q", {0, 0, 1, 2}, {1, 1, 0, 0}, 3);
    const auto adv = estimate_advantages(b, Estimator::Normalized);
    const auto y = TargetShiftVector::from_batch(b, adv, 2.0);
    CHECK(y.values[0] == doctest::Approx(2.0 * 1.0 / 8.0));
    CHECK(y.values[2] == doctest::Approx(1.0 / 8.0));
    CHECK(y.total == doctest::Approx(0.75));
}

TEST_CASE("batch kernel rows for duplicate samples coincide") {
    std::vector<double> w(8);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.1 * static_cast<double>(i);
    const LinearSoftmaxPolicy p(4, 2, w);
    const QueryEmbedding q("q", {0.6, 0.8});
    const std::vector<std::size_t> samples = {1, 3, 1};
    const auto bk = batch_kernel(p, q, samples);
    CHECK(bk.jacobian.row(0) == bk.jacobian.row(2));
    CHECK(bk.kernel(0, 0) == bk.kernel(2, 2));
    CHECK(bk.kernel(0, 2) == bk.kernel(0, 0));
    CHECK(bk.kernel(0, 0) == doctest::Approx(1.0));
    CHECK(bk.kernel(0, 1) == 0.0);
    const auto kp = cross_kernel(p, QueryEmbedding("t", {1.0, 0.0}), 1, q, samples);
    CHECK(kp(0) == doctest::Approx(0.6));
    CHECK(kp(1) == 0.0);
}

TEST_CASE("alignment on the toy embeddings") {
    const LinearSoftmaxPolicy p(4, 4);
    const QueryEmbedding persian("Persian", {0.75, 0.5, 0.25, 0.1});
    const std::vector<std::size_t> modes = {0, 1, 2, 3};
    const auto self = alignment_stats(p, persian, persian, modes);
    CHECK(self.eta_hat == doctest::Approx(1.0));
    CHECK(self.assumption1_holds);

    const QueryEmbedding left("a", {1.0, 0.0, 0.0, 0.0});
    const QueryEmbedding right("b", {0.0, 1.0, 0.0, 0.0});
    const auto orth = alignment_stats(p, left, right, modes);
    CHECK(orth.eta_hat == doctest::Approx(0.0));
    CHECK(orth.cross_min == 0.0);

    double prev = 2.0;
    for (auto v : {SimilarityVariant::High, SimilarityVariant::Mid, SimilarityVariant::Low}) {
        const QueryEmbedding siamese("Siamese", siamese_embedding(v));
        const auto a = alignment_stats(p, persian, siamese, modes);
        CHECK(a.eta_hat < prev);
        CHECK(a.assumption1_holds);
        prev = a.eta_hat;
    }
}
