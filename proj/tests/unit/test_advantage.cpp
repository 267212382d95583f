#include <cmath>
#include <numeric>

#include <doctest.h>

#include "sharpen/advantage.hpp"
#include "sharpen/errors.hpp"
#include "sharpen/random.hpp"

using namespace sharpen;

namespace {

RolloutBatch batch_of(std::vector<double> rewards) {
    std::vector<std::size_t> samples;
    for (double r : rewards) samples.push_back(r == 1.0 ? 0 : 1);
    return RolloutBatch("q", samples, std::move(rewards), 2);
}

}  // namespace

TEST_CASE("rollout batch statistics") {
    const RolloutBatch b("q", {0, 1, 2, 0}, {1, 1, 0, 1}, 3);
    CHECK(b.group_size() == 4);
    CHECK(b.p_plus() == 0.75);
    CHECK(b.sigma() == doctest::Approx(std::sqrt(0.75 * 0.25)));
    CHECK(b.success_set() == std::vector<std::size_t>{0, 1, 3});
    CHECK(b.failure_set() == std::vector<std::size_t>{2});
    CHECK(b.counts()[0] == 2);
    CHECK_THROWS_AS(RolloutBatch("q", {0, 1}, {1.0}, 2), StructuralError);
    CHECK_THROWS_AS(RolloutBatch("q", {0}, {0.5}, 2), ParameterError);
}

TEST_CASE("estimator examples") {
    const auto n = estimate_advantages(batch_of({1, 1, 0, 0}), Estimator::Normalized);
    CHECK(n.values == std::vector<double>{1, 1, -1, -1});
    CHECK_FALSE(n.degenerate);

    const auto r = estimate_advantages(batch_of({1, 0, 0, 0}), Estimator::RLOO);
    CHECK(r[0] == doctest::Approx(1.0));
    CHECK(r[1] == doctest::Approx(-1.0 / 3.0));

    const auto raw = estimate_advantages(batch_of({1, 0, 1}), Estimator::Raw);
    CHECK(raw.values == std::vector<double>{1, 0, 1});

    const auto ms = estimate_advantages(batch_of({1, 0, 0, 0}), Estimator::MeanShifted);
    CHECK(ms[0] == doctest::Approx(0.75));
    CHECK(ms[1] == doctest::Approx(-0.25));
}

TEST_CASE("uniform batches carry no centered signal") {
    for (double v : {0.0, 1.0}) {
        const auto b = batch_of({v, v, v, v});
        for (auto e : {Estimator::MeanShifted, Estimator::Normalized, Estimator::RLOO}) {
            const auto a = estimate_advantages(b, e);
            for (double x : a.values) CHECK(x == 0.0);
        }
        CHECK(estimate_advantages(b, Estimator::Normalized).degenerate);
    }
}

TEST_CASE("estimator errors") {
    CHECK_THROWS_AS(estimate_advantages(batch_of({1}), Estimator::RLOO), ParameterError);
    CHECK_THROWS_AS(estimate_advantages(batch_of({1, 0}), Estimator::ReinforcePP), ParameterError);
    CHECK_THROWS(parse_estimator("grpo"));
    CHECK(parse_estimator("reinforce_pp") == Estimator::ReinforcePP);
    CHECK(to_string(Estimator::MeanShifted) == "mean_shifted");
}

TEST_CASE("reinforce++ uses global statistics") {
    const std::vector<RolloutBatch> batches = {batch_of({1, 1}), batch_of({0, 0})};
    const auto g = GlobalRewardStats::from_batches(batches);
    CHECK(g.mean == 0.5);
    CHECK(g.std == 0.5);
    const auto a = estimate_advantages(batches[0], Estimator::ReinforcePP, g);
    CHECK(a.values == std::vector<double>{1.0, 1.0});
    // With a single group it reduces to group normalization.
    const auto one = batch_of({1, 0, 0});
    const auto single = GlobalRewardStats::from_batches(std::span<const RolloutBatch>(&one, 1));
    const auto x = estimate_advantages(one, Estimator::ReinforcePP, single);
    const auto y = estimate_advantages(one, Estimator::Normalized);
    for (std::size_t i = 0; i < 3; ++i) CHECK(x[i] == doctest::Approx(y[i]));
}

TEST_CASE("normalized binary advantages are the closed-form pair") {
    Rng rng(21);
    for (int t = 0; t < 500; ++t) {
        const std::size_t g = 2 + static_cast<std::size_t>(rng.uniform_int(0, 14));
        std::vector<double> r(g);
        for (auto& x : r) x = rng.uniform() < 0.5 ? 1.0 : 0.0;
        const auto b = batch_of(r);
        if (b.sigma() == 0.0) continue;
        const auto a = estimate_advantages(b, Estimator::Normalized);
        const double ap = (1.0 - b.p_plus()) / b.sigma();
        const double am = -b.p_plus() / b.sigma();
        double sum_n = 0.0;
        double sum_m = 0.0;
        const auto m = estimate_advantages(b, Estimator::MeanShifted);
        for (std::size_t s = 0; s < g; ++s) {
            CHECK(a[s] == doctest::Approx(r[s] == 1.0 ? ap : am).epsilon(1e-12));
            sum_n += a[s];
            sum_m += m[s];
        }
        CHECK(std::abs(sum_n) < 1e-9);
        CHECK(std::abs(sum_m) < 1e-9);
    }
}

TEST_CASE("iac calibration") {
    const auto b = batch_of({1, 1, 0, 0, 0, 0, 0, 0});
    AdvantageVector adv{{0.75, 0.75, -0.25, -0.25, -0.25, -0.25, -0.25, -0.25}, Estimator::MeanShifted};
    const auto same = iac_calibrate(adv, b, 0.0);
    CHECK(same.values == adv.values);
    const auto one = iac_calibrate(adv, b, 1.0);
    CHECK(one[0] == doctest::Approx(4.5));
    CHECK(one[2] == -0.25);
    CHECK(iac_scale(8, 2, 1.5) == doctest::Approx(std::pow(6.0, 1.5)).epsilon(1e-15));
    CHECK(iac_scale(8, 2, 1.5) == doctest::Approx(14.6969).epsilon(1e-5));
    CHECK(iac_scale(4, 4, 1.0) == 0.0);
    CHECK_THROWS_AS(iac_scale(4, 1, -1.0), ParameterError);

    // Monotone in alpha for positive entries, identity elsewhere.
    double prev = 0.0;
    for (double alpha : {0.0, 0.5, 1.0, 2.0}) {
        const auto c = iac_calibrate(adv, b, alpha);
        CHECK(c[0] >= prev);
        prev = c[0];
        for (std::size_t s = 2; s < 8; ++s) CHECK(c[s] == adv[s]);
    }
}

TEST_CASE("per-mode advantages") {
    const RolloutBatch b("q", {2, 0, 2}, {0, 1, 0}, 4);
    const auto a = estimate_advantages(b, Estimator::Raw);
    CHECK(a.per_mode(b, 4) == std::vector<double>{1, 0, 0, 0});
}
