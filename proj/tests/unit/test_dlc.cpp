#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "sharpen/config.hpp"
#include "sharpen/dlc.hpp"
#include "sharpen/errors.hpp"
#include "sharpen/experiment.hpp"

using namespace sharpen;

TEST_CASE("calibrated logits examples") {
    const std::vector<double> ft = {2.0, 0.0};
    const std::vector<double> fp = {1.0, -1.0};
    const auto f = calibrated_logits(ft, fp, 0.5);
    CHECK(f == std::vector<double>{1.5, 0.5});
    const auto pi = Distribution::from_logits(f);
    CHECK(pi[0] == doctest::Approx(0.73106).epsilon(1e-5));
    CHECK(pi[1] == doctest::Approx(0.26894).epsilon(1e-5));

    CHECK(calibrated_logits(ft, fp, 0.0) == ft);
    const auto same = Distribution::from_logits(calibrated_logits(ft, ft, 1.0));
    CHECK(same[0] == doctest::Approx(0.5));
    CHECK_THROWS_AS(calibrated_logits(ft, std::vector<double>{1.0}, 0.5), StructuralError);
}

TEST_CASE("memory on a point mass sharpens toward it") {
    MemoryModel m(3, 2, {OptimizerKind::SGD, 0.5});
    const QueryEmbedding q("q", {1.0, 0.5});
    const Observation ob{&q, 2};
    double prev = m.distribution(q)[2];
    for (int i = 0; i < 200; ++i) {
        m.update(std::span<const Observation>(&ob, 1));
        const double now = m.distribution(q)[2];
        CHECK(now > prev);
        prev = now;
    }
    CHECK(prev > 0.95);
    // Unobserved logits never rise relative to the observed one.
    const auto f = m.logits(q);
    CHECK(f[0] < f[2]);
    CHECK(f[1] < f[2]);
    CHECK_THROWS_AS(m.update({}), StructuralError);
}

TEST_CASE("memory tracks a stationary sampling distribution") {
    const Distribution p({0.5, 0.3, 0.15, 0.05});
    MemoryModel m(4, 1, {OptimizerKind::SGD, 0.02});
    const QueryEmbedding q("q", {1.0});
    Rng rng(5);
    std::vector<Observation> batch(8, Observation{&q, 0});
    for (int t = 0; t < 10000; ++t) {
        for (auto& ob : batch) {
            const double u = rng.uniform();
            double c = 0.0;
            ob.mode = 3;
            for (std::size_t i = 0; i < 4; ++i) {
                c += p[i];
                if (u < c) {
                    ob.mode = i;
                    break;
                }
            }
        }
        m.update(batch);
    }
    CHECK(total_variation(m.distribution(q), p) < 0.05);
}

TEST_CASE("calibration config validation") {
    CalibrationConfig c;
    c.mu = -0.1;
    CHECK_THROWS_AS(c.validate(), ParameterError);
    c.mu = 0.5;
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("calibrated sampling keeps more entropy than plain sampling") {
    // Median final entropy over 20 seeds, toy setup, SGD defaults.
    auto cfg = ExperimentConfig::preset(ExperimentKind::SamplingBias);
    cfg.steps = 300;
    auto calibrated = cfg;
    calibrated.dlc_enabled = true;
    calibrated.dlc_mu = 0.5;
    auto median_entropy = [](const std::vector<RunRecord>& runs) {
        std::vector<double> h;
        for (const auto& r : runs) h.push_back(r.final_entropy);
        std::sort(h.begin(), h.end());
        return 0.5 * (h[9] + h[10]);
    };
    const double base = median_entropy(run_seeds(cfg));
    const double dlc = median_entropy(run_seeds(calibrated));
    CHECK(dlc > base);
}
