#include <benchmark/benchmark.h>

#include "sharpen/coupling.hpp"
#include "sharpen/experiment.hpp"
#include "sharpen/theory.hpp"

using namespace sharpen;

namespace {

void BM_TrainingRun(benchmark::State& state) {
    auto c = ExperimentConfig::preset(ExperimentKind::SamplingBias);
    c.steps = static_cast<std::size_t>(state.range(0));
    c.group_size = static_cast<std::size_t>(state.range(1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_experiment(c, 0));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrainingRun)->Args({500, 8})->Args({500, 64});

void BM_CalibratedRun(benchmark::State& state) {
    auto c = ExperimentConfig::preset(ExperimentKind::Mitigation);
    c.steps = 500;
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_experiment(c, 0));
    }
    state.SetItemsProcessed(state.iterations() * 500);
}
BENCHMARK(BM_CalibratedRun);

void BM_SeedSweep(benchmark::State& state) {
    auto c = ExperimentConfig::preset(ExperimentKind::SamplingBias);
    const auto workers = static_cast<unsigned>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_seeds(c, workers));
    }
}
BENCHMARK(BM_SeedSweep)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_ExactLogitShift(benchmark::State& state) {
    const auto g = static_cast<std::size_t>(state.range(0));
    const Eigen::MatrixXd k = structured_kernel(g, 3.0, 1.0);
    const Eigen::VectorXd kp = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(g), 0.5);
    const TargetShiftVector y(std::vector<double>(g, 0.1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(exact_logit_shift(k, kp, y));
    }
}
BENCHMARK(BM_ExactLogitShift)->RangeMultiplier(2)->Range(2, 64);

void BM_BatchOptimalPolicy(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const Distribution ref = Distribution::uniform(n);
    std::vector<std::size_t> counts(n, 0);
    counts[0] = 4;
    counts[1] = 4;
    std::vector<double> a(n, -1.0);
    a[0] = 1.0;
    const BatchCounts bc(counts, 8);
    for (auto _ : state) {
        benchmark::DoNotOptimize(batch_optimal_policy(ref, bc, a, 0.5));
    }
}
BENCHMARK(BM_BatchOptimalPolicy)->Arg(4)->Arg(256);

}  // namespace
BENCHMARK_MAIN();
