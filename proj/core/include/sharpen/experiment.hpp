#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sharpen/config.hpp"

namespace sharpen {

struct StepRow {
    std::size_t step;                 // 1-based, recorded after the update
    std::vector<double> tracked;      // in ExperimentConfig::tracked order
    double entropy;                   // of the train-query policy
    std::optional<double> z_prime;    // batch Z' against the pre-update policy
    double iac_scale;
    bool degenerate;                  // normalizing std was zero
    std::optional<double> held_out_argmax;  // 1 if the held-out argmax is rewarded
    std::vector<double> memory_tracked;     // memory probabilities when DLC is on
};

struct RunRecord {
    std::uint64_t seed;
    std::size_t point = 0;            // grid position
    ExperimentConfig config;
    std::vector<StepRow> rows;

    std::optional<std::size_t> collapse_step;  // 1-based step number
    std::vector<double> final_probs;
    std::string winner;
    double final_entropy;

    /// Max over tracked train-query probabilities, one entry per step.
    std::vector<double> collapse_series() const;
};

/// Runs the shared training loop for one seed: forward, (calibrated) sampling, rewards,
/// advantages, optional IAC, policy gradient, optimizer step, then the memory update.
RunRecord run_experiment(const ExperimentConfig& config, std::uint64_t seed);

/// Worker count from SHARPEN_WORKERS, else hardware concurrency.
unsigned default_workers();

/// Every (point, seed) run, sorted by grid position then seed order in the config.
std::vector<RunRecord> run_points(const std::vector<GridPoint>& points, unsigned workers = 0);
std::vector<RunRecord> run_seeds(const ExperimentConfig& config, unsigned workers = 0);

std::vector<RunRecord> run_sampling_bias(const ExperimentConfig& config, unsigned workers = 0);
std::vector<RunRecord> run_semantic_coupling(const ExperimentConfig& config, unsigned workers = 0);
std::vector<RunRecord> run_mitigation(const ExperimentConfig& config, unsigned workers = 0);

struct OptimizerAblationRow {
    OptimizerKind optimizer;
    std::size_t group_size;
    std::optional<double> median_collapse_step;
    double collapse_rate;
};

/// Same config across SGD, Momentum and AdamW for each group size.
std::vector<OptimizerAblationRow> run_optimizer_ablation(const ExperimentConfig& config,
                                                         const std::vector<std::size_t>& group_sizes,
                                                         unsigned workers = 0);

/// Median collapse step with non-collapsing runs counted as +infinity; absent when the
/// median itself is censored.
std::optional<double> median_collapse_step(const std::vector<RunRecord>& runs);
double collapse_rate(const std::vector<RunRecord>& runs);

}  // namespace sharpen
