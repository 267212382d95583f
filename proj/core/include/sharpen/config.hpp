#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sharpen/advantage.hpp"
#include "sharpen/dlc.hpp"
#include "sharpen/mode_space.hpp"
#include "sharpen/optimizer.hpp"

namespace sharpen {

enum class ExperimentKind {
    SamplingBias,
    SemanticCoupling,
    EstimatorAblation,
    OptimizerAblation,
    Mitigation,
    Custom
};

std::string_view to_string(ExperimentKind k);
ExperimentKind parse_experiment(std::string_view name);

/// Siamese embedding variants, ordered from most to least similar to Persian.
enum class SimilarityVariant { High, Mid, Low };

std::string_view to_string(SimilarityVariant v);
SimilarityVariant parse_variant(std::string_view name);
std::vector<double> siamese_embedding(SimilarityVariant v);

struct QueryMode {
    std::string query;
    std::string mode;

    friend bool operator==(const QueryMode&, const QueryMode&) = default;
};

/// Default learning rate when the config leaves `lr` unset.
double default_learning_rate(OptimizerKind kind);

/// Memory learning rate when `memory_lr` is unset, for every optimizer kind.
inline constexpr double kDefaultMemoryLearningRate = 20.0;

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::SamplingBias;
    std::vector<std::string> modes;
    std::map<std::string, std::vector<double>> embeddings;
    std::string train_query;
    std::optional<std::string> held_out_query;
    std::vector<QueryMode> reward_map;
    std::vector<QueryMode> tracked;
    std::size_t steps = 500;
    std::size_t group_size = 8;
    Estimator estimator = Estimator::Raw;
    /// learning_rate here is ignored; see learning_rate below.
    OptimizerConfig optimizer{};
    std::optional<double> learning_rate;
    /// 0 disables the KL penalty toward the initial policy.
    double kl_beta = 0.0;
    double iac_alpha = 0.0;
    bool dlc_enabled = false;
    double dlc_mu = 0.5;
    std::optional<double> memory_lr;
    /// Memory optimizer kind; unset means the policy's kind.
    std::optional<OptimizerKind> memory_optimizer;
    std::vector<std::uint64_t> seeds;
    std::optional<SimilarityVariant> variant;

    /// Toy four-class setup: modes Cat, Persian, Dog, Siamese, trained on Persian with
    /// Cat and Persian rewarded. Every kind shares it; they differ in steps, tracking and grids.
    static ExperimentConfig preset(ExperimentKind kind);

    /// Embeddings with the similarity variant applied to the Siamese query.
    std::map<std::string, std::vector<double>> resolved_embeddings() const;
    std::size_t mode_index(const std::string& mode) const;
    bool rewarded(const std::string& query, std::size_t mode) const;
    /// Policy optimizer with the learning rate resolved against the per-optimizer default.
    OptimizerConfig policy_optimizer() const;
    /// Memory uses the policy's optimizer kind and hyperparameters with its own learning rate.
    CalibrationConfig calibration() const;

    /// Applies one key=value assignment; throws ConfigError naming the key on bad input.
    void set(std::string_view key, std::string_view value);
    /// Throws ConfigError when invariants fail.
    void validate() const;
};

/// Ordered list of (key, values) axes; the sweep is their cartesian product, last axis fastest.
struct Grid {
    std::vector<std::pair<std::string, std::vector<std::string>>> axes;

    bool empty() const noexcept { return axes.empty(); }
    std::size_t size() const;
};

struct GridPoint {
    ExperimentConfig config;
    /// key=value assignments that produced this point, in axis order.
    std::vector<std::pair<std::string, std::string>> assignments;
};

struct ConfigFile {
    ExperimentConfig config;
    Grid grid;
};

/// Flat key = value text with optional [grid] section, or a JSON object with an optional
/// "grid" member mapping keys to arrays. The `experiment` key, if present, selects the preset
/// the remaining keys override.
ConfigFile parse_config(std::string_view text);
ConfigFile load_config(const std::filesystem::path& path);
Grid load_grid(const std::filesystem::path& path);

std::vector<GridPoint> expand_grid(const ExperimentConfig& base, const Grid& grid);

}  // namespace sharpen
