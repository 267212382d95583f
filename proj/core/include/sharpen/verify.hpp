#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sharpen {

struct CheckResult {
    std::string name;
    bool passed;
    std::size_t trials;
    std::size_t violations;
    std::string detail;
    double seconds;
};

/// optimal_policy never over-sharpens under binary advantages.
CheckResult check_optimal_policy_moderate(std::size_t trials, std::uint64_t seed = 1);
/// batch_optimal_policy against a finite-difference numerical maximizer of the surrogate.
CheckResult check_batch_optimal_policy(std::size_t trials, std::uint64_t seed = 2);
/// Z' lower bounds and unsampled-mode suppression.
CheckResult check_partition_bounds(std::size_t trials, std::uint64_t seed = 3);
/// Tabular mirror step equals geometric interpolation.
CheckResult check_mirror_step(std::size_t trials, std::uint64_t seed = 4);
/// Logit-shift bounds bracket exact shifts on structured kernels, plus the worked G=2 case.
CheckResult check_shift_bounds(std::size_t trials, std::uint64_t seed = 5);
/// Suppression ratio: uniform general form equals the closed form.
CheckResult check_suppression_ratio(std::size_t trials, std::uint64_t seed = 6);
/// Unseen-mode bound on general diagonally dominant kernels, when the bound's premises hold.
CheckResult check_envelope_premises(std::size_t trials, std::uint64_t seed = 7);
/// Inverse-probability advantages put the general Z' bound at exactly 1.
CheckResult check_idealized_reweighting(std::size_t trials, std::uint64_t seed = 8);
/// pg_gradient against central finite differences, with and without KL.
CheckResult check_pg_gradient(std::size_t trials, std::uint64_t seed = 9);
/// Kernel separability, non-negative alignment and decreasing transfer on the toy embeddings.
CheckResult check_toy_alignment();

/// CSV of alignment statistics for the Persian source against each Siamese variant.
std::string coupling_report_csv();

/// Runs "theory", "coupling" or "all"; trials scales every randomized check (0 = defaults).
std::vector<CheckResult> run_verify(std::string_view module, std::size_t trials = 0);

std::string format_check(const CheckResult& r);

}  // namespace sharpen
