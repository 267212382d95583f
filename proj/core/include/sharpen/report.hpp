#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sharpen {

struct GroupSummary {
    std::vector<std::pair<std::string, std::string>> key;  // estimator, optimizer, G, alpha, mu, variant
    std::size_t runs;
    std::size_t collapsed;
    std::optional<double> median_collapse_step;
    std::vector<std::pair<std::string, std::size_t>> winners;
    double median_final_entropy;
};

/// Groups summary.csv rows by configuration columns.
std::vector<GroupSummary> summarize(const std::filesystem::path& summary_csv);

/// Fixed-width text table of the group summaries.
std::string format_summary_table(const std::vector<GroupSummary>& groups);

/// Writes report_summary.csv and report_curves.csv (per-point per-step medians of every
/// run column) into dir, returning the printed table.
std::string write_report(const std::filesystem::path& dir);

}  // namespace sharpen
