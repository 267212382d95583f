#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sharpen/experiment.hpp"

namespace sharpen {

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

std::string run_csv(const RunRecord& record);
/// step, iac_scale, degenerate, held-out argmax, memory probabilities.
std::string run_extra_csv(const RunRecord& record);
std::string summary_csv(const std::vector<RunRecord>& records);
std::string run_file_stem(const RunRecord& record);

/// Writes run_<point>_seed<seed>.csv (+ _extra.csv), summary.csv and manifest.csv into dir.
void emit_csv(const std::vector<RunRecord>& records, const std::filesystem::path& dir);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;
};

CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::filesystem::path& path);

/// Numeric view of a run CSV: empty cells become nullopt.
struct RunSeries {
    std::vector<std::string> columns;
    std::vector<std::vector<std::optional<double>>> rows;
};

RunSeries read_run_csv(const std::filesystem::path& path);

}  // namespace sharpen
