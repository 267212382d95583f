#include <filesystem>

#include <doctest.h>

#include "sharpen/csv.hpp"
#include "sharpen/report.hpp"

using namespace sharpen;

TEST_CASE("report groups runs by configuration") {
    auto base = ExperimentConfig::preset(ExperimentKind::SamplingBias);
    base.steps = 60;
    base.seeds = {0, 1, 2};
    Grid grid;
    grid.axes.push_back({"group_size", {"2", "4"}});
    const auto runs = run_points(expand_grid(base, grid), 2);
    REQUIRE(runs.size() == 6);
    const auto dir = std::filesystem::temp_directory_path() / "sharpen_test_report";
    std::filesystem::remove_all(dir);
    emit_csv(runs, dir);

    const auto groups = summarize(dir / "summary.csv");
    REQUIRE(groups.size() == 2);
    for (const auto& g : groups) CHECK(g.runs == 3);
    const auto table = write_report(dir);
    CHECK(table.find("G") != std::string::npos);
    const auto curves = read_csv(dir / "report_curves.csv");
    CHECK(curves.header == std::vector<std::string>{"point", "column", "step", "median", "q25", "q75"});
    CHECK(!curves.rows.empty());
    CHECK(std::filesystem::exists(dir / "report_summary.csv"));
    std::filesystem::remove_all(dir);
}
