// sharpen: run toy RLVR sharpening experiments, oracle checks and reports.

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "sharpen/config.hpp"
#include "sharpen/csv.hpp"
#include "sharpen/errors.hpp"
#include "sharpen/experiment.hpp"
#include "sharpen/report.hpp"
#include "sharpen/verify.hpp"

namespace fs = std::filesystem;
using namespace sharpen;

namespace {

std::vector<RunRecord> run_config_points(const std::vector<GridPoint>& points, unsigned workers) {
    for (const auto& p : points) {
        const auto& c = p.config;
        if (c.experiment == ExperimentKind::SemanticCoupling && !c.held_out_query) {
            throw ConfigError("semantic_coupling needs held_out_query");
        }
        if (c.experiment == ExperimentKind::Mitigation && !(c.iac_alpha > 0.0) && !c.dlc_enabled) {
            throw ConfigError("mitigation needs iac_alpha > 0 or dlc_enabled = true");
        }
    }
    return run_points(points, workers);
}

int finish_runs(const std::vector<RunRecord>& runs, const fs::path& out) {
    emit_csv(runs, out);
    std::cout << write_report(out);
    std::cout << "wrote " << runs.size() << " runs to " << out.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Toy simulator for over-sharpening in RL with verifiable rewards"};
    app.require_subcommand(1);
    app.footer("Environment: SHARPEN_WORKERS sets the number of parallel runs "
               "(default: hardware concurrency).");

    std::string config_path;
    std::string grid_path;
    std::string out_dir = "out";
    std::string in_dir;
    std::string module = "all";
    std::string csv_path;
    std::size_t trials = 0;
    unsigned workers = 0;

    auto* simulate = app.add_subcommand("simulate", "Run every seed (and grid point) of a config");
    simulate->add_option("--config", config_path, "Config file (key = value or JSON)")
        ->required()->check(CLI::ExistingFile);
    simulate->add_option("--out", out_dir, "Output directory for CSV files")->capture_default_str();
    simulate->add_option("--workers", workers, "Parallel runs (0: SHARPEN_WORKERS or all cores)");

    auto* verify = app.add_subcommand("verify", "Run the randomized oracle checks");
    verify->add_option("--module", module, "Which checks to run")
        ->check(CLI::IsMember({"theory", "coupling", "all"}))->capture_default_str();
    verify->add_option("--trials", trials, "Trials per randomized check (0: defaults)");
    verify->add_option("--csv", csv_path,
                       "Write the coupling assumption report here instead of stdout");

    auto* sweep = app.add_subcommand("sweep", "Run a config over the cartesian product of a grid");
    sweep->add_option("--config", config_path, "Base config file")->required()->check(CLI::ExistingFile);
    sweep->add_option("--grid", grid_path, "Grid file: key = v1,v2,... per axis (';' when values contain commas)")
        ->required()->check(CLI::ExistingFile);
    sweep->add_option("--out", out_dir, "Output directory for CSV files")->capture_default_str();
    sweep->add_option("--workers", workers, "Parallel runs (0: SHARPEN_WORKERS or all cores)");

    auto* report = app.add_subcommand("report", "Summarize a simulate/sweep output directory");
    report->add_option("--in", in_dir, "Directory containing summary.csv")
        ->required()->check(CLI::ExistingDirectory);

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            const auto file = load_config(config_path);
            file.config.validate();
            return finish_runs(run_config_points(expand_grid(file.config, file.grid), workers), out_dir);
        }
        if (sweep->parsed()) {
            auto file = load_config(config_path);
            Grid grid = file.grid;
            for (auto& axis : load_grid(grid_path).axes) grid.axes.push_back(std::move(axis));
            return finish_runs(run_config_points(expand_grid(file.config, grid), workers), out_dir);
        }
        if (report->parsed()) {
            std::cout << write_report(in_dir);
            std::cout << "wrote report_summary.csv and report_curves.csv to " << in_dir << "\n";
            return 0;
        }
        if (verify->parsed()) {
            bool all_ok = true;
            for (const auto& r : run_verify(module, trials)) {
                std::cout << format_check(r) << "\n";
                all_ok = all_ok && r.passed;
            }
            if (module != "theory") {
                const auto csv = coupling_report_csv();
                if (csv_path.empty()) {
                    std::cout << csv;
                } else {
                    write_text(csv_path, csv);
                }
            }
            return all_ok ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
