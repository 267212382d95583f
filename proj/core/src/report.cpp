#include "sharpen/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "sharpen/csv.hpp"
#include "sharpen/errors.hpp"

namespace sharpen {

namespace {

const char* const kKeyColumns[] = {"estimator", "optimizer", "G", "alpha", "mu", "variant"};

double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    if (lo == hi) return v[lo];
    if (std::isinf(v[lo]) || std::isinf(v[hi])) return v[hi];
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::vector<std::string> point_labels(const std::filesystem::path& dir, std::size_t rows) {
    std::vector<std::string> labels(rows);
    const auto manifest = dir / "manifest.csv";
    if (!std::filesystem::exists(manifest)) return labels;
    const auto t = read_csv(manifest);
    if (t.rows.size() != rows) return labels;
    const auto col = t.column("point");
    for (std::size_t i = 0; i < rows; ++i) labels[i] = t.rows[i][col];
    return labels;
}

}  // namespace

std::vector<GroupSummary> summarize(const std::filesystem::path& summary_csv) {
    const auto t = read_csv(summary_csv);
    const auto points = point_labels(summary_csv.parent_path(), t.rows.size());
    std::vector<GroupSummary> groups;
    std::vector<std::vector<double>> steps;
    std::vector<std::vector<double>> entropies;
    std::map<std::vector<std::pair<std::string, std::string>>, std::size_t> index;

    const auto c_collapse = t.column("collapse_step");
    const auto c_winner = t.column("winner");
    const auto c_entropy = t.column("final_entropy");
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        std::vector<std::pair<std::string, std::string>> key;
        if (!points[r].empty()) key.emplace_back("point", points[r]);
        for (const char* c : kKeyColumns) key.emplace_back(c, row[t.column(c)]);
        auto [it, inserted] = index.try_emplace(key, groups.size());
        if (inserted) {
            groups.push_back({key, 0, 0, std::nullopt, {}, 0.0});
            steps.emplace_back();
            entropies.emplace_back();
        }
        auto& g = groups[it->second];
        ++g.runs;
        if (!row[c_collapse].empty()) {
            ++g.collapsed;
            steps[it->second].push_back(std::stod(row[c_collapse]));
        } else {
            steps[it->second].push_back(std::numeric_limits<double>::infinity());
        }
        entropies[it->second].push_back(std::stod(row[c_entropy]));
        auto w = std::find_if(g.winners.begin(), g.winners.end(),
                              [&](const auto& p) { return p.first == row[c_winner]; });
        if (w == g.winners.end()) {
            g.winners.emplace_back(row[c_winner], 1);
        } else {
            ++w->second;
        }
    }
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const double m = quantile(steps[i], 0.5);
        if (std::isfinite(m)) groups[i].median_collapse_step = m;
        groups[i].median_final_entropy = quantile(entropies[i], 0.5);
    }
    return groups;
}

std::string format_summary_table(const std::vector<GroupSummary>& groups) {
    std::ostringstream out;
    if (groups.empty()) return "no runs\n";
    for (const auto& [k, v] : groups.front().key) out << std::left << std::setw(14) << k;
    out << std::setw(8) << "runs" << std::setw(11) << "collapsed" << std::setw(17)
        << "median_collapse" << std::setw(15) << "median_entropy" << "winners\n";
    for (const auto& g : groups) {
        for (const auto& [k, v] : g.key) out << std::setw(14) << (v.empty() ? "-" : v);
        out << std::setw(8) << g.runs << std::setw(11) << g.collapsed << std::setw(17)
            << (g.median_collapse_step ? format_double(*g.median_collapse_step) : "none")
            << std::setw(15) << std::setprecision(4) << g.median_final_entropy;
        std::string w;
        for (const auto& [name, n] : g.winners) w += (w.empty() ? "" : " ") + name + ":" + std::to_string(n);
        out << w << "\n";
    }
    return out.str();
}

std::string write_report(const std::filesystem::path& dir) {
    const auto groups = summarize(dir / "summary.csv");

    std::string s;
    if (!groups.empty()) {
        for (const auto& [k, v] : groups.front().key) s += k + ",";
    }
    s += "runs,collapsed,collapse_rate,median_collapse_step,median_final_entropy,winners\n";
    for (const auto& g : groups) {
        for (const auto& [k, v] : g.key) s += v + ",";
        std::string w;
        for (const auto& [name, n] : g.winners) w += (w.empty() ? "" : ";") + name + ":" + std::to_string(n);
        s += std::to_string(g.runs) + "," + std::to_string(g.collapsed) + "," +
             format_double(static_cast<double>(g.collapsed) / static_cast<double>(g.runs)) + "," +
             (g.median_collapse_step ? format_double(*g.median_collapse_step) : "") + "," +
             format_double(g.median_final_entropy) + "," + w + "\n";
    }
    write_text(dir / "report_summary.csv", s);

    // Per-point, per-step quartiles of every run column.
    const auto manifest = read_csv(dir / "manifest.csv");
    std::map<std::string, std::vector<std::string>> files;
    std::vector<std::string> order;
    for (const auto& row : manifest.rows) {
        const auto& p = row[manifest.column("point")];
        if (!files.contains(p)) order.push_back(p);
        files[p].push_back(row[manifest.column("file")]);
    }
    std::string curves = "point,column,step,median,q25,q75\n";
    for (const auto& p : order) {
        std::vector<RunSeries> runs;
        for (const auto& f : files[p]) runs.push_back(read_run_csv(dir / f));
        const auto& cols = runs.front().columns;
        for (std::size_t c = 1; c < cols.size(); ++c) {
            for (std::size_t r = 0; r < runs.front().rows.size(); ++r) {
                std::vector<double> v;
                for (const auto& run : runs) {
                    if (r < run.rows.size() && run.rows[r][c]) v.push_back(*run.rows[r][c]);
                }
                if (v.empty()) continue;
                curves += p + "," + cols[c] + "," + format_double(*runs.front().rows[r][0]) + "," +
                          format_double(quantile(v, 0.5)) + "," + format_double(quantile(v, 0.25)) +
                          "," + format_double(quantile(v, 0.75)) + "\n";
            }
        }
    }
    write_text(dir / "report_curves.csv", curves);
    return format_summary_table(groups);
}

}  // namespace sharpen
