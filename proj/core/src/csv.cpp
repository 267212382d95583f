#include "sharpen/csv.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "sharpen/errors.hpp"

namespace sharpen {

namespace {

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

double parse_number(const std::string& s, const std::string& where) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw IoError(where + ": not a number: '" + s + "'");
    }
    return v;
}

}  // namespace

std::string format_double(double v) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc()) throw IoError("cannot format double");
    return std::string(buf.data(), ptr);
}

std::string run_csv(const RunRecord& r) {
    std::string out = "step";
    for (const auto& t : r.config.tracked) out += "," + t.query + "." + t.mode;
    out += ",entropy,z_prime,collapse_flag\n";
    for (const auto& row : r.rows) {
        out += std::to_string(row.step);
        for (double p : row.tracked) out += "," + format_double(p);
        out += "," + format_double(row.entropy) + "," + cell(row.z_prime) + ",";
        out += r.collapse_step && row.step >= *r.collapse_step ? "1\n" : "0\n";
    }
    return out;
}

std::string run_extra_csv(const RunRecord& r) {
    std::string out = "step,iac_scale,degenerate,held_out_argmax";
    if (r.config.dlc_enabled) {
        for (const auto& t : r.config.tracked) out += ",memory." + t.query + "." + t.mode;
    }
    out += "\n";
    for (const auto& row : r.rows) {
        out += std::to_string(row.step) + "," + format_double(row.iac_scale) + "," +
               (row.degenerate ? "1" : "0") + "," + cell(row.held_out_argmax);
        for (double p : row.memory_tracked) out += "," + format_double(p);
        out += "\n";
    }
    return out;
}

std::string summary_csv(const std::vector<RunRecord>& records) {
    std::string out = "seed,estimator,optimizer,G,alpha,mu,variant,collapse_step,winner,final_entropy\n";
    for (const auto& r : records) {
        const auto& c = r.config;
        out += std::to_string(r.seed) + "," + std::string(to_string(c.estimator)) + "," +
               std::string(to_string(c.optimizer.kind)) + "," + std::to_string(c.group_size) + "," +
               format_double(c.iac_alpha) + "," + format_double(c.dlc_enabled ? c.dlc_mu : 0.0) +
               "," + (c.variant ? std::string(to_string(*c.variant)) : std::string()) + "," +
               (r.collapse_step ? std::to_string(*r.collapse_step) : std::string()) + "," +
               r.winner + "," + format_double(r.final_entropy) + "\n";
    }
    return out;
}

std::string run_file_stem(const RunRecord& r) {
    return "run_" + std::to_string(r.point) + "_seed" + std::to_string(r.seed);
}

void emit_csv(const std::vector<RunRecord>& records, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError(dir.string() + ": " + ec.message());
    std::string manifest = "point,seed,file\n";
    for (const auto& r : records) {
        const auto stem = run_file_stem(r);
        write_text(dir / (stem + ".csv"), run_csv(r));
        write_text(dir / (stem + "_extra.csv"), run_extra_csv(r));
        manifest += std::to_string(r.point) + "," + std::to_string(r.seed) + "," + stem + ".csv\n";
    }
    write_text(dir / "summary.csv", summary_csv(records));
    write_text(dir / "manifest.csv", manifest);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path.string() + ": cannot open for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError(path.string() + ": write failed");
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string() + ": cannot open for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw IoError("missing CSV column '" + name + "'");
}

CsvTable parse_csv(const std::string& text) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            const auto pos = line.find(',', start);
            cells.push_back(line.substr(start, pos == std::string::npos ? pos : pos - start));
            if (pos == std::string::npos) break;
            start = pos + 1;
        }
        if (first) {
            t.header = std::move(cells);
            first = false;
        } else {
            if (cells.size() != t.header.size()) {
                throw IoError("CSV row has " + std::to_string(cells.size()) + " cells, header has " +
                              std::to_string(t.header.size()));
            }
            t.rows.push_back(std::move(cells));
        }
    }
    return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
    try {
        return parse_csv(read_text(path));
    } catch (const IoError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

RunSeries read_run_csv(const std::filesystem::path& path) {
    const auto t = read_csv(path);
    RunSeries s{t.header, {}};
    for (const auto& row : t.rows) {
        std::vector<std::optional<double>> vals;
        for (const auto& c : row) {
            if (c.empty()) {
                vals.emplace_back();
            } else {
                vals.emplace_back(parse_number(c, path.string()));
            }
        }
        s.rows.push_back(std::move(vals));
    }
    return s;
}

}  // namespace sharpen
