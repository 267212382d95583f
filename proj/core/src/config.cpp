#include "sharpen/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sharpen/csv.hpp"
#include "sharpen/errors.hpp"

namespace sharpen {

namespace {

std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        const auto piece = trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (!piece.empty()) out.emplace_back(piece);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

[[noreturn]] void bad(std::string_view key, std::string_view value, std::string_view why) {
    throw ConfigError("config key '" + std::string(key) + "' = '" + std::string(value) + "': " +
                      std::string(why));
}

double to_double(std::string_view key, std::string_view value) {
    const auto v = trim(value);
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
        bad(key, value, "expected a number");
    }
    return out;
}

std::uint64_t to_uint(std::string_view key, std::string_view value) {
    const auto v = trim(value);
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
        bad(key, value, "expected a non-negative integer");
    }
    return out;
}

bool to_bool(std::string_view key, std::string_view value) {
    const auto v = trim(value);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    bad(key, value, "expected a boolean");
}

std::vector<QueryMode> to_pairs(std::string_view key, std::string_view value) {
    std::vector<QueryMode> out;
    for (const auto& item : split(value, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) bad(key, value, "expected query:mode pairs");
        out.push_back({std::string(trim(std::string_view(item).substr(0, colon))),
                       std::string(trim(std::string_view(item).substr(colon + 1)))});
    }
    return out;
}

std::vector<std::uint64_t> to_seeds(std::string_view key, std::string_view value) {
    const auto v = trim(value);
    const auto dots = v.find("..");
    std::vector<std::uint64_t> out;
    if (dots != std::string_view::npos) {
        const auto lo = to_uint(key, v.substr(0, dots));
        const auto hi = to_uint(key, v.substr(dots + 2));
        if (hi < lo) bad(key, value, "empty seed range");
        for (auto s = lo; s <= hi; ++s) out.push_back(s);
        return out;
    }
    for (const auto& s : split(v, ',')) out.push_back(to_uint(key, s));
    return out;
}

ExperimentConfig toy_base() {
    ExperimentConfig c;
    c.modes = {"Cat", "Persian", "Dog", "Siamese"};
    c.embeddings = {
        {"Cat", {0.5, 0.5, 0.5, 0.1}},
        {"Persian", {0.75, 0.5, 0.25, 0.1}},
        {"Dog", {0.1, 0.1, 0.1, 0.9}},
        {"Siamese", siamese_embedding(SimilarityVariant::High)},
    };
    c.train_query = "Persian";
    c.reward_map = {{"Persian", "Cat"}, {"Persian", "Persian"}, {"Siamese", "Siamese"}};
    c.tracked = {{"Persian", "Cat"}, {"Persian", "Persian"}};
    for (std::uint64_t s = 0; s < 20; ++s) c.seeds.push_back(s);
    return c;
}

std::string json_scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return format_double(v.get<double>());
    if (v.is_array()) {
        std::string out;
        for (const auto& e : v) {
            if (!out.empty()) out += ',';
            out += json_scalar(e);
        }
        return out;
    }
    throw ConfigError("unsupported JSON value: " + v.dump());
}

void flatten_json(const nlohmann::json& obj, const std::string& prefix,
                  std::vector<std::pair<std::string, std::string>>& out) {
    for (const auto& [k, v] : obj.items()) {
        const std::string key = prefix.empty() ? k : prefix + "." + k;
        if (v.is_object()) {
            flatten_json(v, key, out);
        } else {
            out.emplace_back(key, json_scalar(v));
        }
    }
}

std::vector<std::string> grid_values(std::string_view value) {
    return split(value, value.find(';') != std::string_view::npos ? ';' : ',');
}

ConfigFile build(const std::vector<std::pair<std::string, std::string>>& entries,
                 const std::vector<std::pair<std::string, std::string>>& grid_entries) {
    ExperimentKind kind = ExperimentKind::SamplingBias;
    for (const auto& [k, v] : entries) {
        if (k == "experiment") kind = parse_experiment(trim(v));
    }
    ConfigFile out{ExperimentConfig::preset(kind), {}};
    for (const auto& [k, v] : entries) out.config.set(k, v);
    out.config.validate();
    for (const auto& [k, v] : grid_entries) {
        if (k == "experiment") throw ConfigError("the experiment kind cannot be a grid axis");
        auto values = grid_values(v);
        if (values.empty()) throw ConfigError("grid axis '" + k + "' has no values");
        out.grid.axes.emplace_back(k, std::move(values));
    }
    return out;
}

bool looks_like_json(std::string_view text) {
    const auto t = trim(text);
    return !t.empty() && t.front() == '{';
}

}  // namespace

std::string_view to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::SamplingBias: return "sampling_bias";
        case ExperimentKind::SemanticCoupling: return "semantic_coupling";
        case ExperimentKind::EstimatorAblation: return "estimator_ablation";
        case ExperimentKind::OptimizerAblation: return "optimizer_ablation";
        case ExperimentKind::Mitigation: return "mitigation";
        case ExperimentKind::Custom: return "custom";
    }
    return "unknown";
}

ExperimentKind parse_experiment(std::string_view name) {
    for (auto k : {ExperimentKind::SamplingBias, ExperimentKind::SemanticCoupling,
                   ExperimentKind::EstimatorAblation, ExperimentKind::OptimizerAblation,
                   ExperimentKind::Mitigation, ExperimentKind::Custom}) {
        if (to_string(k) == name) return k;
    }
    throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

std::string_view to_string(SimilarityVariant v) {
    switch (v) {
        case SimilarityVariant::High: return "high";
        case SimilarityVariant::Mid: return "mid";
        case SimilarityVariant::Low: return "low";
    }
    return "unknown";
}

SimilarityVariant parse_variant(std::string_view name) {
    if (name == "high") return SimilarityVariant::High;
    if (name == "mid") return SimilarityVariant::Mid;
    if (name == "low") return SimilarityVariant::Low;
    throw ConfigError("unknown similarity variant '" + std::string(name) + "'");
}

std::vector<double> siamese_embedding(SimilarityVariant v) {
    switch (v) {
        case SimilarityVariant::High: return {0.25, 0.5, 0.75, 0.1};
        case SimilarityVariant::Mid: return {0.1, 0.5, 0.9, 0.1};
        case SimilarityVariant::Low: return {0.0, 0.5, 1.0, 0.1};
    }
    return {};
}

double default_learning_rate(OptimizerKind kind) {
    switch (kind) {
        case OptimizerKind::SGD: return 3.0;
        case OptimizerKind::Momentum: return 3.0;
        case OptimizerKind::AdamW: return 0.2;
    }
    return 3.0;
}

ExperimentConfig ExperimentConfig::preset(ExperimentKind kind) {
    ExperimentConfig c = toy_base();
    c.experiment = kind;
    switch (kind) {
        case ExperimentKind::SamplingBias:
        case ExperimentKind::Custom:
            break;
        case ExperimentKind::SemanticCoupling:
            c.held_out_query = "Siamese";
            c.tracked.push_back({"Siamese", "Siamese"});
            c.variant = SimilarityVariant::High;
            c.estimator = Estimator::Normalized;
            break;
        case ExperimentKind::EstimatorAblation:
        case ExperimentKind::OptimizerAblation:
            c.steps = 2000;
            break;
        case ExperimentKind::Mitigation:
            c.steps = 2000;
            c.iac_alpha = 1.0;
            c.dlc_enabled = true;
            break;
    }
    return c;
}

std::map<std::string, std::vector<double>> ExperimentConfig::resolved_embeddings() const {
    auto out = embeddings;
    if (variant) {
        out["Siamese"] = siamese_embedding(*variant);
    }
    return out;
}

std::size_t ExperimentConfig::mode_index(const std::string& mode) const {
    const auto it = std::find(modes.begin(), modes.end(), mode);
    if (it == modes.end()) throw ConfigError("unknown mode '" + mode + "'");
    return static_cast<std::size_t>(it - modes.begin());
}

bool ExperimentConfig::rewarded(const std::string& query, std::size_t mode) const {
    return std::any_of(reward_map.begin(), reward_map.end(), [&](const QueryMode& qm) {
        return qm.query == query && qm.mode == modes[mode];
    });
}

OptimizerConfig ExperimentConfig::policy_optimizer() const {
    OptimizerConfig o = optimizer;
    o.learning_rate = learning_rate.value_or(default_learning_rate(optimizer.kind));
    return o;
}

CalibrationConfig ExperimentConfig::calibration() const {
    CalibrationConfig c;
    c.mu = dlc_mu;
    c.memory_optimizer = policy_optimizer();
    if (memory_optimizer) c.memory_optimizer.kind = *memory_optimizer;
    c.memory_optimizer.learning_rate =
        memory_lr.value_or(kDefaultMemoryLearningRate);
    return c;
}

void ExperimentConfig::set(std::string_view raw_key, std::string_view raw_value) {
    const auto key = trim(raw_key);
    const auto value = trim(raw_value);
    if (key == "experiment") {
        experiment = parse_experiment(value);
    } else if (key == "modes") {
        modes = split(value, ',');
    } else if (key.starts_with("embedding.")) {
        std::vector<double> v;
        for (const auto& x : split(value, ',')) v.push_back(to_double(key, x));
        embeddings[std::string(key.substr(10))] = std::move(v);
    } else if (key == "train_query") {
        train_query = value;
    } else if (key == "held_out_query") {
        if (value.empty() || value == "none") {
            held_out_query.reset();
        } else {
            held_out_query = std::string(value);
        }
    } else if (key == "reward_map") {
        reward_map = to_pairs(key, value);
    } else if (key == "tracked") {
        tracked = to_pairs(key, value);
    } else if (key == "steps") {
        steps = to_uint(key, value);
    } else if (key == "group_size") {
        group_size = to_uint(key, value);
    } else if (key == "estimator") {
        estimator = parse_estimator(value);
    } else if (key == "optimizer") {
        optimizer.kind = parse_optimizer(value);
    } else if (key == "lr") {
        learning_rate = to_double(key, value);
    } else if (key == "momentum") {
        optimizer.momentum = to_double(key, value);
    } else if (key == "adam_b1") {
        optimizer.beta1 = to_double(key, value);
    } else if (key == "adam_b2") {
        optimizer.beta2 = to_double(key, value);
    } else if (key == "adam_eps") {
        optimizer.eps = to_double(key, value);
    } else if (key == "weight_decay") {
        optimizer.weight_decay = to_double(key, value);
    } else if (key == "kl_beta") {
        kl_beta = to_double(key, value);
    } else if (key == "iac_alpha") {
        iac_alpha = to_double(key, value);
    } else if (key == "dlc_enabled") {
        dlc_enabled = to_bool(key, value);
    } else if (key == "dlc_mu") {
        dlc_mu = to_double(key, value);
    } else if (key == "memory_lr") {
        memory_lr = to_double(key, value);
    } else if (key == "memory_optimizer") {
        if (value.empty() || value == "policy") {
            memory_optimizer.reset();
        } else {
            memory_optimizer = parse_optimizer(value);
        }
    } else if (key == "seeds") {
        seeds = to_seeds(key, value);
    } else if (key == "variant") {
        if (value.empty() || value == "none") {
            variant.reset();
        } else {
            variant = parse_variant(value);
        }
    } else {
        throw ConfigError("unknown config key '" + std::string(key) + "'");
    }
}

void ExperimentConfig::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("invalid config: " + msg); };
    if (steps < 1) fail("steps must be >= 1");
    if (group_size < 1) fail("group_size must be >= 1");
    if (seeds.empty()) fail("seeds must be non-empty");
    if (modes.empty()) fail("modes must be non-empty");
    if (std::set<std::string>(modes.begin(), modes.end()).size() != modes.size()) {
        fail("duplicate mode names");
    }
    const auto emb = resolved_embeddings();
    std::optional<std::size_t> dim;
    for (const auto& [name, v] : emb) {
        if (v.empty()) fail("embedding '" + name + "' is empty");
        if (dim && *dim != v.size()) fail("embedding '" + name + "' has a different dimension");
        dim = v.size();
    }
    auto check_query = [&](const std::string& q) {
        if (!emb.contains(q)) fail("query '" + q + "' has no embedding");
        if (std::none_of(reward_map.begin(), reward_map.end(),
                         [&](const QueryMode& qm) { return qm.query == q; })) {
            fail("reward_map has no entry for query '" + q + "'");
        }
    };
    check_query(train_query);
    if (held_out_query) check_query(*held_out_query);
    for (const auto& qm : reward_map) {
        if (!emb.contains(qm.query)) fail("reward_map query '" + qm.query + "' has no embedding");
        if (std::find(modes.begin(), modes.end(), qm.mode) == modes.end()) {
            fail("reward_map mode '" + qm.mode + "' is not a mode");
        }
    }
    bool tracks_train = false;
    for (const auto& qm : tracked) {
        if (!emb.contains(qm.query)) fail("tracked query '" + qm.query + "' has no embedding");
        if (std::find(modes.begin(), modes.end(), qm.mode) == modes.end()) {
            fail("tracked mode '" + qm.mode + "' is not a mode");
        }
        tracks_train = tracks_train || qm.query == train_query;
    }
    if (!tracks_train) fail("at least one tracked pair must use the train query");
    if (estimator == Estimator::RLOO && group_size < 2) fail("rloo needs group_size >= 2");
    if (!(kl_beta >= 0.0)) fail("kl_beta must be >= 0");
    if (!(iac_alpha >= 0.0)) fail("iac_alpha must be >= 0");
    if (memory_lr && !(*memory_lr > 0.0)) fail("memory_lr must be positive");
    try {
        policy_optimizer().validate();
        calibration().validate();
    } catch (const ParameterError& e) {
        fail(e.what());
    }
}

std::size_t Grid::size() const {
    std::size_t n = 1;
    for (const auto& [k, v] : axes) n *= v.size();
    return n;
}

ConfigFile parse_config(std::string_view text) {
    std::vector<std::pair<std::string, std::string>> entries;
    std::vector<std::pair<std::string, std::string>> grid;
    if (looks_like_json(text)) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("invalid JSON config: ") + e.what());
        }
        if (!j.is_object()) throw ConfigError("JSON config must be an object");
        for (const auto& [k, v] : j.items()) {
            if (k == "grid") {
                if (!v.is_object()) throw ConfigError("JSON grid must be an object");
                for (const auto& [gk, gv] : v.items()) {
                    std::string joined;
                    const char sep = gv.is_array() && std::any_of(gv.begin(), gv.end(), [](const auto& e) {
                        return e.is_array() || (e.is_string() && e.template get<std::string>().find(',') != std::string::npos);
                    }) ? ';' : ',';
                    if (gv.is_array()) {
                        for (const auto& e : gv) {
                            if (!joined.empty()) joined += sep;
                            joined += json_scalar(e);
                        }
                    } else {
                        joined = json_scalar(gv);
                    }
                    grid.emplace_back(gk, joined);
                }
            } else if (v.is_object()) {
                flatten_json(v, k, entries);
            } else {
                entries.emplace_back(k, json_scalar(v));
            }
        }
        return build(entries, grid);
    }

    bool in_grid = false;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto body = trim(std::string_view(line).substr(0, line.find('#')));
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body == "[grid]") {
                in_grid = true;
                continue;
            }
            throw ConfigError("line " + std::to_string(lineno) + ": unknown section " +
                              std::string(body));
        }
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        }
        auto& target = in_grid ? grid : entries;
        target.emplace_back(std::string(trim(body.substr(0, eq))),
                            std::string(trim(body.substr(eq + 1))));
    }
    return build(entries, grid);
}

ConfigFile load_config(const std::filesystem::path& path) {
    return parse_config(read_text(path));
}

Grid load_grid(const std::filesystem::path& path) {
    auto text = read_text(path);
    // A bare grid file: every key is an axis.
    if (looks_like_json(text)) {
        if (text.find("\"grid\"") == std::string::npos) text = "{\"grid\": " + text + "}";
    } else if (text.find("[grid]") == std::string::npos) {
        text = "[grid]\n" + text;
    }
    return parse_config(text).grid;
}

std::vector<GridPoint> expand_grid(const ExperimentConfig& base, const Grid& grid) {
    std::vector<GridPoint> points;
    const std::size_t total = grid.size();
    for (std::size_t idx = 0; idx < total; ++idx) {
        GridPoint p{base, {}};
        std::size_t rem = idx;
        std::vector<std::size_t> pick(grid.axes.size());
        for (std::size_t a = grid.axes.size(); a-- > 0;) {
            pick[a] = rem % grid.axes[a].second.size();
            rem /= grid.axes[a].second.size();
        }
        for (std::size_t a = 0; a < grid.axes.size(); ++a) {
            const auto& [key, values] = grid.axes[a];
            p.config.set(key, values[pick[a]]);
            p.assignments.emplace_back(key, values[pick[a]]);
        }
        p.config.validate();
        points.push_back(std::move(p));
    }
    return points;
}

}  // namespace sharpen
