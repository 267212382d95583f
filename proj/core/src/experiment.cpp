#include "sharpen/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "sharpen/collapse.hpp"
#include "sharpen/errors.hpp"
#include "sharpen/policy.hpp"
#include "sharpen/theory.hpp"

namespace sharpen {

namespace {

struct TrackedIndex {
    std::size_t query;  // index into the run's query list
    std::size_t mode;
};

}  // namespace

std::vector<double> RunRecord::collapse_series() const {
    std::vector<double> series;
    series.reserve(rows.size());
    for (const auto& row : rows) {
        double m = 0.0;
        for (std::size_t i = 0; i < config.tracked.size(); ++i) {
            if (config.tracked[i].query == config.train_query) m = std::max(m, row.tracked[i]);
        }
        series.push_back(m);
    }
    return series;
}

RunRecord run_experiment(const ExperimentConfig& config, std::uint64_t seed) {
    config.validate();
    const auto emb = config.resolved_embeddings();
    const std::size_t num_modes = config.modes.size();
    const std::size_t dim = emb.begin()->second.size();

    // Queries referenced by the run, each embedded once.
    std::vector<QueryEmbedding> queries;
    auto query_index = [&](const std::string& name) {
        for (std::size_t i = 0; i < queries.size(); ++i) {
            if (queries[i].name() == name) return i;
        }
        queries.emplace_back(name, emb.at(name));
        return queries.size() - 1;
    };
    const std::size_t train = query_index(config.train_query);
    std::optional<std::size_t> held_out;
    if (config.held_out_query) held_out = query_index(*config.held_out_query);
    std::vector<TrackedIndex> tracked;
    for (const auto& qm : config.tracked) {
        tracked.push_back({query_index(qm.query), config.mode_index(qm.mode)});
    }

    std::size_t num_correct = 0;
    for (std::size_t o = 0; o < num_modes; ++o) {
        if (config.rewarded(config.train_query, o)) ++num_correct;
    }
    // Labels are unused without binary stats, so the split only fixes the size.
    const ModeSpace space(std::max<std::size_t>(num_correct, 1),
                          num_modes - std::max<std::size_t>(num_correct, 1));

    LinearSoftmaxPolicy policy(num_modes, dim);
    Optimizer optimizer(config.policy_optimizer(), policy.parameter_count());
    std::optional<MemoryModel> memory;
    if (config.dlc_enabled) {
        const auto cal = config.calibration();
        memory.emplace(num_modes, dim, cal.memory_optimizer);
    }
    const auto& q = queries[train];
    const Distribution pi_init = policy.forward(q).dist;
    std::optional<KlPenalty> kl;
    if (config.kl_beta > 0.0) kl = KlPenalty{config.kl_beta, pi_init};
    const double z_beta = config.kl_beta > 0.0 ? config.kl_beta : 1.0;

    Rng rng(seed);
    RunRecord rec{seed, 0, config, {}, std::nullopt, {}, {}, 0.0};
    rec.rows.reserve(config.steps);

    for (std::size_t step = 1; step <= config.steps; ++step) {
        const auto out = policy.forward(q);
        Distribution sample_dist = out.dist;
        if (memory && config.dlc_mu != 0.0) {
            sample_dist = Distribution::from_logits(
                calibrated_logits(out.logits, memory->logits(q), config.dlc_mu));
        }
        auto samples = sample_group(sample_dist, config.group_size, rng);
        std::vector<double> rewards;
        rewards.reserve(samples.size());
        for (auto o : samples) rewards.push_back(config.rewarded(config.train_query, o) ? 1.0 : 0.0);
        const RolloutBatch batch(config.train_query, samples, rewards, num_modes);

        std::optional<GlobalRewardStats> global;
        if (config.estimator == Estimator::ReinforcePP) {
            global = GlobalRewardStats::from_batches(std::span<const RolloutBatch>(&batch, 1));
        }
        auto adv = estimate_advantages(batch, config.estimator, global);
        const double scale =
            iac_scale(batch.group_size(), batch.success_set().size(), config.iac_alpha);
        if (config.iac_alpha != 0.0) adv = iac_calibrate(adv, batch, config.iac_alpha);

        StepRow row{step, {}, 0.0, std::nullopt, scale, adv.degenerate, std::nullopt, {}};
        try {
            row.z_prime = z_prime_report(out.dist, batch.counts(), space,
                                         adv.per_mode(batch, num_modes), z_beta)
                              .z_prime;
        } catch (const std::exception&) {
            // Left blank when not computable.
        }

        const auto grad = pg_gradient(policy, q, batch, adv, kl);
        optimizer.step(policy.parameters(), grad);

        if (memory) {
            std::vector<Observation> obs;
            obs.reserve(samples.size());
            for (auto o : samples) obs.push_back({&q, o});
            memory->update(obs);
        }

        std::vector<Distribution> dists;
        dists.reserve(queries.size());
        for (const auto& qq : queries) dists.push_back(policy.forward(qq).dist);
        for (const auto& t : tracked) row.tracked.push_back(dists[t.query][t.mode]);
        row.entropy = entropy(dists[train]);
        if (held_out) {
            const auto& d = dists[*held_out];
            const auto best = static_cast<std::size_t>(
                std::max_element(d.probs().begin(), d.probs().end()) - d.probs().begin());
            row.held_out_argmax = config.rewarded(*config.held_out_query, best) ? 1.0 : 0.0;
        }
        if (memory) {
            for (const auto& t : tracked) {
                row.memory_tracked.push_back(memory->distribution(queries[t.query])[t.mode]);
            }
        }
        rec.rows.push_back(std::move(row));
    }

    const auto series = rec.collapse_series();
    if (const auto idx = detect_collapse(series)) rec.collapse_step = *idx + 1;
    const auto& last = rec.rows.back();
    rec.final_probs = last.tracked;
    rec.final_entropy = last.entropy;
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < tracked.size(); ++i) {
        if (config.tracked[i].query != config.train_query) continue;
        if (!best || last.tracked[i] > last.tracked[*best] ||
            (last.tracked[i] == last.tracked[*best] && tracked[i].mode < tracked[*best].mode)) {
            best = i;
        }
    }
    rec.winner = config.tracked[*best].mode;
    return rec;
}

unsigned default_workers() {
    if (const char* env = std::getenv("SHARPEN_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
        throw ConfigError("SHARPEN_WORKERS must be a positive integer");
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<RunRecord> run_points(const std::vector<GridPoint>& points, unsigned workers) {
    struct Task {
        std::size_t point;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (std::size_t p = 0; p < points.size(); ++p) {
        points[p].config.validate();
        for (auto s : points[p].config.seeds) tasks.push_back({p, s});
    }
    std::vector<std::optional<RunRecord>> results(tasks.size());
    if (workers == 0) workers = default_workers();
    workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(tasks.size(), 1)));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            try {
                auto rec = run_experiment(points[tasks[i].point].config, tasks[i].seed);
                rec.point = tasks[i].point;
                results[i] = std::move(rec);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    std::vector<RunRecord> out;
    out.reserve(results.size());
    for (auto& r : results) out.push_back(std::move(*r));
    return out;
}

std::vector<RunRecord> run_seeds(const ExperimentConfig& config, unsigned workers) {
    return run_points({GridPoint{config, {}}}, workers);
}

std::vector<RunRecord> run_sampling_bias(const ExperimentConfig& config, unsigned workers) {
    return run_seeds(config, workers);
}

std::vector<RunRecord> run_semantic_coupling(const ExperimentConfig& config, unsigned workers) {
    if (!config.held_out_query) {
        throw ConfigError("semantic coupling needs a held_out_query");
    }
    if (*config.held_out_query == config.train_query) {
        throw ConfigError("the held-out query must differ from the train query");
    }
    return run_seeds(config, workers);
}

std::vector<RunRecord> run_mitigation(const ExperimentConfig& config, unsigned workers) {
    if (!(config.iac_alpha > 0.0) && !config.dlc_enabled) {
        throw ConfigError("mitigation needs iac_alpha > 0 or dlc_enabled");
    }
    return run_seeds(config, workers);
}

std::vector<OptimizerAblationRow> run_optimizer_ablation(const ExperimentConfig& config,
                                                         const std::vector<std::size_t>& group_sizes,
                                                         unsigned workers) {
    std::vector<GridPoint> points;
    const OptimizerKind kinds[] = {OptimizerKind::SGD, OptimizerKind::Momentum, OptimizerKind::AdamW};
    for (auto g : group_sizes) {
        for (auto k : kinds) {
            GridPoint p{config, {}};
            p.config.group_size = g;
            p.config.optimizer.kind = k;
            points.push_back(std::move(p));
        }
    }
    const auto runs = run_points(points, workers);
    std::vector<OptimizerAblationRow> table;
    for (std::size_t p = 0; p < points.size(); ++p) {
        std::vector<RunRecord> subset;
        for (const auto& r : runs) {
            if (r.point == p) subset.push_back(r);
        }
        table.push_back({points[p].config.optimizer.kind, points[p].config.group_size,
                         median_collapse_step(subset), collapse_rate(subset)});
    }
    return table;
}

std::optional<double> median_collapse_step(const std::vector<RunRecord>& runs) {
    if (runs.empty()) return std::nullopt;
    std::vector<double> v;
    for (const auto& r : runs) {
        v.push_back(r.collapse_step ? static_cast<double>(*r.collapse_step)
                                    : std::numeric_limits<double>::infinity());
    }
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    const double m = n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    if (!std::isfinite(m)) return std::nullopt;
    return m;
}

double collapse_rate(const std::vector<RunRecord>& runs) {
    if (runs.empty()) return 0.0;
    const auto n = std::count_if(runs.begin(), runs.end(),
                                 [](const RunRecord& r) { return r.collapse_step.has_value(); });
    return static_cast<double>(n) / static_cast<double>(runs.size());
}

}  // namespace sharpen
