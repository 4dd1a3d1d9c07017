#ifndef CFSIM_EXPERIMENTS_HPP
#define CFSIM_EXPERIMENTS_HPP

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "cfsim/aquila.hpp"
#include "cfsim/channel.hpp"
#include "cfsim/clustering.hpp"
#include "cfsim/config.hpp"
#include "cfsim/csv.hpp"
#include "cfsim/ddpg.hpp"
#include "cfsim/env.hpp"
#include "cfsim/objective.hpp"
#include "cfsim/random_search.hpp"
#include "cfsim/rng.hpp"
#include "cfsim/svg.hpp"

namespace cfsim {

// One fully wired problem instance: channels, serving clusters, evaluator and
// environment all referencing each other. Heap-allocated so the internal
// references stay stable.
struct InstanceBundle {
    ChannelTensor channels;
    ClusterMap cluster;
    PhyConfig phy;
    ObjectiveWeights weights;
    std::optional<Evaluator> evaluator;
    std::optional<AllocationEnv> env;

    InstanceBundle(ChannelTensor ch, ClusterMap cl, const PhyConfig& p, const ObjectiveWeights& w)
        : channels(std::move(ch)), cluster(std::move(cl)), phy(p), weights(w) {}
};

inline std::unique_ptr<InstanceBundle> build_instance(const ExperimentConfig& cfg,
                                                      std::uint64_t seed) {
    DeploymentConfig dep = cfg.deployment;
    dep.seed = seed;
    const Deployment geo = generate_deployment(dep);
    ChannelTensor channels = generate_cfr(geo, cfg.fading, dep);
    ClusterMap cluster = select_serving_aps(channels, cfg.cluster_size);
    auto bundle = std::make_unique<InstanceBundle>(std::move(channels), std::move(cluster),
                                                   cfg.resolved_phy(), cfg.weights);
    bundle->evaluator.emplace(bundle->channels, bundle->cluster, bundle->phy, bundle->weights);
    bundle->env.emplace(*bundle->evaluator, cfg.horizon);
    return bundle;
}

namespace detail {

// Runs the jobs on up to hardware_concurrency threads and joins them all
// before returning. Jobs must only touch their own slots.
inline void run_jobs(std::vector<std::function<void()>>& jobs) {
    if (jobs.empty()) return;
    std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, jobs.size());
    if (workers == 1) {
        for (auto& job : jobs) job();
        return;
    }
    std::atomic<std::size_t> next{0};
    auto drain = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            jobs[i]();
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(drain);
    for (auto& th : pool) th.join();
}

inline std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
    std::size_t n = 0;
};

inline MeanStd mean_std(const std::vector<double>& xs) {
    MeanStd r;
    r.n = xs.size();
    if (xs.empty()) return r;
    double acc = 0.0;
    for (double x : xs) acc += x;
    r.mean = acc / static_cast<double>(xs.size());
    double sq = 0.0;
    for (double x : xs) sq += (x - r.mean) * (x - r.mean);
    r.std = std::sqrt(sq / static_cast<double>(xs.size()));
    return r;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace detail

struct SolverRun {
    SolverKind solver = SolverKind::ao;
    std::uint64_t seed = 0;
    std::vector<MetricsRow> rows;
    std::string error;  // nonempty when the run failed

    bool failed() const { return !error.empty(); }
};

struct SolverSummary {
    SolverKind solver = SolverKind::ao;
    std::size_t runs = 0;  // successful runs
    detail::MeanStd objective;
    detail::MeanStd total_se;
    detail::MeanStd gini;
};

struct CompareOutput {
    std::vector<SolverRun> runs;               // seed-major, solver order ao, rlm, hym
    std::vector<std::string> hash_comments;    // one per seed, identical in every CSV
    std::vector<SolverSummary> summary;        // order ao, rlm, hym
    std::vector<std::filesystem::path> files;  // written artifacts
};

namespace detail {

inline SolverRun run_one_solver(const ExperimentConfig& cfg, SolverKind kind, std::uint64_t seed,
                                const InstanceBundle& instance, bool with_timing) {
    SolverRun run;
    run.solver = kind;
    run.seed = seed;
    try {
        TrainTrace trace;
        if (kind == SolverKind::ao) {
            trace = ao_optimize(*instance.evaluator, cfg.ao, seed).trace;
        } else if (kind == SolverKind::rlm) {
            trace = ddpg_train(*instance.env, cfg.ddpg, cfg.episodes, seed).trace;
        } else {
            trace = hybrid_train(*instance.env, cfg.ddpg, cfg.hybrid_inner, cfg.episodes, seed).trace;
        }
        trace.check_monotone();
        run.rows = rows_from_trace(cfg.experiment_id, solver_name(kind), seed, trace, with_timing);
    } catch (const std::exception& e) {
        run.rows.clear();
        run.error = e.what();
    }
    return run;
}

}  // namespace detail

// Runs all three solvers per seed on one shared channel snapshot, writes one
// CSV per solver plus a joint summary of the final-iteration metrics.
inline CompareOutput run_compare(const ExperimentConfig& cfg, bool with_timing = false) {
    cfg.validate();
    const std::vector<SolverKind> kinds = {SolverKind::ao, SolverKind::rlm, SolverKind::hym};
    CompareOutput out;
    out.runs.resize(cfg.seeds.size() * kinds.size());
    out.hash_comments.resize(cfg.seeds.size());

    std::vector<std::function<void()>> jobs;
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
        jobs.push_back([&, i] {
            const std::uint64_t seed = cfg.seeds[i];
            const auto instance = build_instance(cfg, seed);
            out.hash_comments[i] = "channel_hash seed=" + std::to_string(seed) + " hash=" +
                                   detail::hex64(instance->channels.content_hash());
            for (std::size_t j = 0; j < kinds.size(); ++j)
                out.runs[i * kinds.size() + j] =
                    detail::run_one_solver(cfg, kinds[j], seed, *instance, with_timing);
        });
    }
    detail::run_jobs(jobs);

    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    for (std::size_t j = 0; j < kinds.size(); ++j) {
        std::vector<std::string> comments = out.hash_comments;
        std::vector<MetricsRow> rows;
        for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
            const SolverRun& run = out.runs[i * kinds.size() + j];
            if (run.failed())
                comments.push_back("failed solver=" + std::string(solver_name(kinds[j])) +
                                   " seed=" + std::to_string(run.seed) + " error=" + run.error);
            else
                rows.insert(rows.end(), run.rows.begin(), run.rows.end());
        }
        std::ostringstream body;
        write_metrics_csv(body, rows, comments);
        const std::filesystem::path path =
            dir / ("compare_" + std::string(solver_name(kinds[j])) + ".csv");
        detail::write_text_file(path, body.str());
        out.files.push_back(path);
    }

    std::ostringstream summary;
    summary << "solver,runs,final_objective_mean,final_objective_std,final_total_se_mean,"
               "final_total_se_std,final_gini_mean,final_gini_std\n";
    for (std::size_t j = 0; j < kinds.size(); ++j) {
        std::vector<double> obj, se, gini;
        for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
            const SolverRun& run = out.runs[i * kinds.size() + j];
            if (run.failed() || run.rows.empty()) continue;
            obj.push_back(run.rows.back().best_objective);
            se.push_back(run.rows.back().total_se_bps_hz);
            gini.push_back(run.rows.back().gini);
        }
        SolverSummary s;
        s.solver = kinds[j];
        s.runs = obj.size();
        s.objective = detail::mean_std(obj);
        s.total_se = detail::mean_std(se);
        s.gini = detail::mean_std(gini);
        out.summary.push_back(s);
        summary << solver_name(kinds[j]) << ',' << s.runs;
        if (s.runs == 0) {
            summary << ",,,,,,\n";
        } else {
            summary << ',' << detail::csv_real(s.objective.mean) << ','
                    << detail::csv_real(s.objective.std) << ',' << detail::csv_real(s.total_se.mean)
                    << ',' << detail::csv_real(s.total_se.std) << ','
                    << detail::csv_real(s.gini.mean) << ',' << detail::csv_real(s.gini.std) << '\n';
        }
    }
    const std::filesystem::path spath = dir / "summary.csv";
    detail::write_text_file(spath, summary.str());
    out.files.push_back(spath);
    return out;
}

enum class SweepAxis { ues, subbands };

inline const char* sweep_axis_name(SweepAxis axis) {
    return axis == SweepAxis::ues ? "ues" : "subbands";
}

struct SweepRun {
    std::size_t value = 0;
    std::uint64_t seed = 0;
    bool capacity_flagged = false;
    std::optional<MetricsRow> final_row;  // empty when the run failed
    std::string error;
};

struct SweepValueSummary {
    std::size_t value = 0;
    bool capacity_flagged = false;
    std::size_t runs = 0;
    detail::MeanStd final_total_se;
};

struct SweepOutput {
    SweepAxis axis = SweepAxis::ues;
    std::vector<SweepRun> runs;  // value-major, seed order within value
    std::vector<SweepValueSummary> summary;
    std::vector<std::filesystem::path> files;
};

// Re-runs the hybrid solver per axis value on freshly generated channel
// snapshots and reports the final-episode metrics per (value, seed).
inline SweepOutput run_sweep(const ExperimentConfig& cfg, SweepAxis axis,
                             const std::vector<std::size_t>& values, bool with_timing = false) {
    cfg.validate();
    if (values.empty()) throw std::invalid_argument("sweep: values must be nonempty");
    SweepOutput out;
    out.axis = axis;
    out.runs.resize(values.size() * cfg.seeds.size());

    std::vector<std::function<void()>> jobs;
    for (std::size_t vi = 0; vi < values.size(); ++vi) {
        for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
            jobs.push_back([&, vi, si] {
                SweepRun& run = out.runs[vi * cfg.seeds.size() + si];
                run.value = values[vi];
                run.seed = cfg.seeds[si];
                ExperimentConfig point = cfg;
                if (axis == SweepAxis::ues)
                    point.deployment.num_ues = values[vi];
                else
                    point.deployment.num_subbands = values[vi];
                point.experiment_id = cfg.experiment_id + "_" + sweep_axis_name(axis) + "=" +
                                      std::to_string(values[vi]);
                const DeploymentConfig& d = point.deployment;
                run.capacity_flagged =
                    d.num_ues > d.antennas_per_ap * point.cluster_size * d.num_subbands;
                try {
                    // One deployment lineage per run seed, shared by every axis
                    // value: UE draws and per-link channel substreams then make
                    // the smaller instances prefixes of the larger ones, so the
                    // sweep measures marginal load rather than instance luck.
                    const std::uint64_t dep_seed = substream_seed(run.seed, rng_label::sweep);
                    const auto instance = build_instance(point, dep_seed);
                    const TrainResult res =
                        hybrid_train(*instance->env, point.ddpg, point.hybrid_inner,
                                     point.episodes, run.seed);
                    res.trace.check_monotone();
                    auto rows = rows_from_trace(point.experiment_id, solver_name(SolverKind::hym),
                                                run.seed, res.trace, with_timing);
                    if (rows.empty()) throw std::runtime_error("sweep: empty trace");
                    run.final_row = rows.back();
                } catch (const std::exception& e) {
                    run.final_row.reset();
                    run.error = e.what();
                }
            });
        }
    }
    detail::run_jobs(jobs);

    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    std::vector<std::string> comments;
    std::vector<MetricsRow> rows;
    for (const SweepRun& run : out.runs) {
        if (run.capacity_flagged)
            comments.push_back("capacity_flagged " + std::string(sweep_axis_name(axis)) + "=" +
                               std::to_string(run.value) + " seed=" + std::to_string(run.seed));
        if (run.final_row)
            rows.push_back(*run.final_row);
        else
            comments.push_back("failed " + std::string(sweep_axis_name(axis)) + "=" +
                               std::to_string(run.value) + " seed=" + std::to_string(run.seed) +
                               " error=" + run.error);
    }
    std::ostringstream body;
    write_metrics_csv(body, rows, comments);
    const std::filesystem::path rpath = dir / "sweep.csv";
    detail::write_text_file(rpath, body.str());
    out.files.push_back(rpath);

    std::ostringstream summary;
    summary << "axis,value,capacity_flagged,runs,final_total_se_mean,final_total_se_std\n";
    for (std::size_t vi = 0; vi < values.size(); ++vi) {
        SweepValueSummary s;
        s.value = values[vi];
        std::vector<double> se;
        for (std::size_t si = 0; si < cfg.seeds.size(); ++si) {
            const SweepRun& run = out.runs[vi * cfg.seeds.size() + si];
            s.capacity_flagged = s.capacity_flagged || run.capacity_flagged;
            if (run.final_row) se.push_back(run.final_row->total_se_bps_hz);
        }
        s.runs = se.size();
        s.final_total_se = detail::mean_std(se);
        out.summary.push_back(s);
        summary << sweep_axis_name(axis) << ',' << s.value << ',' << (s.capacity_flagged ? 1 : 0)
                << ',' << s.runs;
        if (s.runs == 0)
            summary << ",,\n";
        else
            summary << ',' << detail::csv_real(s.final_total_se.mean) << ','
                    << detail::csv_real(s.final_total_se.std) << '\n';
    }
    const std::filesystem::path spath = dir / "sweep_summary.csv";
    detail::write_text_file(spath, summary.str());
    out.files.push_back(spath);
    return out;
}

struct TuneOutput {
    RandomSearchResult search;
    ExperimentConfig best_config;
    AgentBundle best_agent;
    std::vector<std::filesystem::path> files;
};

// Random-search tuning on one instance built from the first seed. The winning
// agent is re-trained at the winning trial's training substream, so the saved
// bundle is bit-identical to the trial that won.
inline TuneOutput run_tune(const ExperimentConfig& cfg, std::size_t trials) {
    cfg.validate();
    if (trials < 1) throw std::invalid_argument("tune: trials must be >= 1");
    const std::uint64_t master = cfg.seeds.front();
    const auto instance = build_instance(cfg, master);
    auto trainer = make_tuning_trainer(*instance->env, cfg.episodes, master);
    RandomSearchResult search =
        random_search(trials, RandomSearchRanges{}, trainer, master, cfg.ddpg);

    const std::uint64_t win_seed =
        substream_seed(master, rng_label::tuner, search.best_trial - 1, 1);
    TrainResult winner = ddpg_train(*instance->env, search.best, cfg.episodes, win_seed);

    ExperimentConfig best_cfg = cfg;
    best_cfg.ddpg = search.best;

    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    std::ostringstream body;
    body << "trial,actor_lr,critic_lr,gamma,buffer_capacity,batch_size,tau,noise,final_return\n";
    for (const TrialSummary& t : search.trials) {
        body << t.trial << ',' << detail::csv_real(t.hyper.actor_lr) << ','
             << detail::csv_real(t.hyper.critic_lr) << ',' << detail::csv_real(t.hyper.gamma)
             << ',' << t.hyper.buffer_capacity << ',' << t.hyper.batch_size << ','
             << detail::csv_real(t.hyper.tau) << ',' << detail::csv_real(t.hyper.noise) << ','
             << detail::csv_real(t.final_return) << '\n';
    }
    const std::filesystem::path tpath = dir / "trials.csv";
    detail::write_text_file(tpath, body.str());

    const std::filesystem::path cpath = dir / "best.cfg";
    detail::write_text_file(cpath, serialize_config(best_cfg));

    const std::filesystem::path apath = dir / "best_agent.bin";
    winner.agent.save(apath.string());

    TuneOutput out{std::move(search), std::move(best_cfg), std::move(winner.agent), {}};
    out.files = {tpath, cpath, apath};
    return out;
}

namespace detail {

inline std::optional<double> metric_field(const MetricsRow& row, const std::string& metric) {
    if (metric == "best_objective") return row.best_objective;
    if (metric == "total_se_bps_hz") return row.total_se_bps_hz;
    if (metric == "gini") return row.gini;
    if (metric == "lambda_min") return row.lambda_min;
    if (metric == "c_violations") return static_cast<double>(row.c_violations);
    if (metric == "actor_loss") return row.actor_loss;
    if (metric == "critic_loss") return row.critic_loss;
    if (metric == "wall_ms") return row.wall_ms;
    throw std::invalid_argument("plot: unknown metric '" + metric + "'");
}

}  // namespace detail

// One series per CSV file, labeled by the file's solver column; each point is
// the metric averaged over that file's seeds at a fixed iteration. Rows that
// lack the metric are skipped; a file whose rows all lack it contributes no
// series.
inline std::vector<PlotSeries> plot_series_from_csvs(const std::vector<std::string>& csv_paths,
                                                     const std::string& metric) {
    if (csv_paths.empty()) throw std::invalid_argument("plot: no input files");
    detail::metric_field(MetricsRow{}, metric);  // rejects unknown metric names up front
    std::vector<PlotSeries> series;
    for (const std::string& path : csv_paths) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open: " + path);
        const std::vector<MetricsRow> rows = read_metrics_csv(in);
        std::map<std::size_t, std::pair<double, std::size_t>> acc;
        std::string label;
        for (const MetricsRow& row : rows) {
            if (label.empty()) label = row.solver;
            const std::optional<double> v = detail::metric_field(row, metric);
            if (!v) continue;
            auto& slot = acc[row.iteration];
            slot.first += *v;
            slot.second += 1;
        }
        if (acc.empty()) continue;
        PlotSeries s;
        s.label = label.empty() ? std::filesystem::path(path).stem().string() : label;
        for (const auto& [it, slot] : acc)
            s.points.emplace_back(static_cast<double>(it),
                                  slot.first / static_cast<double>(slot.second));
        series.push_back(std::move(s));
    }
    if (series.empty()) throw std::runtime_error("plot: no rows carry metric '" + metric + "'");
    return series;
}

inline std::string emit_plot(const std::vector<std::string>& csv_paths, const std::string& metric,
                             PlotStyle style = PlotStyle{}) {
    const std::vector<PlotSeries> series = plot_series_from_csvs(csv_paths, metric);
    if (style.title.empty()) style.title = metric;
    if (style.y_label == "value") style.y_label = metric;
    return render_line_plot(series, style);
}

}  // namespace cfsim

#endif  // CFSIM_EXPERIMENTS_HPP
