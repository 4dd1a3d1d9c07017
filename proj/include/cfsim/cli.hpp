#ifndef CFSIM_CLI_HPP
#define CFSIM_CLI_HPP

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cfsim/config.hpp"
#include "cfsim/experiments.hpp"

namespace cfsim {

inline const char* cli_usage() {
    return
        "usage: cfalloc <command> [options]\n"
        "\n"
        "commands:\n"
        "  gen-channels     generate a channel snapshot (channels.cfr, gains.csv, clusters.csv)\n"
        "  compare          run ao, rlm and hym on shared snapshots; write per-solver CSVs and summary.csv\n"
        "  sweep            re-run hym across --axis values; write sweep.csv and sweep_summary.csv\n"
        "  tune             random-search ddpg hyperparameters; write trials.csv, best.cfg, best_agent.bin\n"
        "  plot             render an SVG line plot from metrics CSVs\n"
        "  validate-config  parse and validate a config file, print the effective settings\n"
        "\n"
        "options:\n"
        "  --config <path>   config file (documented defaults apply when omitted)\n"
        "  --seed <n>        replace the config seed list with the single seed n\n"
        "  --out <path>      output directory; for plot, the output SVG path (default plot.svg)\n"
        "  --timing          record wall-clock milliseconds in metric rows\n"
        "  --axis <name>     sweep axis: ues | subbands (sweep, required)\n"
        "  --values <list>   comma-separated sweep values (sweep, required)\n"
        "  --trials <n>      tuning trial count (tune, default 6)\n"
        "  --csv <list>      comma-separated metrics CSV paths (plot, required)\n"
        "  --metric <name>   plotted metric column (plot, default best_objective)\n";
}

namespace detail {

struct CliFlags {
    std::optional<std::string> config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    bool timing = false;
    std::optional<std::string> axis;
    std::optional<std::string> values;
    std::optional<std::size_t> trials;
    std::optional<std::string> csv;
    std::optional<std::string> metric;
};

// Returns nullopt after printing usage when the flags are malformed.
inline std::optional<CliFlags> parse_cli_flags(const std::vector<std::string>& args,
                                               std::size_t first, std::ostream& err) {
    CliFlags flags;
    auto value_of = [&](std::size_t& i) -> std::optional<std::string> {
        if (i + 1 >= args.size()) {
            err << "missing value for " << args[i] << "\n\n" << cli_usage();
            return std::nullopt;
        }
        return args[++i];
    };
    for (std::size_t i = first; i < args.size(); ++i) {
        const std::string& a = args[i];
        std::optional<std::string> v;
        if (a == "--timing") {
            flags.timing = true;
        } else if (a == "--config") {
            if (!(v = value_of(i))) return std::nullopt;
            flags.config = *v;
        } else if (a == "--seed") {
            if (!(v = value_of(i))) return std::nullopt;
            try {
                flags.seed = parse_unsigned(*v);
            } catch (const std::exception&) {
                err << "--seed expects an unsigned integer, got '" << *v << "'\n";
                return std::nullopt;
            }
        } else if (a == "--out") {
            if (!(v = value_of(i))) return std::nullopt;
            flags.out = *v;
        } else if (a == "--axis") {
            if (!(v = value_of(i))) return std::nullopt;
            flags.axis = *v;
        } else if (a == "--values") {
            if (!(v = value_of(i))) return std::nullopt;
            flags.values = *v;
        } else if (a == "--trials") {
            if (!(v = value_of(i))) return std::nullopt;
            try {
                flags.trials = parse_unsigned(*v);
            } catch (const std::exception&) {
                err << "--trials expects an unsigned integer, got '" << *v << "'\n";
                return std::nullopt;
            }
        } else if (a == "--csv") {
            if (!(v = value_of(i))) return std::nullopt;
            flags.csv = *v;
        } else if (a == "--metric") {
            if (!(v = value_of(i))) return std::nullopt;
            flags.metric = *v;
        } else {
            err << "unknown option '" << a << "'\n\n" << cli_usage();
            return std::nullopt;
        }
    }
    return flags;
}

inline ExperimentConfig load_cli_config(const CliFlags& flags) {
    ExperimentConfig cfg =
        flags.config ? parse_config_file(*flags.config) : ExperimentConfig{};
    if (flags.seed) {
        cfg.seeds = {*flags.seed};
        cfg.deployment.seed = *flags.seed;
    }
    if (flags.out) cfg.out_dir = *flags.out;
    cfg.validate();
    return cfg;
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> items;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            items.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    items.push_back(trim(cur));
    return items;
}

}  // namespace detail

inline int cli_dispatch(const std::vector<std::string>& args, std::ostream& out,
                        std::ostream& err) {
    if (args.empty()) {
        err << cli_usage();
        return 1;
    }
    const std::string& cmd = args[0];
    const bool known = cmd == "gen-channels" || cmd == "compare" || cmd == "sweep" ||
                       cmd == "tune" || cmd == "plot" || cmd == "validate-config";
    if (!known) {
        err << "unknown command '" << cmd << "'\n\n" << cli_usage();
        return 1;
    }
    const std::optional<detail::CliFlags> maybe_flags = detail::parse_cli_flags(args, 1, err);
    if (!maybe_flags) return 1;
    const detail::CliFlags& flags = *maybe_flags;

    if (cmd == "plot") {
        if (!flags.csv) {
            err << "plot requires --csv\n\n" << cli_usage();
            return 1;
        }
        const std::vector<std::string> paths = detail::split_list(*flags.csv);
        const std::string metric = flags.metric.value_or("best_objective");
        try {
            detail::metric_field(MetricsRow{}, metric);
        } catch (const std::exception& e) {
            err << e.what() << '\n';
            return 1;
        }
        try {
            const std::string svg = emit_plot(paths, metric);
            const std::filesystem::path target(flags.out.value_or("plot.svg"));
            if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
            detail::write_text_file(target, svg);
            out << "wrote " << target.string() << '\n';
            return 0;
        } catch (const std::exception& e) {
            err << e.what() << '\n';
            return 2;
        }
    }

    ExperimentConfig cfg;
    try {
        cfg = detail::load_cli_config(flags);
    } catch (const std::exception& e) {
        err << e.what() << '\n';
        return 1;
    }

    if (cmd == "validate-config") {
        out << serialize_config(cfg);
        return 0;
    }

    if (cmd == "sweep") {
        if (!flags.axis || !flags.values) {
            err << "sweep requires --axis and --values\n\n" << cli_usage();
            return 1;
        }
        SweepAxis axis;
        if (*flags.axis == "ues")
            axis = SweepAxis::ues;
        else if (*flags.axis == "subbands")
            axis = SweepAxis::subbands;
        else {
            err << "unknown axis '" << *flags.axis << "' (valid: ues, subbands)\n";
            return 1;
        }
        std::vector<std::size_t> values;
        try {
            for (const std::string& item : detail::split_list(*flags.values))
                values.push_back(detail::parse_unsigned(item));
        } catch (const std::exception&) {
            err << "--values expects comma-separated unsigned integers, got '" << *flags.values
                << "'\n";
            return 1;
        }
        try {
            const SweepOutput res = run_sweep(cfg, axis, values, flags.timing);
            for (const SweepValueSummary& s : res.summary) {
                out << sweep_axis_name(axis) << '=' << s.value << " runs=" << s.runs;
                if (s.runs > 0)
                    out << " final_total_se_mean=" << detail::csv_real(s.final_total_se.mean)
                        << " std=" << detail::csv_real(s.final_total_se.std);
                if (s.capacity_flagged) out << " capacity_flagged";
                out << '\n';
            }
            for (const auto& f : res.files) out << "wrote " << f.string() << '\n';
            return 0;
        } catch (const std::exception& e) {
            err << e.what() << '\n';
            return 2;
        }
    }

    if (cmd == "tune") {
        const std::size_t trials = flags.trials.value_or(6);
        if (trials < 1) {
            err << "--trials must be >= 1\n";
            return 1;
        }
        try {
            const TuneOutput res = run_tune(cfg, trials);
            for (const TrialSummary& t : res.search.trials) {
                out << "trial " << t.trial << ": actor_lr=" << detail::csv_real(t.hyper.actor_lr)
                    << " critic_lr=" << detail::csv_real(t.hyper.critic_lr)
                    << " gamma=" << detail::csv_real(t.hyper.gamma)
                    << " buffer=" << t.hyper.buffer_capacity << " batch=" << t.hyper.batch_size
                    << " tau=" << detail::csv_real(t.hyper.tau)
                    << " noise=" << detail::csv_real(t.hyper.noise)
                    << " final_return=" << detail::csv_real(t.final_return) << '\n';
            }
            out << "best trial: " << res.search.best_trial << '\n';
            out << "best config:\n" << serialize_config(res.best_config);
            for (const auto& f : res.files) out << "wrote " << f.string() << '\n';
            return 0;
        } catch (const std::exception& e) {
            err << e.what() << '\n';
            return 2;
        }
    }

    if (cmd == "gen-channels") {
        try {
            const std::uint64_t seed = cfg.seeds.front();
            const auto instance = build_instance(cfg, seed);
            const std::filesystem::path dir(cfg.out_dir);
            std::filesystem::create_directories(dir);
            const std::filesystem::path cfr = dir / "channels.cfr";
            instance->channels.save(cfr.string());
            std::ostringstream gains;
            instance->channels.export_gains_csv(gains);
            const std::filesystem::path gpath = dir / "gains.csv";
            detail::write_text_file(gpath, gains.str());
            std::ostringstream clusters;
            export_clusters_csv(instance->cluster, clusters);
            const std::filesystem::path cpath = dir / "clusters.csv";
            detail::write_text_file(cpath, clusters.str());
            out << "wrote " << cfr.string() << '\n';
            out << "wrote " << gpath.string() << '\n';
            out << "wrote " << cpath.string() << '\n';
            return 0;
        } catch (const std::exception& e) {
            err << e.what() << '\n';
            return 2;
        }
    }

    // compare
    try {
        const CompareOutput res = run_compare(cfg, flags.timing);
        for (const SolverSummary& s : res.summary) {
            out << solver_name(s.solver) << " runs=" << s.runs;
            if (s.runs > 0)
                out << " final_objective_mean=" << detail::csv_real(s.objective.mean)
                    << " final_total_se_mean=" << detail::csv_real(s.total_se.mean)
                    << " final_gini_mean=" << detail::csv_real(s.gini.mean);
            out << '\n';
        }
        for (const SolverRun& run : res.runs)
            if (run.failed())
                out << "failed " << solver_name(run.solver) << " seed=" << run.seed << ": "
                    << run.error << '\n';
        for (const auto& f : res.files) out << "wrote " << f.string() << '\n';
        return 0;
    } catch (const std::exception& e) {
        err << e.what() << '\n';
        return 2;
    }
}

}  // namespace cfsim

#endif  // CFSIM_CLI_HPP
