#ifndef CFSIM_CSV_HPP
#define CFSIM_CSV_HPP

#include <cstdint>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfsim/trace.hpp"

namespace cfsim {

inline constexpr const char* metrics_csv_header =
    "experiment_id,solver,seed,iteration,best_objective,total_se_bps_hz,gini,lambda_min,"
    "c_violations,actor_loss,critic_loss,wall_ms";

// One solver iteration as persisted. Losses stay empty for solvers without
// networks; wall_ms stays empty unless timing capture was requested, keeping
// default outputs byte-reproducible.
struct MetricsRow {
    std::string experiment_id;
    std::string solver;
    std::uint64_t seed = 0;
    std::size_t iteration = 0;
    double best_objective = 0.0;
    double total_se_bps_hz = 0.0;
    double gini = 0.0;
    double lambda_min = 0.0;
    std::size_t c_violations = 0;
    std::optional<double> actor_loss;
    std::optional<double> critic_loss;
    std::optional<double> wall_ms;
};

namespace detail {

inline std::string csv_real(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

inline std::string csv_opt(const std::optional<double>& x) {
    return x ? csv_real(*x) : std::string();
}

inline void check_csv_field(const std::string& s, const char* what) {
    for (char c : s)
        if (c == ',' || c == '\n' || c == '\r')
            throw std::invalid_argument(std::string("csv: ") + what + " must not contain commas or newlines");
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

inline std::optional<double> parse_opt_real(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return std::stod(s);
}

}  // namespace detail

inline void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows,
                              const std::vector<std::string>& comments = {}) {
    for (const std::string& c : comments) out << "# " << c << '\n';
    out << metrics_csv_header << '\n';
    for (const MetricsRow& r : rows) {
        detail::check_csv_field(r.experiment_id, "experiment id");
        detail::check_csv_field(r.solver, "solver name");
        out << r.experiment_id << ',' << r.solver << ',' << r.seed << ',' << r.iteration << ','
            << detail::csv_real(r.best_objective) << ',' << detail::csv_real(r.total_se_bps_hz)
            << ',' << detail::csv_real(r.gini) << ',' << detail::csv_real(r.lambda_min) << ','
            << r.c_violations << ',' << detail::csv_opt(r.actor_loss) << ','
            << detail::csv_opt(r.critic_loss) << ',' << detail::csv_opt(r.wall_ms) << '\n';
    }
    if (!out) throw std::runtime_error("csv: write failed");
}

// Reads rows back, skipping '#' comments and validating the header.
inline std::vector<MetricsRow> read_metrics_csv(std::istream& in) {
    std::vector<MetricsRow> rows;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != metrics_csv_header)
                throw std::runtime_error("csv: unexpected header '" + line + "'");
            header_seen = true;
            continue;
        }
        const std::vector<std::string> f = detail::split_csv_line(line);
        if (f.size() != 12) throw std::runtime_error("csv: expected 12 fields, got line '" + line + "'");
        MetricsRow r;
        r.experiment_id = f[0];
        r.solver = f[1];
        r.seed = std::stoull(f[2]);
        r.iteration = static_cast<std::size_t>(std::stoull(f[3]));
        r.best_objective = std::stod(f[4]);
        r.total_se_bps_hz = std::stod(f[5]);
        r.gini = std::stod(f[6]);
        r.lambda_min = std::stod(f[7]);
        r.c_violations = static_cast<std::size_t>(std::stoull(f[8]));
        r.actor_loss = detail::parse_opt_real(f[9]);
        r.critic_loss = detail::parse_opt_real(f[10]);
        r.wall_ms = detail::parse_opt_real(f[11]);
        rows.push_back(std::move(r));
    }
    if (!header_seen) throw std::runtime_error("csv: missing header");
    return rows;
}

// Trace rows annotated with run identity. Wall times are dropped unless
// requested so identical runs serialize identically.
inline std::vector<MetricsRow> rows_from_trace(const std::string& experiment_id,
                                               const std::string& solver, std::uint64_t seed,
                                               const TrainTrace& trace, bool with_timing = false) {
    std::vector<MetricsRow> rows;
    rows.reserve(trace.rows.size());
    for (const TraceRow& t : trace.rows) {
        MetricsRow r;
        r.experiment_id = experiment_id;
        r.solver = solver;
        r.seed = seed;
        r.iteration = t.iteration;
        r.best_objective = t.best_objective;
        r.total_se_bps_hz = t.total_se_bps_hz;
        r.gini = t.gini;
        r.lambda_min = t.lambda_min;
        r.c_violations = t.c_violations;
        r.actor_loss = t.actor_loss;
        r.critic_loss = t.critic_loss;
        if (with_timing) r.wall_ms = t.wall_ms;
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace cfsim

#endif  // CFSIM_CSV_HPP
