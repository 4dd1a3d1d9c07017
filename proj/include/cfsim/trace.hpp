#ifndef CFSIM_TRACE_HPP
#define CFSIM_TRACE_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

namespace cfsim {

// One per-iteration record of a solver run. Losses stay empty for solvers
// without networks; wall_ms is measured, so it is excluded from determinism
// contracts.
struct TraceRow {
    std::size_t iteration = 0;
    double best_objective = 0.0;
    double total_se_bps_hz = 0.0;
    double gini = 0.0;
    double lambda_min = 0.0;
    std::size_t c_violations = 0;
    std::optional<double> actor_loss;
    std::optional<double> critic_loss;
    double epsilon = 0.0;
    double wall_ms = 0.0;
};

struct TrainTrace {
    std::vector<TraceRow> rows;

    void check_monotone() const {
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (rows[i].best_objective < rows[i - 1].best_objective)
                throw std::logic_error("trace: best objective decreased between iterations");
    }
};

}  // namespace cfsim

#endif  // CFSIM_TRACE_HPP
