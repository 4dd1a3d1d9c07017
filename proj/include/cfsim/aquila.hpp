#ifndef CFSIM_AQUILA_HPP
#define CFSIM_AQUILA_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cfsim/encoding.hpp"
#include "cfsim/objective.hpp"
#include "cfsim/rng.hpp"
#include "cfsim/trace.hpp"

namespace cfsim {

struct AoConfig {
    std::size_t population = 20;
    std::size_t iterations = 200;
    double levy_beta = 1.5;
    double alpha = 0.1;
    double delta = 0.1;

    void validate() const {
        if (population < 2) throw std::invalid_argument("aquila: population must be >= 2");
        if (iterations < 1) throw std::invalid_argument("aquila: iterations must be >= 1");
        if (levy_beta <= 0.0 || levy_beta >= 2.0)
            throw std::invalid_argument("aquila: levy exponent must lie in (0, 2)");
    }
};

struct AoResult {
    Eigen::VectorXd best_x;
    double best_value = 0.0;
};

namespace detail {

// Mantegna's algorithm for symmetric Levy-stable steps.
inline Eigen::VectorXd levy_flight(std::size_t dim, double beta, std::mt19937_64& rng) {
    const double pi = 3.14159265358979323846;
    const double sigma_u = std::pow(
        std::tgamma(1.0 + beta) * std::sin(pi * beta / 2.0) /
            (std::tgamma((1.0 + beta) / 2.0) * beta * std::pow(2.0, (beta - 1.0) / 2.0)),
        1.0 / beta);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd step(static_cast<Eigen::Index>(dim));
    for (Eigen::Index d = 0; d < step.size(); ++d) {
        const double u = gauss(rng) * sigma_u;
        const double v = gauss(rng);
        step[d] = 0.01 * u / std::pow(std::abs(v), 1.0 / beta);
    }
    return step;
}

// Per-dimension spiral coordinates of the narrowed-exploration dive.
inline void spiral_coords(std::size_t dim, Eigen::VectorXd& x, Eigen::VectorXd& y) {
    const double pi = 3.14159265358979323846;
    const double r0 = 10.0, u = 0.0265, omega = 0.005, phi0 = 3.0 * pi / 2.0;
    x.resize(static_cast<Eigen::Index>(dim));
    y.resize(static_cast<Eigen::Index>(dim));
    for (Eigen::Index d = 0; d < x.size(); ++d) {
        const double to = static_cast<double>(d + 1);
        const double r = r0 + u * to;
        const double phi = -omega * to + phi0;
        x[d] = r * std::sin(phi);
        y[d] = r * std::cos(phi);
    }
}

}  // namespace detail

// Four-phase Aquila search maximizing `objective` over [lb, ub]^dim. Each
// individual owns an RNG substream and moves against the previous iteration's
// best/mean, so evaluation order cannot change the result. `on_iteration` is
// called once per iteration with (t, best_x, best_value). The first
// `seed_points.size()` individuals start at those points (clamped) instead of
// uniform positions, letting callers warm-start the search.
template <typename F, typename Callback>
AoResult aquila_maximize(F&& objective, std::size_t dim, double lb, double ub, const AoConfig& cfg,
                         std::uint64_t seed, Callback&& on_iteration,
                         const std::vector<Eigen::VectorXd>& seed_points = {}) {
    cfg.validate();
    if (ub < lb) throw std::invalid_argument("aquila: upper bound below lower bound");
    const std::size_t P = cfg.population;
    if (seed_points.size() > P)
        throw std::invalid_argument("aquila: more seed points than individuals");
    const double T = static_cast<double>(cfg.iterations);

    std::vector<std::mt19937_64> streams;
    streams.reserve(P);
    for (std::size_t i = 0; i < P; ++i)
        streams.push_back(make_rng(substream_seed(seed, rng_label::ao_individual, i)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<Eigen::VectorXd> pop(P, Eigen::VectorXd(static_cast<Eigen::Index>(dim)));
    std::vector<double> fitness(P);
    for (std::size_t i = 0; i < P; ++i) {
        if (i < seed_points.size()) {
            if (seed_points[i].size() != static_cast<Eigen::Index>(dim))
                throw std::invalid_argument("aquila: seed point has wrong dimension");
            pop[i] = seed_points[i].cwiseMax(lb).cwiseMin(ub);
        } else {
            for (Eigen::Index d = 0; d < pop[i].size(); ++d)
                pop[i][d] = lb + (ub - lb) * unit(streams[i]);
        }
        fitness[i] = objective(pop[i]);
    }

    auto best_index = [&]() {
        std::size_t bi = 0;
        for (std::size_t i = 1; i < P; ++i)
            if (fitness[i] > fitness[bi]) bi = i;
        return bi;
    };

    std::size_t bi = best_index();
    Eigen::VectorXd best_x = pop[bi];
    double best_f = fitness[bi];

    Eigen::VectorXd spiral_x, spiral_y;
    detail::spiral_coords(dim, spiral_x, spiral_y);

    for (std::size_t t = 1; t <= cfg.iterations; ++t) {
        const double td = static_cast<double>(t);
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
        for (const auto& x : pop) mean += x;
        if (P > 0) mean /= static_cast<double>(P);
        const Eigen::VectorXd prev_best = best_x;  // previous iteration's leader

        for (std::size_t i = 0; i < P; ++i) {
            std::mt19937_64& rng = streams[i];
            const double coin = unit(rng);
            Eigen::VectorXd cand;
            if (td <= (2.0 / 3.0) * T) {
                if (coin < 0.5) {
                    const double r = unit(rng);
                    cand = prev_best * (1.0 - td / T) + (mean - prev_best * r);
                } else {
                    const Eigen::VectorXd levy = detail::levy_flight(dim, cfg.levy_beta, rng);
                    std::uniform_int_distribution<std::size_t> pick(0, P - 1);
                    const Eigen::VectorXd& xr = pop[pick(rng)];
                    const double r = unit(rng);
                    cand = prev_best.cwiseProduct(levy) + xr + (spiral_y - spiral_x) * r;
                }
            } else {
                if (coin < 0.5) {
                    const double r1 = unit(rng);
                    const double r2 = unit(rng);
                    cand = (prev_best - mean) * cfg.alpha -
                           Eigen::VectorXd::Constant(static_cast<Eigen::Index>(dim), r1) +
                           Eigen::VectorXd::Constant(static_cast<Eigen::Index>(dim),
                                                     ((ub - lb) * r2 + lb) * cfg.delta);
                } else {
                    const double r_qf = unit(rng);
                    const double qf =
                        std::pow(td, (2.0 * r_qf - 1.0) / ((1.0 - T) * (1.0 - T)));
                    const double g1 = 2.0 * unit(rng) - 1.0;
                    const double g2 = 2.0 * (1.0 - td / T);
                    const Eigen::VectorXd levy = detail::levy_flight(dim, cfg.levy_beta, rng);
                    const double r1 = unit(rng);
                    const double r2 = unit(rng);
                    cand = qf * prev_best - g1 * pop[i] * r1 - g2 * levy +
                           Eigen::VectorXd::Constant(static_cast<Eigen::Index>(dim), r2 * g1);
                }
            }
            for (Eigen::Index d = 0; d < cand.size(); ++d)
                cand[d] = std::clamp(cand[d], lb, ub);
            const double f = objective(cand);
            if (f > fitness[i]) {
                pop[i] = std::move(cand);
                fitness[i] = f;
            }
        }

        bi = best_index();
        if (fitness[bi] > best_f) {
            best_f = fitness[bi];
            best_x = pop[bi];
        }
        on_iteration(t, best_x, best_f);
    }
    return AoResult{std::move(best_x), best_f};
}

template <typename F>
AoResult aquila_maximize(F&& objective, std::size_t dim, double lb, double ub, const AoConfig& cfg,
                         std::uint64_t seed) {
    return aquila_maximize(std::forward<F>(objective), dim, lb, ub, cfg, seed,
                           [](std::size_t, const Eigen::VectorXd&, double) {});
}

struct AoRunResult {
    Assignment best;
    ObjectiveReport best_report;
    TrainTrace trace;
};

// Subband allocation via the Aquila search over the continuous encoding.
// The trace re-states the best-so-far report each iteration.
inline AoRunResult ao_optimize(const Evaluator& evaluator, const AoConfig& cfg, std::uint64_t seed) {
    const std::size_t K = evaluator.channels().num_ues();
    const std::size_t S = evaluator.channels().num_subbands();
    std::optional<ObjectiveReport> best_report;
    double best_value = 0.0;
    auto objective = [&](const Eigen::VectorXd& x) {
        ObjectiveReport report = evaluator.evaluate(decode_solution(x, S));
        if (!best_report || report.normalized_value > best_value) {
            best_value = report.normalized_value;
            best_report = report;
        }
        return report.normalized_value;
    };

    TrainTrace trace;
    trace.rows.reserve(cfg.iterations);
    auto started = std::chrono::steady_clock::now();
    AoResult res = aquila_maximize(objective, K, 0.0, static_cast<double>(S), cfg, seed,
                                   [&](std::size_t t, const Eigen::VectorXd&, double best_f) {
                                       auto now = std::chrono::steady_clock::now();
                                       TraceRow row;
                                       row.iteration = t;
                                       row.best_objective = best_f;
                                       row.total_se_bps_hz = best_report->total_se_bps_hz;
                                       row.gini = best_report->gini;
                                       row.lambda_min = best_report->lambda_min;
                                       row.c_violations = best_report->violations.violated_count();
                                       row.wall_ms = std::chrono::duration<double, std::milli>(
                                                         now - started)
                                                         .count();
                                       started = now;
                                       trace.rows.push_back(row);
                                   });
    AoRunResult out{decode_solution(res.best_x, S), *best_report, std::move(trace)};
    return out;
}

}  // namespace cfsim

#endif  // CFSIM_AQUILA_HPP
