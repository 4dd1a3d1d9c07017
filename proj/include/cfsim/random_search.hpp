#ifndef CFSIM_RANDOM_SEARCH_HPP
#define CFSIM_RANDOM_SEARCH_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cfsim/ddpg.hpp"
#include "cfsim/rng.hpp"

namespace cfsim {

// Sampling ranges for the hyperparameter search. Learning rates and buffer
// capacity are drawn log-uniformly, the rest uniformly.
struct RandomSearchRanges {
    double lr_lo = 1e-5, lr_hi = 1e-3;
    double gamma_lo = 0.9, gamma_hi = 0.99;
    double buffer_lo = 1e4, buffer_hi = 1e6;
    std::size_t batch_lo = 32, batch_hi = 256;
    double tau_lo = 0.001, tau_hi = 0.01;
    double noise_lo = 0.1, noise_hi = 0.5;

    void validate() const {
        if (!(lr_lo > 0.0) || lr_hi < lr_lo) throw std::invalid_argument("ranges: bad lr bounds");
        if (gamma_hi < gamma_lo) throw std::invalid_argument("ranges: bad gamma bounds");
        if (!(buffer_lo >= 1.0) || buffer_hi < buffer_lo)
            throw std::invalid_argument("ranges: bad buffer bounds");
        if (batch_lo < 1 || batch_hi < batch_lo)
            throw std::invalid_argument("ranges: bad batch bounds");
        if (!(tau_lo > 0.0) || tau_hi < tau_lo) throw std::invalid_argument("ranges: bad tau bounds");
        if (noise_lo < 0.0 || noise_hi < noise_lo)
            throw std::invalid_argument("ranges: bad noise bounds");
    }
};

namespace detail {

inline double log_uniform(double lo, double hi, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
}

}  // namespace detail

// One hyperparameter draw. Fields outside the search space (epsilon schedule,
// hidden widths) are carried over from `base`.
inline DdpgHyper sample_hyper(const RandomSearchRanges& ranges, std::mt19937_64& rng,
                              const DdpgHyper& base = DdpgHyper{}) {
    ranges.validate();
    DdpgHyper h = base;
    h.actor_lr = detail::log_uniform(ranges.lr_lo, ranges.lr_hi, rng);
    h.critic_lr = detail::log_uniform(ranges.lr_lo, ranges.lr_hi, rng);
    std::uniform_real_distribution<double> gamma_u(ranges.gamma_lo, ranges.gamma_hi);
    h.gamma = gamma_u(rng);
    const double cap = detail::log_uniform(ranges.buffer_lo, ranges.buffer_hi, rng);
    h.buffer_capacity = static_cast<std::size_t>(std::llround(
        std::min(std::max(cap, ranges.buffer_lo), ranges.buffer_hi)));
    std::uniform_int_distribution<std::size_t> batch_u(ranges.batch_lo, ranges.batch_hi);
    h.batch_size = batch_u(rng);
    std::uniform_real_distribution<double> tau_u(ranges.tau_lo, ranges.tau_hi);
    h.tau = tau_u(rng);
    std::uniform_real_distribution<double> noise_u(ranges.noise_lo, ranges.noise_hi);
    h.noise = noise_u(rng);
    return h;
}

inline bool hyper_within_ranges(const DdpgHyper& h, const RandomSearchRanges& r) {
    const double cap = static_cast<double>(h.buffer_capacity);
    return h.actor_lr >= r.lr_lo && h.actor_lr <= r.lr_hi && h.critic_lr >= r.lr_lo &&
           h.critic_lr <= r.lr_hi && h.gamma >= r.gamma_lo && h.gamma <= r.gamma_hi &&
           cap >= r.buffer_lo && cap <= r.buffer_hi && h.batch_size >= r.batch_lo &&
           h.batch_size <= r.batch_hi && h.tau >= r.tau_lo && h.tau <= r.tau_hi &&
           h.noise >= r.noise_lo && h.noise <= r.noise_hi;
}

struct TrialSummary {
    std::size_t trial = 0;  // 1-based
    DdpgHyper hyper;
    double final_return = 0.0;
};

struct RandomSearchResult {
    DdpgHyper best;
    std::size_t best_trial = 0;  // 1-based
    std::vector<TrialSummary> trials;
};

// Samples `trial_count` configurations (each trial's draw on its own
// substream), scores each with `trainer(hyper, trial_index)` returning the
// final cumulative episode reward, and keeps the argmax; ties go to the
// earlier trial.
template <typename TrainerFn>
RandomSearchResult random_search(std::size_t trial_count, const RandomSearchRanges& ranges,
                                 TrainerFn&& trainer, std::uint64_t seed,
                                 const DdpgHyper& base = DdpgHyper{}) {
    if (trial_count < 1) throw std::invalid_argument("random search: need at least one trial");
    ranges.validate();
    RandomSearchResult out;
    out.trials.reserve(trial_count);
    for (std::size_t i = 0; i < trial_count; ++i) {
        auto rng = make_rng(substream_seed(seed, rng_label::tuner, i, 0));
        TrialSummary t;
        t.trial = i + 1;
        t.hyper = sample_hyper(ranges, rng, base);
        t.final_return = trainer(t.hyper, i);
        out.trials.push_back(std::move(t));
        if (out.best_trial == 0 || out.trials[i].final_return > out.trials[out.best_trial - 1].final_return) {
            out.best_trial = i + 1;
            out.best = out.trials[i].hyper;
        }
    }
    return out;
}

// Trainer over an allocation environment: runs the plain actor-critic loop
// for `episodes` and scores the final episode's cumulative reward. Each trial
// trains on its own seed derived from the master.
template <typename Env>
auto make_tuning_trainer(const Env& env, std::size_t episodes, std::uint64_t seed) {
    return [&env, episodes, seed](const DdpgHyper& hyper, std::size_t trial_index) {
        TrainResult res =
            ddpg_train(env, hyper, episodes, substream_seed(seed, rng_label::tuner, trial_index, 1));
        return res.episode_returns.back();
    };
}

}  // namespace cfsim

#endif  // CFSIM_RANDOM_SEARCH_HPP
