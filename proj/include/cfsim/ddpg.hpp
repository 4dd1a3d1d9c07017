#ifndef CFSIM_DDPG_HPP
#define CFSIM_DDPG_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cfsim/aquila.hpp"
#include "cfsim/encoding.hpp"
#include "cfsim/neural.hpp"
#include "cfsim/objective.hpp"
#include "cfsim/phy.hpp"
#include "cfsim/rng.hpp"
#include "cfsim/trace.hpp"

namespace cfsim {

// Actor-critic training knobs. The tuner samples the first seven fields
// within its documented ranges; hand-written configs may sit outside them,
// so validation only rejects values that break the algorithm outright.
struct DdpgHyper {
    double actor_lr = 1e-3;
    double critic_lr = 1e-3;
    double gamma = 0.95;
    std::size_t buffer_capacity = 10000;
    std::size_t batch_size = 32;
    double tau = 0.005;
    double noise = 0.3;
    double epsilon_start = 1.0;
    double epsilon_decay = 0.995;
    double epsilon_floor = 0.05;
    std::size_t hidden1 = 64;
    std::size_t hidden2 = 32;

    void validate() const {
        if (!(actor_lr > 0.0) || !std::isfinite(actor_lr))
            throw std::invalid_argument("hyper: actor lr must be positive");
        if (!(critic_lr > 0.0) || !std::isfinite(critic_lr))
            throw std::invalid_argument("hyper: critic lr must be positive");
        if (gamma < 0.0 || gamma > 1.0)
            throw std::invalid_argument("hyper: discount must lie in [0, 1]");
        if (buffer_capacity < 1) throw std::invalid_argument("hyper: buffer capacity must be >= 1");
        if (batch_size < 1) throw std::invalid_argument("hyper: batch size must be >= 1");
        if (!(tau > 0.0) || tau > 1.0)
            throw std::invalid_argument("hyper: soft-update rate must lie in (0, 1]");
        if (noise < 0.0 || !std::isfinite(noise))
            throw std::invalid_argument("hyper: exploration noise must be >= 0");
        if (epsilon_start < 0.0 || epsilon_start > 1.0)
            throw std::invalid_argument("hyper: epsilon start must lie in [0, 1]");
        if (!(epsilon_decay > 0.0) || epsilon_decay > 1.0)
            throw std::invalid_argument("hyper: epsilon decay must lie in (0, 1]");
        if (epsilon_floor < 0.0 || epsilon_floor > 1.0)
            throw std::invalid_argument("hyper: epsilon floor must lie in [0, 1]");
        if (hidden1 < 1 || hidden2 < 1)
            throw std::invalid_argument("hyper: hidden widths must be >= 1");
    }
};

// Online and target networks plus the hyperparameters they were trained with.
struct AgentBundle {
    DdpgHyper hyper;
    Mlp actor;
    Mlp critic;
    Mlp actor_target;
    Mlp critic_target;

    void save(std::ostream& out) const {
        out.write("AGB1", 4);
        const double reals[8] = {hyper.actor_lr,      hyper.critic_lr,    hyper.gamma,
                                 hyper.tau,           hyper.noise,        hyper.epsilon_start,
                                 hyper.epsilon_decay, hyper.epsilon_floor};
        out.write(reinterpret_cast<const char*>(reals), sizeof(reals));
        const std::uint64_t counts[4] = {
            static_cast<std::uint64_t>(hyper.buffer_capacity),
            static_cast<std::uint64_t>(hyper.batch_size),
            static_cast<std::uint64_t>(hyper.hidden1),
            static_cast<std::uint64_t>(hyper.hidden2),
        };
        out.write(reinterpret_cast<const char*>(counts), sizeof(counts));
        actor.save(out);
        critic.save(out);
        actor_target.save(out);
        critic_target.save(out);
        if (!out) throw std::runtime_error("agent save: write failed");
    }

    static AgentBundle load(std::istream& in) {
        char magic[4] = {};
        in.read(magic, 4);
        if (!in || std::string(magic, 4) != "AGB1")
            throw std::runtime_error("agent load: bad magic");
        double reals[8];
        in.read(reinterpret_cast<char*>(reals), sizeof(reals));
        std::uint64_t counts[4];
        in.read(reinterpret_cast<char*>(counts), sizeof(counts));
        if (!in) throw std::runtime_error("agent load: truncated header");
        AgentBundle b;
        b.hyper.actor_lr = reals[0];
        b.hyper.critic_lr = reals[1];
        b.hyper.gamma = reals[2];
        b.hyper.tau = reals[3];
        b.hyper.noise = reals[4];
        b.hyper.epsilon_start = reals[5];
        b.hyper.epsilon_decay = reals[6];
        b.hyper.epsilon_floor = reals[7];
        b.hyper.buffer_capacity = static_cast<std::size_t>(counts[0]);
        b.hyper.batch_size = static_cast<std::size_t>(counts[1]);
        b.hyper.hidden1 = static_cast<std::size_t>(counts[2]);
        b.hyper.hidden2 = static_cast<std::size_t>(counts[3]);
        b.actor = Mlp::load(in);
        b.critic = Mlp::load(in);
        b.actor_target = Mlp::load(in);
        b.critic_target = Mlp::load(in);
        return b;
    }

    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("agent save: cannot open " + path);
        save(static_cast<std::ostream&>(out));
    }

    static AgentBundle load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("agent load: cannot open " + path);
        return load(static_cast<std::istream&>(in));
    }
};

struct TrainResult {
    AgentBundle agent;
    TrainTrace trace;
    Assignment best;
    ObjectiveReport best_report;
    std::vector<double> episode_returns;
};

namespace detail {

// Per-UE softmax over perturbed log-probabilities.
inline Eigen::VectorXd renormalize_policy(Eigen::VectorXd logits, std::size_t num_ues,
                                          std::size_t num_subbands) {
    for (std::size_t k = 0; k < num_ues; ++k) {
        const Eigen::Index off = static_cast<Eigen::Index>(k * num_subbands);
        const Eigen::Index n = static_cast<Eigen::Index>(num_subbands);
        const double mx = logits.segment(off, n).maxCoeff();
        logits.segment(off, n) = (logits.segment(off, n).array() - mx).exp().matrix();
        logits.segment(off, n) /= logits.segment(off, n).sum();
    }
    return logits;
}

// Shared actor-critic loop. `explore_action(probe, probs, rng, step)` supplies
// the exploratory branch: a perturbed-policy sample for the plain trainer, a
// warm-started inner search for the hybrid. With epsilon identically zero the
// branch is unreachable and both trainers produce bit-identical results.
// `observe(episode, step, explored, greedy, taken)` sees every transition.
template <typename Env, typename ExploreFn, typename Observer>
TrainResult train_core(const Env& env, const DdpgHyper& hyper, std::size_t episodes,
                       std::uint64_t seed, ExploreFn&& explore_action, Observer&& observe) {
    hyper.validate();
    if (episodes < 1) throw std::invalid_argument("train: episodes must be >= 1");
    const std::size_t ds = env.state_dim();
    const std::size_t da = env.action_dim();

    auto actor_rng = make_rng(substream_seed(seed, rng_label::actor_init));
    auto critic_rng = make_rng(substream_seed(seed, rng_label::critic_init));
    auto explore_rng = make_rng(substream_seed(seed, rng_label::explore));
    auto replay_rng = make_rng(substream_seed(seed, rng_label::replay_sample));

    MlpConfig actor_cfg;
    actor_cfg.d_in = ds;
    actor_cfg.h1 = hyper.hidden1;
    actor_cfg.h2 = hyper.hidden2;
    actor_cfg.d_out = da;
    actor_cfg.output = OutputActivation::softmax_rows;
    actor_cfg.softmax_group = env.num_subbands();
    MlpConfig critic_cfg;
    critic_cfg.d_in = ds + da;
    critic_cfg.h1 = hyper.hidden1;
    critic_cfg.h2 = hyper.hidden2;
    critic_cfg.d_out = 1;
    critic_cfg.output = OutputActivation::identity;

    AgentBundle agent;
    agent.hyper = hyper;
    agent.actor = Mlp(actor_cfg, actor_rng);
    agent.critic = Mlp(critic_cfg, critic_rng);
    agent.actor_target = agent.actor;
    agent.critic_target = agent.critic;
    AdamState actor_adam, critic_adam;

    ReplayBuffer buffer(hyper.buffer_capacity);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Assignment best(env.num_ues(), env.num_subbands());
    ObjectiveReport best_report;
    double best_value = -std::numeric_limits<double>::infinity();
    bool has_best = false;
    auto probe = [&](const Assignment& a) {
        auto res = env.step(a);
        if (!has_best || res.reward > best_value) {
            has_best = true;
            best_value = res.reward;
            best = a;
            best_report = res.report;
        }
        return res;
    };

    TrainTrace trace;
    trace.rows.reserve(episodes);
    std::vector<double> episode_returns;
    episode_returns.reserve(episodes);

    double eps = hyper.epsilon_start;
    std::size_t global_step = 0;

    for (std::size_t e = 0; e < episodes; ++e) {
        const auto episode_started = std::chrono::steady_clock::now();
        Eigen::VectorXd state = env.initial_state();
        double ep_return = 0.0;
        double actor_loss_sum = 0.0, critic_loss_sum = 0.0;
        std::size_t updates = 0;

        for (std::size_t h = 0; h < env.horizon(); ++h, ++global_step) {
            const Eigen::VectorXd probs = agent.actor.forward(state);
            const Assignment greedy = env.decode_policy(probs);
            Assignment act = greedy;
            Eigen::VectorXd action_vec = probs;
            bool explored = false;
            if (unit(explore_rng) < eps) {
                explored = true;
                auto chosen = explore_action(probe, probs, explore_rng, global_step);
                act = std::move(chosen.first);
                action_vec = std::move(chosen.second);
            }
            auto sr = probe(act);
            ep_return += sr.reward;
            buffer.push(Transition{state, action_vec, sr.reward, sr.next_state});
            observe(e, h, explored, greedy, act);

            if (auto batch = buffer.sample(hyper.batch_size, replay_rng)) {
                const Eigen::Index b = batch->states.cols();
                const Eigen::Index dsi = static_cast<Eigen::Index>(ds);
                const Eigen::Index dai = static_cast<Eigen::Index>(da);

                Eigen::MatrixXd next_sa(dsi + dai, b);
                next_sa.topRows(dsi) = batch->next_states;
                next_sa.bottomRows(dai) = agent.actor_target.forward(batch->next_states);
                const Eigen::MatrixXd y =
                    batch->rewards.transpose() + hyper.gamma * agent.critic_target.forward(next_sa);

                Eigen::MatrixXd sa(dsi + dai, b);
                sa.topRows(dsi) = batch->states;
                sa.bottomRows(dai) = batch->actions;
                Mlp::Cache critic_cache;
                const Eigen::MatrixXd q = agent.critic.forward(sa, &critic_cache);
                const Eigen::MatrixXd td = q - y;
                critic_loss_sum += td.squaredNorm() / static_cast<double>(b);
                const Eigen::MatrixXd dq = (2.0 / static_cast<double>(b)) * td;
                adam_step(agent.critic, agent.critic.backward(critic_cache, dq), critic_adam,
                          hyper.critic_lr);

                Mlp::Cache actor_cache;
                const Eigen::MatrixXd pi = agent.actor.forward(batch->states, &actor_cache);
                Eigen::MatrixXd sa_pi(dsi + dai, b);
                sa_pi.topRows(dsi) = batch->states;
                sa_pi.bottomRows(dai) = pi;
                Mlp::Cache value_cache;
                const Eigen::MatrixXd q_pi = agent.critic.forward(sa_pi, &value_cache);
                actor_loss_sum += -q_pi.mean();
                const Eigen::MatrixXd dq_pi =
                    Eigen::MatrixXd::Constant(1, b, -1.0 / static_cast<double>(b));
                const Mlp::Gradients critic_grads = agent.critic.backward(value_cache, dq_pi);
                const Eigen::MatrixXd dpi = critic_grads.dinput.bottomRows(dai);
                adam_step(agent.actor, agent.actor.backward(actor_cache, dpi), actor_adam,
                          hyper.actor_lr);

                soft_update(agent.actor_target, agent.actor, hyper.tau);
                soft_update(agent.critic_target, agent.critic, hyper.tau);
                ++updates;
            }

            state = sr.next_state;
            eps = std::max(hyper.epsilon_floor, eps * hyper.epsilon_decay);
        }

        episode_returns.push_back(ep_return);
        TraceRow row;
        row.iteration = e + 1;
        row.best_objective = best_value;
        row.total_se_bps_hz = best_report.total_se_bps_hz;
        row.gini = best_report.gini;
        row.lambda_min = best_report.lambda_min;
        row.c_violations = best_report.violations.violated_count();
        if (updates > 0) {
            row.actor_loss = actor_loss_sum / static_cast<double>(updates);
            row.critic_loss = critic_loss_sum / static_cast<double>(updates);
        }
        row.epsilon = eps;
        row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                                episode_started)
                          .count();
        trace.rows.push_back(row);
    }

    return TrainResult{std::move(agent), std::move(trace), std::move(best), best_report,
                       std::move(episode_returns)};
}

inline void no_observer(std::size_t, std::size_t, bool, const Assignment&, const Assignment&) {}

}  // namespace detail

// Deterministic-policy training with epsilon-gated exploration: the random
// branch perturbs the actor's log-probabilities with uniform noise of the
// configured magnitude, renormalizes, and samples per UE.
template <typename Env, typename Observer>
TrainResult ddpg_train(const Env& env, const DdpgHyper& hyper, std::size_t episodes,
                       std::uint64_t seed, Observer&& observe) {
    auto explorer = [&env, &hyper](auto&& /*probe*/, const Eigen::VectorXd& probs,
                                   std::mt19937_64& rng, std::size_t /*step*/) {
        std::uniform_real_distribution<double> jitter(-hyper.noise, hyper.noise);
        Eigen::VectorXd logits = probs.array().max(1e-300).log().matrix();
        for (Eigen::Index i = 0; i < logits.size(); ++i) logits[i] += jitter(rng);
        Eigen::VectorXd perturbed =
            detail::renormalize_policy(std::move(logits), env.num_ues(), env.num_subbands());
        Assignment a = env.sample_policy(perturbed, rng);
        return std::make_pair(std::move(a), std::move(perturbed));
    };
    return detail::train_core(env, hyper, episodes, seed, explorer,
                              std::forward<Observer>(observe));
}

template <typename Env>
TrainResult ddpg_train(const Env& env, const DdpgHyper& hyper, std::size_t episodes,
                       std::uint64_t seed) {
    return ddpg_train(env, hyper, episodes, seed, detail::no_observer);
}

inline AoConfig hybrid_inner_defaults() {
    AoConfig cfg;
    cfg.population = 10;
    cfg.iterations = 5;
    return cfg;
}

// Identical to ddpg_train except the exploration branch: a short warm-started
// Aquila run over the one-step reward, seeded with the actor's decoded
// proposal, supplies the action, stored one-hot in the same replay buffer.
template <typename Env, typename Observer>
TrainResult hybrid_train(const Env& env, const DdpgHyper& hyper, const AoConfig& ao_inner,
                         std::size_t episodes, std::uint64_t seed, Observer&& observe) {
    ao_inner.validate();
    auto explorer = [&env, &ao_inner, seed](auto&& probe, const Eigen::VectorXd& probs,
                                            std::mt19937_64& /*rng*/, std::size_t step) {
        const std::size_t S = env.num_subbands();
        const std::vector<Eigen::VectorXd> warm_start{encode_solution(env.decode_policy(probs))};
        auto one_step_reward = [&](const Eigen::VectorXd& x) {
            return probe(decode_solution(x, S)).reward;
        };
        const AoResult found = aquila_maximize(
            one_step_reward, env.num_ues(), 0.0, static_cast<double>(S), ao_inner,
            substream_seed(seed, rng_label::hybrid_inner, step),
            [](std::size_t, const Eigen::VectorXd&, double) {}, warm_start);
        Assignment a = decode_solution(found.best_x, S);
        Eigen::VectorXd one_hot = env.encode_action(a);
        return std::make_pair(std::move(a), std::move(one_hot));
    };
    return detail::train_core(env, hyper, episodes, seed, explorer,
                              std::forward<Observer>(observe));
}

template <typename Env>
TrainResult hybrid_train(const Env& env, const DdpgHyper& hyper, const AoConfig& ao_inner,
                         std::size_t episodes, std::uint64_t seed) {
    return hybrid_train(env, hyper, ao_inner, episodes, seed, detail::no_observer);
}

template <typename Env>
TrainResult hybrid_train(const Env& env, const DdpgHyper& hyper, std::size_t episodes,
                         std::uint64_t seed) {
    return hybrid_train(env, hyper, hybrid_inner_defaults(), episodes, seed, detail::no_observer);
}

}  // namespace cfsim

#endif  // CFSIM_DDPG_HPP
