#ifndef CFSIM_ENV_HPP
#define CFSIM_ENV_HPP

#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

#include "cfsim/encoding.hpp"
#include "cfsim/objective.hpp"

namespace cfsim {

// Reallocation environment over one static channel snapshot. The state is
// [per-(UE, subband) normalized log own-masked gain features | one-hot of the
// current assignment], the reward is the normalized objective value, and an
// episode is a fixed number of reallocation steps.
class AllocationEnv {
public:
    struct StepResult {
        Eigen::VectorXd next_state;
        double reward = 0.0;
        ObjectiveReport report;
    };

    explicit AllocationEnv(const Evaluator& evaluator, std::size_t horizon = 20)
        : evaluator_(&evaluator), horizon_(horizon) {
        if (horizon < 1) throw std::invalid_argument("env: horizon must be >= 1");
        const ChannelTensor& ch = evaluator.channels();
        const ClusterMap& cl = evaluator.cluster();
        k_ = ch.num_ues();
        s_ = ch.num_subbands();
        features_.resize(static_cast<Eigen::Index>(k_ * s_));
        // Own-masked per-subband gains in dB, min-max normalized across the
        // snapshot so features land in [0, 1] regardless of path-loss scale.
        Eigen::Index idx = 0;
        for (std::size_t k = 0; k < k_; ++k)
            for (std::size_t s = 0; s < s_; ++s) {
                double gain = 0.0;
                for (std::size_t l : cl.serves[k]) gain += ch.subband_gain(k, l, s);
                features_[idx++] = 10.0 * std::log10(std::max(gain, 1e-300));
            }
        if (features_.size() > 0) {
            const double lo = features_.minCoeff(), hi = features_.maxCoeff();
            if (hi > lo)
                features_ = (features_.array() - lo) / (hi - lo);
            else
                features_.setConstant(0.5);
        }
    }

    std::size_t num_ues() const { return k_; }
    std::size_t num_subbands() const { return s_; }
    std::size_t horizon() const { return horizon_; }
    std::size_t state_dim() const { return 2 * k_ * s_; }
    std::size_t action_dim() const { return k_ * s_; }
    const Evaluator& evaluator() const { return *evaluator_; }

    // Episode start: features plus the all-zero one-hot of "nothing assigned".
    Eigen::VectorXd initial_state() const {
        Eigen::VectorXd state = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(state_dim()));
        state.head(features_.size()) = features_;
        return state;
    }

    // Pure transition: the next state encodes the chosen assignment, the
    // reward is its objective value. History does not matter.
    StepResult step(const Assignment& action) const {
        if (action.num_ues() != k_ || action.num_subbands() != s_)
            throw std::invalid_argument("env step: assignment shape mismatch");
        StepResult out;
        out.report = evaluator_->evaluate(action);
        out.reward = out.report.normalized_value;
        out.next_state = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(state_dim()));
        out.next_state.head(features_.size()) = features_;
        for (std::size_t k = 0; k < k_; ++k)
            if (action.is_assigned(k))
                out.next_state[static_cast<Eigen::Index>(k_ * s_ + k * s_ + action.subband_of(k))] =
                    1.0;
        return out;
    }

    // Actor output (K*S softmax probabilities, UE-major) to assignment by
    // per-UE argmax; ties go to the lowest subband index.
    Assignment decode_policy(const Eigen::VectorXd& probs) const {
        if (static_cast<std::size_t>(probs.size()) != k_ * s_)
            throw std::invalid_argument("env: policy vector length mismatch");
        Assignment a(k_, s_);
        for (std::size_t k = 0; k < k_; ++k) {
            Eigen::Index best = 0;
            for (Eigen::Index s = 1; s < static_cast<Eigen::Index>(s_); ++s)
                if (probs[static_cast<Eigen::Index>(k * s_) + s] >
                    probs[static_cast<Eigen::Index>(k * s_) + best])
                    best = s;
            a.assign(k, static_cast<std::size_t>(best));
        }
        return a;
    }

    // One-hot action encoding of an assignment, matching the actor layout.
    Eigen::VectorXd encode_action(const Assignment& a) const {
        if (a.num_ues() != k_ || a.num_subbands() != s_)
            throw std::invalid_argument("env: assignment shape mismatch");
        Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k_ * s_));
        for (std::size_t k = 0; k < k_; ++k)
            if (a.is_assigned(k)) x[static_cast<Eigen::Index>(k * s_ + a.subband_of(k))] = 1.0;
        return x;
    }

    // Per-UE categorical sample from softmax probabilities.
    Assignment sample_policy(const Eigen::VectorXd& probs, std::mt19937_64& rng) const {
        if (static_cast<std::size_t>(probs.size()) != k_ * s_)
            throw std::invalid_argument("env: policy vector length mismatch");
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        Assignment a(k_, s_);
        for (std::size_t k = 0; k < k_; ++k) {
            const double u = unit(rng);
            double acc = 0.0;
            std::size_t chosen = s_ - 1;
            for (std::size_t s = 0; s < s_; ++s) {
                acc += probs[static_cast<Eigen::Index>(k * s_ + s)];
                if (u <= acc) {
                    chosen = s;
                    break;
                }
            }
            a.assign(k, chosen);
        }
        return a;
    }

    const Eigen::VectorXd& features() const { return features_; }

private:
    const Evaluator* evaluator_;
    std::size_t horizon_;
    std::size_t k_ = 0, s_ = 0;
    Eigen::VectorXd features_;
};

}  // namespace cfsim

#endif  // CFSIM_ENV_HPP
