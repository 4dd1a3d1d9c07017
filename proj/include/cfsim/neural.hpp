#ifndef CFSIM_NEURAL_HPP
#define CFSIM_NEURAL_HPP

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cfsim/rng.hpp"

namespace cfsim {

enum class OutputActivation { identity, softmax_rows };

struct MlpConfig {
    std::size_t d_in = 1;
    std::size_t h1 = 64;
    std::size_t h2 = 32;
    std::size_t d_out = 1;
    OutputActivation output = OutputActivation::identity;
    std::size_t softmax_group = 0;  // rows per softmax group when output is softmax_rows

    void validate() const {
        if (d_in < 1 || h1 < 1 || h2 < 1 || d_out < 1)
            throw std::invalid_argument("mlp: layer sizes must be >= 1");
        if (output == OutputActivation::softmax_rows) {
            if (softmax_group < 1) throw std::invalid_argument("mlp: softmax group must be >= 1");
            if (d_out % softmax_group != 0)
                throw std::invalid_argument("mlp: output size must be a multiple of the softmax group");
        }
    }
};

// Dense 2-hidden-layer perceptron, ReLU activations, identity or grouped
// softmax head. Forward/backward are matrix-batched: columns are samples.
class Mlp {
public:
    struct Cache {
        Eigen::MatrixXd x, z1, a1, z2, a2, y;
        std::uint64_t tag = 0;
    };

    struct Gradients {
        Eigen::MatrixXd dw1, dw2, dw3;
        Eigen::VectorXd db1, db2, db3;
        Eigen::MatrixXd dinput;
    };

    Mlp() = default;

    Mlp(const MlpConfig& cfg, std::mt19937_64& rng) : cfg_(cfg) {
        cfg.validate();
        w1_ = init_weight(cfg.h1, cfg.d_in, rng);
        w2_ = init_weight(cfg.h2, cfg.h1, rng);
        w3_ = init_weight(cfg.d_out, cfg.h2, rng);
        b1_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cfg.h1));
        b2_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cfg.h2));
        b3_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cfg.d_out));
    }

    const MlpConfig& config() const { return cfg_; }
    std::uint64_t version() const { return version_; }

    Eigen::MatrixXd& w1() { return w1_; }
    Eigen::MatrixXd& w2() { return w2_; }
    Eigen::MatrixXd& w3() { return w3_; }
    Eigen::VectorXd& b1() { return b1_; }
    Eigen::VectorXd& b2() { return b2_; }
    Eigen::VectorXd& b3() { return b3_; }
    const Eigen::MatrixXd& w1() const { return w1_; }
    const Eigen::MatrixXd& w2() const { return w2_; }
    const Eigen::MatrixXd& w3() const { return w3_; }
    const Eigen::VectorXd& b1() const { return b1_; }
    const Eigen::VectorXd& b2() const { return b2_; }
    const Eigen::VectorXd& b3() const { return b3_; }

    // Call after any direct parameter mutation so stale caches are detectable.
    void bump_version() { ++version_; }

    Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Cache* cache = nullptr) const {
        if (static_cast<std::size_t>(x.rows()) != cfg_.d_in)
            throw std::invalid_argument("mlp forward: input rows != d_in");
        Eigen::MatrixXd z1 = (w1_ * x).colwise() + b1_;
        Eigen::MatrixXd a1 = z1.cwiseMax(0.0);
        Eigen::MatrixXd z2 = (w2_ * a1).colwise() + b2_;
        Eigen::MatrixXd a2 = z2.cwiseMax(0.0);
        Eigen::MatrixXd y = (w3_ * a2).colwise() + b3_;
        if (cfg_.output == OutputActivation::softmax_rows) apply_softmax(y);
        if (cache) {
            cache->x = x;
            cache->z1 = std::move(z1);
            cache->a1 = std::move(a1);
            cache->z2 = std::move(z2);
            cache->a2 = std::move(a2);
            cache->y = y;
            cache->tag = version_;
        }
        return y;
    }

    // Exact reverse-mode gradients of a scalar loss given dL/dY. The cache
    // must come from a forward on the current parameters.
    Gradients backward(const Cache& cache, const Eigen::MatrixXd& dy) const {
        if (cache.tag != version_)
            throw std::logic_error("mlp backward: cache is stale (parameters changed since forward)");
        if (dy.rows() != cache.y.rows() || dy.cols() != cache.y.cols())
            throw std::invalid_argument("mlp backward: gradient shape mismatch");
        Eigen::MatrixXd dz3;
        if (cfg_.output == OutputActivation::softmax_rows) {
            dz3.resizeLike(dy);
            const Eigen::Index group = static_cast<Eigen::Index>(cfg_.softmax_group);
            for (Eigen::Index col = 0; col < dy.cols(); ++col)
                for (Eigen::Index start = 0; start < dy.rows(); start += group) {
                    const auto y = cache.y.col(col).segment(start, group);
                    const auto g = dy.col(col).segment(start, group);
                    const double dot = y.dot(g);
                    dz3.col(col).segment(start, group) =
                        y.cwiseProduct(g - Eigen::VectorXd::Constant(group, dot));
                }
        } else {
            dz3 = dy;
        }
        Gradients grads;
        grads.dw3 = dz3 * cache.a2.transpose();
        grads.db3 = dz3.rowwise().sum();
        Eigen::MatrixXd da2 = w3_.transpose() * dz3;
        Eigen::MatrixXd dz2 =
            da2.cwiseProduct((cache.z2.array() > 0.0).cast<double>().matrix());
        grads.dw2 = dz2 * cache.a1.transpose();
        grads.db2 = dz2.rowwise().sum();
        Eigen::MatrixXd da1 = w2_.transpose() * dz2;
        Eigen::MatrixXd dz1 =
            da1.cwiseProduct((cache.z1.array() > 0.0).cast<double>().matrix());
        grads.dw1 = dz1 * cache.x.transpose();
        grads.db1 = dz1.rowwise().sum();
        grads.dinput = w1_.transpose() * dz1;
        return grads;
    }

    // Flat parameter access in a fixed order; used by persistence and by the
    // finite-difference tests.
    std::vector<double*> parameter_blocks() {
        return {w1_.data(), b1_.data(), w2_.data(), b2_.data(), w3_.data(), b3_.data()};
    }
    std::vector<std::size_t> parameter_sizes() const {
        return {static_cast<std::size_t>(w1_.size()), static_cast<std::size_t>(b1_.size()),
                static_cast<std::size_t>(w2_.size()), static_cast<std::size_t>(b2_.size()),
                static_cast<std::size_t>(w3_.size()), static_cast<std::size_t>(b3_.size())};
    }

    void save(std::ostream& out) const {
        out.write("MLP1", 4);
        const std::uint32_t sizes[4] = {
            static_cast<std::uint32_t>(cfg_.d_in), static_cast<std::uint32_t>(cfg_.h1),
            static_cast<std::uint32_t>(cfg_.h2), static_cast<std::uint32_t>(cfg_.d_out)};
        out.write(reinterpret_cast<const char*>(sizes), sizeof(sizes));
        const std::uint8_t act = cfg_.output == OutputActivation::softmax_rows ? 1 : 0;
        out.write(reinterpret_cast<const char*>(&act), 1);
        const std::uint32_t group = static_cast<std::uint32_t>(cfg_.softmax_group);
        out.write(reinterpret_cast<const char*>(&group), sizeof(group));
        write_matrix(out, w1_);
        write_matrix(out, b1_);
        write_matrix(out, w2_);
        write_matrix(out, b2_);
        write_matrix(out, w3_);
        write_matrix(out, b3_);
        if (!out) throw std::runtime_error("mlp save: write failed");
    }

    static Mlp load(std::istream& in) {
        char magic[4];
        in.read(magic, 4);
        if (!in || std::memcmp(magic, "MLP1", 4) != 0)
            throw std::runtime_error("mlp load: bad magic");
        std::uint32_t sizes[4];
        in.read(reinterpret_cast<char*>(sizes), sizeof(sizes));
        std::uint8_t act = 0;
        in.read(reinterpret_cast<char*>(&act), 1);
        std::uint32_t group = 0;
        in.read(reinterpret_cast<char*>(&group), sizeof(group));
        if (!in) throw std::runtime_error("mlp load: truncated header");
        Mlp net;
        net.cfg_.d_in = sizes[0];
        net.cfg_.h1 = sizes[1];
        net.cfg_.h2 = sizes[2];
        net.cfg_.d_out = sizes[3];
        net.cfg_.output = act ? OutputActivation::softmax_rows : OutputActivation::identity;
        net.cfg_.softmax_group = group;
        net.cfg_.validate();
        net.w1_ = read_matrix(in, sizes[1], sizes[0]);
        net.b1_ = read_matrix(in, sizes[1], 1);
        net.w2_ = read_matrix(in, sizes[2], sizes[1]);
        net.b2_ = read_matrix(in, sizes[2], 1);
        net.w3_ = read_matrix(in, sizes[3], sizes[2]);
        net.b3_ = read_matrix(in, sizes[3], 1);
        return net;
    }

    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("mlp save: cannot open " + path);
        save(out);
    }

    static Mlp load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("mlp load: cannot open " + path);
        return load(in);
    }

private:
    static Eigen::MatrixXd init_weight(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
        const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
        std::uniform_real_distribution<double> u(-bound, bound);
        Eigen::MatrixXd w(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = u(rng);
        return w;
    }

    void apply_softmax(Eigen::MatrixXd& y) const {
        const Eigen::Index group = static_cast<Eigen::Index>(cfg_.softmax_group);
        for (Eigen::Index col = 0; col < y.cols(); ++col)
            for (Eigen::Index start = 0; start < y.rows(); start += group) {
                auto seg = y.col(col).segment(start, group);
                const double peak = seg.maxCoeff();
                seg = (seg.array() - peak).exp();
                seg /= seg.sum();
            }
    }

    static void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                const double v = m(r, c);
                out.write(reinterpret_cast<const char*>(&v), sizeof(double));
            }
    }

    static Eigen::MatrixXd read_matrix(std::istream& in, std::size_t rows, std::size_t cols) {
        Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                double v;
                in.read(reinterpret_cast<char*>(&v), sizeof(double));
                if (!in) throw std::runtime_error("mlp load: truncated payload");
                m(r, c) = v;
            }
        return m;
    }

    MlpConfig cfg_;
    Eigen::MatrixXd w1_, w2_, w3_;
    Eigen::VectorXd b1_, b2_, b3_;
    std::uint64_t version_ = 0;
};

// Bias-corrected Adam moments for one tensor.
struct AdamTensor {
    Eigen::MatrixXd m, v;
};

struct AdamState {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::uint64_t step = 0;
    std::vector<AdamTensor> tensors;
};

// One Adam update on a single tensor; exposed so the scalar examples can hit
// the arithmetic directly.
inline void adam_update(Eigen::Ref<Eigen::MatrixXd> param, const Eigen::MatrixXd& grad,
                        AdamTensor& state, double lr, double beta1, double beta2, double eps,
                        std::uint64_t step) {
    if (state.m.size() == 0) {
        state.m = Eigen::MatrixXd::Zero(param.rows(), param.cols());
        state.v = Eigen::MatrixXd::Zero(param.rows(), param.cols());
    }
    if (grad.rows() != param.rows() || grad.cols() != param.cols())
        throw std::invalid_argument("adam: gradient shape mismatch");
    state.m = beta1 * state.m + (1.0 - beta1) * grad;
    state.v = beta2 * state.v + (1.0 - beta2) * grad.cwiseProduct(grad);
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
    param.array() -= lr * (state.m.array() / bc1) /
                     ((state.v.array() / bc2).sqrt() + eps);
}

// Applies Adam to every parameter tensor of the network.
inline void adam_step(Mlp& net, const Mlp::Gradients& grads, AdamState& state, double lr) {
    if (state.tensors.empty()) state.tensors.resize(6);
    ++state.step;
    adam_update(net.w1(), grads.dw1, state.tensors[0], lr, state.beta1, state.beta2, state.eps,
                state.step);
    adam_update(net.b1(), grads.db1, state.tensors[1], lr, state.beta1, state.beta2, state.eps,
                state.step);
    adam_update(net.w2(), grads.dw2, state.tensors[2], lr, state.beta1, state.beta2, state.eps,
                state.step);
    adam_update(net.b2(), grads.db2, state.tensors[3], lr, state.beta1, state.beta2, state.eps,
                state.step);
    adam_update(net.w3(), grads.dw3, state.tensors[4], lr, state.beta1, state.beta2, state.eps,
                state.step);
    adam_update(net.b3(), grads.db3, state.tensors[5], lr, state.beta1, state.beta2, state.eps,
                state.step);
    net.bump_version();
}

// theta_target <- tau * theta_online + (1 - tau) * theta_target.
inline void soft_update(Mlp& target, const Mlp& online, double tau) {
    if (tau < 0.0 || tau > 1.0) throw std::invalid_argument("soft_update: tau must be in [0, 1]");
    target.w1() = tau * online.w1() + (1.0 - tau) * target.w1();
    target.b1() = tau * online.b1() + (1.0 - tau) * target.b1();
    target.w2() = tau * online.w2() + (1.0 - tau) * target.w2();
    target.b2() = tau * online.b2() + (1.0 - tau) * target.b2();
    target.w3() = tau * online.w3() + (1.0 - tau) * target.w3();
    target.b3() = tau * online.b3() + (1.0 - tau) * target.b3();
    target.bump_version();
}

struct Transition {
    Eigen::VectorXd state;
    Eigen::VectorXd action;
    double reward = 0.0;
    Eigen::VectorXd next_state;
};

struct TransitionBatch {
    Eigen::MatrixXd states;       // d_s x B
    Eigen::MatrixXd actions;      // d_a x B
    Eigen::VectorXd rewards;      // B
    Eigen::MatrixXd next_states;  // d_s x B
};

// Fixed-capacity FIFO transition store with uniform with-replacement sampling.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
        if (capacity < 1) throw std::invalid_argument("replay: capacity must be >= 1");
    }

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return store_.size(); }

    void push(Transition t) {
        if (store_.size() < capacity_) {
            store_.push_back(std::move(t));
        } else {
            store_[cursor_] = std::move(t);
            cursor_ = (cursor_ + 1) % capacity_;
        }
    }

    // Empty when fewer transitions than the batch are stored; the trainer
    // skips its update in that case.
    std::optional<TransitionBatch> sample(std::size_t batch_size, std::mt19937_64& rng) const {
        if (batch_size < 1) throw std::invalid_argument("replay: batch size must be >= 1");
        if (store_.size() < batch_size) return std::nullopt;
        std::uniform_int_distribution<std::size_t> pick(0, store_.size() - 1);
        TransitionBatch batch;
        const Eigen::Index ds = store_[0].state.size();
        const Eigen::Index da = store_[0].action.size();
        const Eigen::Index b = static_cast<Eigen::Index>(batch_size);
        batch.states.resize(ds, b);
        batch.actions.resize(da, b);
        batch.rewards.resize(b);
        batch.next_states.resize(ds, b);
        for (Eigen::Index j = 0; j < b; ++j) {
            const Transition& t = store_[pick(rng)];
            batch.states.col(j) = t.state;
            batch.actions.col(j) = t.action;
            batch.rewards[j] = t.reward;
            batch.next_states.col(j) = t.next_state;
        }
        return batch;
    }

    const Transition& at(std::size_t i) const { return store_.at(i); }

private:
    std::size_t capacity_;
    std::size_t cursor_ = 0;
    std::vector<Transition> store_;
};

}  // namespace cfsim

#endif  // CFSIM_NEURAL_HPP
