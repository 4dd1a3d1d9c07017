#ifndef CFSIM_CHANNEL_HPP
#define CFSIM_CHANNEL_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cfsim/rng.hpp"

namespace cfsim {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

inline double distance(const Vec3& a, const Vec3& b) {
    const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

enum class ApPlacement { grid, uniform_random };
enum class PathLossModel { umi, none };

// Deployment geometry and numerology of one simulated network snapshot.
struct DeploymentConfig {
    double area_side_m = 1000.0;
    std::size_t num_aps = 100;        // L
    std::size_t antennas_per_ap = 4;  // N
    std::size_t num_ues = 40;         // K
    double ap_height_m = 12.5;
    double ue_height_m = 1.5;
    double carrier_hz = 5.9e9;
    double bandwidth_hz = 50e6;
    double rb_hz = 180e3;
    std::size_t num_subbands = 277;  // S
    std::uint64_t seed = 1;
    ApPlacement ap_placement = ApPlacement::grid;

    void validate() const {
        if (num_aps < 1) throw std::invalid_argument("deployment: num_aps must be >= 1");
        if (antennas_per_ap < 1) throw std::invalid_argument("deployment: antennas_per_ap must be >= 1");
        if (num_subbands < 1) throw std::invalid_argument("deployment: num_subbands must be >= 1");
        if (area_side_m <= 0 || ap_height_m <= 0 || ue_height_m <= 0 || carrier_hz <= 0 ||
            bandwidth_hz <= 0 || rb_hz <= 0)
            throw std::invalid_argument("deployment: physical quantities must be strictly positive");
        const std::size_t max_subbands =
            static_cast<std::size_t>(std::floor(bandwidth_hz / rb_hz)) + 1;
        if (num_subbands > max_subbands)
            throw std::invalid_argument("deployment: num_subbands exceeds floor(bandwidth/rb) + 1");
    }
};

struct Deployment {
    std::vector<Vec3> ap_positions;
    std::vector<Vec3> ue_positions;
};

// Tapped-delay-line small-scale fading parameters. Stands in for the external
// geometry-based channel generator while keeping the frequency dependence the
// allocation problem lives on.
struct FadingParams {
    std::size_t num_taps = 8;
    double delay_spread_s = 300e-9;
    double tap_decay = 1.0;  // E|a_p|^2 proportional to exp(-tap_decay * p)
    double shadowing_sigma_db = 4.0;
    PathLossModel path_loss = PathLossModel::umi;
    double noise_figure_db = 7.0;

    void validate() const {
        if (num_taps < 1) throw std::invalid_argument("fading: num_taps must be >= 1");
        if (delay_spread_s < 0) throw std::invalid_argument("fading: delay_spread_s must be >= 0");
        if (shadowing_sigma_db < 0) throw std::invalid_argument("fading: shadowing_sigma_db must be >= 0");
    }
};

// One multipath component of an AP-UE link.
struct Tap {
    double delay_s = 0.0;
    std::complex<double> amplitude{0.0, 0.0};
    double azimuth_rad = 0.0;
};

// Complex channel frequency responses h[k][l][s] (length-N vectors) plus the
// derived large-scale gains g[k][l]. Immutable once constructed; safe for
// concurrent reads.
class ChannelTensor {
public:
    ChannelTensor(std::size_t num_ues, std::size_t num_aps, std::size_t num_subbands,
                  std::size_t antennas_per_ap, std::vector<std::complex<double>> h)
        : k_(num_ues), l_(num_aps), s_(num_subbands), n_(antennas_per_ap), h_(std::move(h)) {
        if (h_.size() != k_ * l_ * s_ * n_)
            throw std::invalid_argument("ChannelTensor: data size does not match dimensions");
        for (const auto& v : h_)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw std::invalid_argument("ChannelTensor: non-finite entry");
        compute_gains();
    }

    std::size_t num_ues() const { return k_; }
    std::size_t num_aps() const { return l_; }
    std::size_t num_subbands() const { return s_; }
    std::size_t antennas_per_ap() const { return n_; }

    // Pointer to the N antenna coefficients of link (k, l) on subband s.
    const std::complex<double>* link(std::size_t k, std::size_t l, std::size_t s) const {
        return h_.data() + ((k * l_ + l) * s_ + s) * n_;
    }

    // Collective row h_{k,s}: all APs stacked, length N*L.
    Eigen::VectorXcd stacked_row(std::size_t k, std::size_t s) const {
        Eigen::VectorXcd row(static_cast<Eigen::Index>(n_ * l_));
        for (std::size_t l = 0; l < l_; ++l) {
            const std::complex<double>* p = link(k, l, s);
            for (std::size_t n = 0; n < n_; ++n) row[static_cast<Eigen::Index>(l * n_ + n)] = p[n];
        }
        return row;
    }

    // Large-scale linear power gain, mean over subbands of ||h[k][l][s]||^2.
    double large_scale_gain(std::size_t k, std::size_t l) const { return g_[k * l_ + l]; }
    const std::vector<double>& gains() const { return g_; }

    // Per-antenna squared magnitude summed over the link's antennas at one subband.
    double subband_gain(std::size_t k, std::size_t l, std::size_t s) const {
        const std::complex<double>* p = link(k, l, s);
        double acc = 0.0;
        for (std::size_t n = 0; n < n_; ++n) acc += std::norm(p[n]);
        return acc;
    }

    std::uint64_t content_hash() const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        auto feed = [&h](const void* ptr, std::size_t bytes) {
            const unsigned char* b = static_cast<const unsigned char*>(ptr);
            for (std::size_t i = 0; i < bytes; ++i) {
                h ^= b[i];
                h *= 0x100000001b3ULL;
            }
        };
        const std::uint32_t dims[4] = {static_cast<std::uint32_t>(k_), static_cast<std::uint32_t>(l_),
                                       static_cast<std::uint32_t>(s_), static_cast<std::uint32_t>(n_)};
        feed(dims, sizeof(dims));
        feed(h_.data(), h_.size() * sizeof(std::complex<double>));
        return h;
    }

    // Binary persistence: magic "CFR1", little-endian u32 K,L,S,N, then
    // row-major (k,l,s,n) interleaved (re,im) 64-bit floats.
    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open for writing: " + path);
        out.write("CFR1", 4);
        const std::uint32_t dims[4] = {static_cast<std::uint32_t>(k_), static_cast<std::uint32_t>(l_),
                                       static_cast<std::uint32_t>(s_), static_cast<std::uint32_t>(n_)};
        out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
        for (const auto& v : h_) {
            const double re = v.real(), im = v.imag();
            out.write(reinterpret_cast<const char*>(&re), sizeof(double));
            out.write(reinterpret_cast<const char*>(&im), sizeof(double));
        }
        if (!out) throw std::runtime_error("write failed: " + path);
    }

    static ChannelTensor load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open for reading: " + path);
        char magic[4];
        in.read(magic, 4);
        if (!in || std::memcmp(magic, "CFR1", 4) != 0)
            throw std::runtime_error("not a CFR1 file: " + path);
        std::uint32_t dims[4];
        in.read(reinterpret_cast<char*>(dims), sizeof(dims));
        if (!in) throw std::runtime_error("truncated CFR1 header: " + path);
        const std::size_t total = static_cast<std::size_t>(dims[0]) * dims[1] * dims[2] * dims[3];
        std::vector<std::complex<double>> data(total);
        for (std::size_t i = 0; i < total; ++i) {
            double re, im;
            in.read(reinterpret_cast<char*>(&re), sizeof(double));
            in.read(reinterpret_cast<char*>(&im), sizeof(double));
            if (!in) throw std::runtime_error("truncated CFR1 payload: " + path);
            data[i] = {re, im};
        }
        return ChannelTensor(dims[0], dims[1], dims[2], dims[3], std::move(data));
    }

    // Per-link per-subband gain in dB, one row per (ue, ap, subband).
    void export_gains_csv(std::ostream& out) const {
        out << "ue,ap,subband,gain_db\n";
        char buf[64];
        for (std::size_t k = 0; k < k_; ++k)
            for (std::size_t l = 0; l < l_; ++l)
                for (std::size_t s = 0; s < s_; ++s) {
                    const double g = subband_gain(k, l, s);
                    const double db = 10.0 * std::log10(std::max(g, 1e-300));
                    std::snprintf(buf, sizeof(buf), "%.12g", db);
                    out << k << ',' << l << ',' << s << ',' << buf << '\n';
                }
    }

private:
    void compute_gains() {
        g_.assign(k_ * l_, 0.0);
        for (std::size_t k = 0; k < k_; ++k)
            for (std::size_t l = 0; l < l_; ++l) {
                double acc = 0.0;
                for (std::size_t s = 0; s < s_; ++s) acc += subband_gain(k, l, s);
                g_[k * l_ + l] = acc / static_cast<double>(s_);
            }
    }

    std::size_t k_, l_, s_, n_;
    std::vector<std::complex<double>> h_;
    std::vector<double> g_;
};

// Subband center frequencies: the band [f_c - B/2, f_c + B/2) carved into
// rb_hz blocks, lowest S of them used.
inline std::vector<double> subband_centers_hz(const DeploymentConfig& cfg) {
    std::vector<double> f(cfg.num_subbands);
    const double f0 = cfg.carrier_hz - cfg.bandwidth_hz / 2.0;
    for (std::size_t s = 0; s < cfg.num_subbands; ++s)
        f[s] = f0 + (static_cast<double>(s) + 0.5) * cfg.rb_hz;
    return f;
}

// 3GPP UMi-style path loss, d in meters.
inline double umi_path_loss_db(double distance_m, double carrier_hz) {
    return 32.4 + 21.0 * std::log10(distance_m) + 20.0 * std::log10(carrier_hz / 1e9);
}

// Thermal noise power over one resource block, in watts.
inline double noise_power_w(const DeploymentConfig& cfg, const FadingParams& fading) {
    if (cfg.rb_hz <= 0) throw std::invalid_argument("noise_power_w: rb_hz must be > 0");
    const double dbm_per_hz = -174.0 + fading.noise_figure_db;
    return std::pow(10.0, (dbm_per_hz - 30.0) / 10.0) * cfg.rb_hz;
}

// Uniform circular array steering vector at azimuth theta. N = 1 degenerates
// to a single unit element. Half-wavelength inter-element spacing sets the
// radius: r/lambda = 1 / (4 sin(pi/N)).
inline void uca_response(std::size_t n_antennas, double theta, std::complex<double>* out) {
    if (n_antennas == 1) {
        out[0] = {1.0, 0.0};
        return;
    }
    const double pi = 3.14159265358979323846;
    const double radius_over_lambda = 1.0 / (4.0 * std::sin(pi / static_cast<double>(n_antennas)));
    for (std::size_t n = 0; n < n_antennas; ++n) {
        const double element_angle = 2.0 * pi * static_cast<double>(n) / static_cast<double>(n_antennas);
        const double phase = 2.0 * pi * radius_over_lambda * std::cos(theta - element_angle);
        out[n] = std::polar(1.0, phase);
    }
}

// CFR of one AP-UE link across given subband frequencies:
//   h_s = scale * sum_p a_p * a_array(theta_p) * exp(-j 2 pi f_s tau_p)
// `out` holds num_freqs * n_antennas entries, subband-major.
inline void link_cfr(const std::vector<Tap>& taps, std::size_t n_antennas,
                     const std::vector<double>& subband_freqs_hz, double scale,
                     std::complex<double>* out) {
    const double two_pi = 2.0 * 3.14159265358979323846;
    std::vector<std::complex<double>> steer(taps.size() * n_antennas);
    for (std::size_t p = 0; p < taps.size(); ++p)
        uca_response(n_antennas, taps[p].azimuth_rad, steer.data() + p * n_antennas);
    for (std::size_t s = 0; s < subband_freqs_hz.size(); ++s) {
        std::complex<double>* hs = out + s * n_antennas;
        for (std::size_t n = 0; n < n_antennas; ++n) hs[n] = {0.0, 0.0};
        for (std::size_t p = 0; p < taps.size(); ++p) {
            const std::complex<double> rot =
                taps[p].amplitude * std::polar(1.0, -two_pi * subband_freqs_hz[s] * taps[p].delay_s);
            const std::complex<double>* a = steer.data() + p * n_antennas;
            for (std::size_t n = 0; n < n_antennas; ++n) hs[n] += rot * a[n];
        }
        for (std::size_t n = 0; n < n_antennas; ++n) hs[n] *= scale;
    }
}

// AP grid/random placement plus uniform UE drops. Identical config and seed
// give byte-identical output.
inline Deployment generate_deployment(const DeploymentConfig& cfg) {
    cfg.validate();
    Deployment dep;
    dep.ap_positions.reserve(cfg.num_aps);
    if (cfg.ap_placement == ApPlacement::grid) {
        const std::size_t side =
            static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(cfg.num_aps))));
        const double cell = cfg.area_side_m / static_cast<double>(side);
        for (std::size_t idx = 0; idx < cfg.num_aps; ++idx) {
            const std::size_t row = idx / side, col = idx % side;
            dep.ap_positions.push_back({(static_cast<double>(col) + 0.5) * cell,
                                        (static_cast<double>(row) + 0.5) * cell, cfg.ap_height_m});
        }
    } else {
        std::mt19937_64 rng(substream_seed(cfg.seed, rng_label::deployment, 1));
        std::uniform_real_distribution<double> u(0.0, cfg.area_side_m);
        for (std::size_t idx = 0; idx < cfg.num_aps; ++idx) {
            const double x = u(rng), y = u(rng);
            dep.ap_positions.push_back({x, y, cfg.ap_height_m});
        }
    }
    std::mt19937_64 rng(substream_seed(cfg.seed, rng_label::deployment, 2));
    std::uniform_real_distribution<double> u(0.0, cfg.area_side_m);
    dep.ue_positions.reserve(cfg.num_ues);
    for (std::size_t k = 0; k < cfg.num_ues; ++k) {
        const double x = u(rng), y = u(rng);
        dep.ue_positions.push_back({x, y, cfg.ue_height_m});
    }
    return dep;
}

// Draws the tapped-delay-line for one link. Exposed so tests can reuse the
// same tap statistics.
inline std::vector<Tap> draw_taps(const FadingParams& fading, std::mt19937_64& rng) {
    const double pi = 3.14159265358979323846;
    std::vector<Tap> taps(fading.num_taps);
    // Normalized exponentially decaying mean tap powers.
    double total = 0.0;
    std::vector<double> mean_power(fading.num_taps);
    for (std::size_t p = 0; p < fading.num_taps; ++p) {
        mean_power[p] = std::exp(-fading.tap_decay * static_cast<double>(p));
        total += mean_power[p];
    }
    std::uniform_real_distribution<double> u_delay(0.0, fading.delay_spread_s);
    std::uniform_real_distribution<double> u_angle(0.0, 2.0 * pi);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t p = 0; p < fading.num_taps; ++p) {
        const double sigma = std::sqrt(mean_power[p] / total / 2.0);
        const double re = sigma * gauss(rng), im = sigma * gauss(rng);
        const double delay = fading.delay_spread_s > 0.0 ? u_delay(rng) : 0.0;
        taps[p] = Tap{delay, {re, im}, u_angle(rng)};
    }
    return taps;
}

// Synthesizes the full channel tensor. RNG substreams are derived per (k, l)
// pair from the config seed, so the (k, l) loop order is irrelevant.
inline ChannelTensor generate_cfr(const Deployment& dep, const FadingParams& fading,
                                  const DeploymentConfig& cfg) {
    cfg.validate();
    fading.validate();
    if (dep.ap_positions.size() != cfg.num_aps || dep.ue_positions.size() != cfg.num_ues)
        throw std::invalid_argument("generate_cfr: deployment inconsistent with config");
    const std::size_t K = cfg.num_ues, L = cfg.num_aps, S = cfg.num_subbands, N = cfg.antennas_per_ap;
    const std::vector<double> freqs = subband_centers_hz(cfg);
    std::vector<std::complex<double>> h(K * L * S * N);
    std::vector<std::complex<double>> link_buf(S * N);
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t l = 0; l < L; ++l) {
            const double d = distance(dep.ue_positions[k], dep.ap_positions[l]);
            if (d <= 0.0)
                throw std::runtime_error("generate_cfr: degenerate geometry, UE " + std::to_string(k) +
                                         " co-located with AP " + std::to_string(l));
            std::mt19937_64 rng(substream_seed(cfg.seed, rng_label::channel, k, l));
            const std::vector<Tap> taps = draw_taps(fading, rng);
            double pl_linear = 1.0;
            if (fading.path_loss == PathLossModel::umi)
                pl_linear = std::pow(10.0, -umi_path_loss_db(d, cfg.carrier_hz) / 10.0);
            double sh_linear = 1.0;
            if (fading.shadowing_sigma_db > 0.0) {
                std::normal_distribution<double> gauss(0.0, fading.shadowing_sigma_db);
                sh_linear = std::pow(10.0, gauss(rng) / 10.0);
            }
            link_cfr(taps, N, freqs, std::sqrt(pl_linear * sh_linear), link_buf.data());
            for (std::size_t s = 0; s < S; ++s)
                for (std::size_t n = 0; n < N; ++n)
                    h[((k * L + l) * S + s) * N + n] = link_buf[s * N + n];
        }
    }
    return ChannelTensor(K, L, S, N, std::move(h));
}

}  // namespace cfsim

#endif  // CFSIM_CHANNEL_HPP
