#ifndef CFSIM_CONFIG_HPP
#define CFSIM_CONFIG_HPP

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfsim/aquila.hpp"
#include "cfsim/channel.hpp"
#include "cfsim/clustering.hpp"
#include "cfsim/ddpg.hpp"
#include "cfsim/objective.hpp"
#include "cfsim/phy.hpp"

namespace cfsim {

enum class SolverKind { ao, rlm, hym };

inline const char* solver_name(SolverKind kind) {
    switch (kind) {
        case SolverKind::ao: return "ao";
        case SolverKind::rlm: return "rlm";
        default: return "hym";
    }
}

// Everything one experiment needs: instance generation, scoring, solver
// selection and budgets, seeds, and output location. Defaults describe the
// full-scale deployment; profile files override toward desk scale.
struct ExperimentConfig {
    std::string experiment_id = "experiment";
    DeploymentConfig deployment;
    FadingParams fading;
    std::size_t cluster_size = 4;
    PhyConfig phy;
    ObjectiveWeights weights;
    SolverKind solver = SolverKind::hym;
    AoConfig ao;
    AoConfig hybrid_inner;
    DdpgHyper ddpg;
    std::size_t episodes = 50;
    std::size_t horizon = 20;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    std::string out_dir = "out";

    ExperimentConfig() {
        phy.noise_w = 0.0;  // sentinel: derive from bandwidth and noise figure
        hybrid_inner = hybrid_inner_defaults();
    }

    // Physical-layer settings with the noise sentinel resolved.
    PhyConfig resolved_phy() const {
        PhyConfig p = phy;
        if (p.noise_w <= 0.0) p.noise_w = noise_power_w(deployment, fading);
        return p;
    }

    void validate() const {
        deployment.validate();
        fading.validate();
        resolved_phy().validate();
        weights.validate();
        ao.validate();
        hybrid_inner.validate();
        ddpg.validate();
        if (cluster_size < 1) throw std::invalid_argument("config: cluster.size must be >= 1");
        if (episodes < 1) throw std::invalid_argument("config: train.episodes must be >= 1");
        if (horizon < 1) throw std::invalid_argument("config: train.horizon must be >= 1");
        if (seeds.empty()) throw std::invalid_argument("config: seeds must list at least one seed");
        if (experiment_id.empty())
            throw std::invalid_argument("config: experiment.id must not be empty");
        for (char c : experiment_id)
            if (c == ',' || c == '\n' || c == '#')
                throw std::invalid_argument("config: experiment.id must not contain ',', '#', or newlines");
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline double parse_real(const std::string& v) {
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        throw std::runtime_error("expected a real number, got '" + v + "'");
    }
    if (used != v.size()) throw std::runtime_error("expected a real number, got '" + v + "'");
    return x;
}

inline std::uint64_t parse_unsigned(const std::string& v) {
    if (v.empty() || v[0] == '-') throw std::runtime_error("expected a nonnegative integer, got '" + v + "'");
    std::size_t used = 0;
    std::uint64_t x = 0;
    try {
        x = std::stoull(v, &used);
    } catch (const std::exception&) {
        throw std::runtime_error("expected a nonnegative integer, got '" + v + "'");
    }
    if (used != v.size())
        throw std::runtime_error("expected a nonnegative integer, got '" + v + "'");
    return x;
}

inline std::vector<std::uint64_t> parse_seed_list(const std::string& v) {
    std::vector<std::uint64_t> seeds;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw std::runtime_error("empty entry in seed list");
        seeds.push_back(parse_unsigned(item));
    }
    if (seeds.empty()) throw std::runtime_error("seed list is empty");
    return seeds;
}

inline SolverKind parse_solver_value(const std::string& v) {
    if (v == "ao") return SolverKind::ao;
    if (v == "rlm") return SolverKind::rlm;
    if (v == "hym") return SolverKind::hym;
    throw std::runtime_error("unknown solver '" + v + "' (valid: ao, rlm, hym)");
}

// Applies one key. Throws plain messages; the caller adds file:line context.
inline void apply_config_key(ExperimentConfig& cfg, const std::string& key,
                             const std::string& value) {
    if (key == "experiment.id") {
        cfg.experiment_id = value;
    } else if (key == "deployment.area_side_m") {
        cfg.deployment.area_side_m = parse_real(value);
    } else if (key == "deployment.num_aps") {
        cfg.deployment.num_aps = static_cast<std::size_t>(parse_unsigned(value));
    } else if (key == "deployment.antennas_per_ap") {
        cfg.deployment.antennas_per_ap = static_cast<std::size_t>(parse_unsigned(value));
    } else if (key == "deployment.num_ues") {
        cfg.deployment.num_ues = static_cast<std::size_t>(parse_unsigned(value));
    } else if (key == "deployment.ap_height_m") {
        cfg.deployment.ap_height_m = parse_real(value);
    } else if (key == "deployment.ue_height_m") {
        cfg.deployment.ue_height_m = parse_real(value);
    } else if (key == "deployment.carrier_hz") {
        cfg.deployment.carrier_hz = parse_real(value);
    } else if (key == "deployment.bandwidth_hz") {
        cfg.deployment.bandwidth_hz = parse_real(value);
    } else if (key == "deployment.rb_hz") {
        cfg.deployment.rb_hz = parse_real(value);
    } else if (key == "deployment.num_subbands") {
        cfg.deployment.num_subbands = static_cast<std::size_t>(parse_unsigned(value));
    } else if (key == "deployment.seed") {
        cfg.deployment.seed = parse_unsigned(value);
    } else if (key == "deployment.ap_placement") {
        if (value == "grid")
            cfg.deployment.ap_placement = ApPlacement::grid;
        else if (value == "uniform_random")
            cfg.deployment.ap_placement = ApPlacement::uniform_random;
        else
            throw std::runtime_error("unknown placement '" + value +
                                     "' (valid: grid, uniform_random)");
    } else if (key == "fading.num_taps") {
        cfg.fading.num_taps = static_cast<std::size_t>(parse_unsigned(value));
    } else if (key == "fading.delay_spread_s") {
        cfg.fading.delay_spread_s = parse_real(value);
    } else if (key == "fading.tap_decay") {
        cfg.fading.tap_decay = parse_real(value);
    } else if (key == "fading.shadowing_sigma_db") {
        cfg.fading.shadowing_sigma_db = parse_real(value);
    } else if (key == "fading.path_loss") {
        if (value == "umi")
            cfg.fading.path_loss = PathLossModel::umi;
        else if (value == "none")
            cfg.fading.path_loss = PathLossModel::none;
        else
            throw std::runtime_error("unknown path loss model '" + value + "' (valid: umi, none)");
    } else if (key == "fading.noise_figure_db") {
        cfg.fading.noise_figure_db = parse_real(value);
    } else if (key == "cluster.size") {
        cfg.cluster_size = static_cast<std::size_t>(parse_unsigned(value));
    } else if (key == "phy.p_max_w") {
        cfg.phy.p_max_w = parse_real(value);
    } else if (key == "phy.tau_p") {
        cfg.phy.tau_p = static_cast<std::size_t>(parse_unsigned(value));
    } else if (key == "phy.noise_w") {
        cfg.phy.noise_w = parse_real(value);
    } else if (key == "phy.scaling") {
        if (value == "unit_rescale")
            cfg.phy.scaling = ZfScaling::unit_rescale;
        else if (value == "as_printed")
            cfg.phy.scaling = ZfScaling::as_printed;
        else
            throw std::runtime_error("unknown scaling '" + value +
                                     "' (valid: unit_rescale, as_printed)");
    } else if (key == "phy.cond_limit") {
        cfg.phy.cond_limit = parse_real(value);
    } else if (key == "objective.w_eta") {
        cfg.weights.w_eta = parse_real(value);
    } else if (key == "objective.w_evd") {
        cfg.weights.w_evd = parse_real(value);
    } else if (key == "objective.w_gini") {
        cfg.weights.w_gini = parse_real(value);
    } else if (key == "objective.eta_th_bps_hz") {
        cfg.weights.eta_th_bps_hz = parse_real(value);
    } else if (key == "objective.rho_max_w") {
        cfg.weights.rho_max_w = parse_real(value);
    } else if (key == "solver") {
        cfg.solver = parse_solver_value(value);
    } else if (key == "ao.population") {
        cfg.ao.population = static_cast<std::size_t>(parse_unsigned(value));
    } else if (key == "ao.iterations") {
        cfg.ao.iterations = static_cast<std::size_t>(parse_unsigned(value));
    } else if (key == "ao.levy_beta") {
        cfg.ao.levy_beta = parse_real(value);
    } else if (key == "ao.alpha") {
        cfg.ao.alpha = parse_real(value);
    } else if (key == "ao.delta") {
        cfg.ao.delta = parse_real(value);
    } else if (key == "hybrid.population") {
        cfg.hybrid_inner.population = static_cast<std::size_t>(parse_unsigned(value));
    } else if (key == "hybrid.iterations") {
        cfg.hybrid_inner.iterations = static_cast<std::size_t>(parse_unsigned(value));
    } else if (key == "ddpg.actor_lr") {
        cfg.ddpg.actor_lr = parse_real(value);
    } else if (key == "ddpg.critic_lr") {
        cfg.ddpg.critic_lr = parse_real(value);
    } else if (key == "ddpg.gamma") {
        cfg.ddpg.gamma = parse_real(value);
    } else if (key == "ddpg.buffer_capacity") {
        cfg.ddpg.buffer_capacity = static_cast<std::size_t>(parse_unsigned(value));
    } else if (key == "ddpg.batch_size") {
        cfg.ddpg.batch_size = static_cast<std::size_t>(parse_unsigned(value));
    } else if (key == "ddpg.tau") {
        cfg.ddpg.tau = parse_real(value);
    } else if (key == "ddpg.noise") {
        cfg.ddpg.noise = parse_real(value);
    } else if (key == "ddpg.epsilon_start") {
        cfg.ddpg.epsilon_start = parse_real(value);
    } else if (key == "ddpg.epsilon_decay") {
        cfg.ddpg.epsilon_decay = parse_real(value);
    } else if (key == "ddpg.epsilon_floor") {
        cfg.ddpg.epsilon_floor = parse_real(value);
    } else if (key == "ddpg.hidden1") {
        cfg.ddpg.hidden1 = static_cast<std::size_t>(parse_unsigned(value));
    } else if (key == "ddpg.hidden2") {
        cfg.ddpg.hidden2 = static_cast<std::size_t>(parse_unsigned(value));
    } else if (key == "train.episodes") {
        cfg.episodes = static_cast<std::size_t>(parse_unsigned(value));
    } else if (key == "train.horizon") {
        cfg.horizon = static_cast<std::size_t>(parse_unsigned(value));
    } else if (key == "seeds") {
        cfg.seeds = parse_seed_list(value);
    } else if (key == "out_dir") {
        cfg.out_dir = value;
    } else {
        throw std::runtime_error("unknown key '" + key + "'");
    }
}

inline std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace detail

// Line-oriented `key = value` text with '#' comments. Every error carries the
// source name and line number.
inline ExperimentConfig parse_config(std::istream& in, const std::string& source = "config") {
    ExperimentConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = detail::trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(source + ":" + std::to_string(line_no) +
                                     ": expected 'key = value'");
        const std::string key = detail::trim(stripped.substr(0, eq));
        const std::string value = detail::trim(stripped.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error(source + ":" + std::to_string(line_no) + ": missing key");
        try {
            detail::apply_config_key(cfg, key, value);
        } catch (const std::exception& e) {
            throw std::runtime_error(source + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    try {
        cfg.validate();
    } catch (const std::exception& e) {
        throw std::runtime_error(source + ": " + e.what());
    }
    return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    return parse_config(in, path);
}

// Emits every key in a fixed order; parse(serialize(cfg)) reproduces cfg
// exactly (reals are printed with full round-trip precision).
inline std::string serialize_config(const ExperimentConfig& cfg) {
    using detail::format_real;
    std::ostringstream out;
    out << "experiment.id = " << cfg.experiment_id << '\n';
    out << "deployment.area_side_m = " << format_real(cfg.deployment.area_side_m) << '\n';
    out << "deployment.num_aps = " << cfg.deployment.num_aps << '\n';
    out << "deployment.antennas_per_ap = " << cfg.deployment.antennas_per_ap << '\n';
    out << "deployment.num_ues = " << cfg.deployment.num_ues << '\n';
    out << "deployment.ap_height_m = " << format_real(cfg.deployment.ap_height_m) << '\n';
    out << "deployment.ue_height_m = " << format_real(cfg.deployment.ue_height_m) << '\n';
    out << "deployment.carrier_hz = " << format_real(cfg.deployment.carrier_hz) << '\n';
    out << "deployment.bandwidth_hz = " << format_real(cfg.deployment.bandwidth_hz) << '\n';
    out << "deployment.rb_hz = " << format_real(cfg.deployment.rb_hz) << '\n';
    out << "deployment.num_subbands = " << cfg.deployment.num_subbands << '\n';
    out << "deployment.seed = " << cfg.deployment.seed << '\n';
    out << "deployment.ap_placement = "
        << (cfg.deployment.ap_placement == ApPlacement::grid ? "grid" : "uniform_random") << '\n';
    out << "fading.num_taps = " << cfg.fading.num_taps << '\n';
    out << "fading.delay_spread_s = " << format_real(cfg.fading.delay_spread_s) << '\n';
    out << "fading.tap_decay = " << format_real(cfg.fading.tap_decay) << '\n';
    out << "fading.shadowing_sigma_db = " << format_real(cfg.fading.shadowing_sigma_db) << '\n';
    out << "fading.path_loss = " << (cfg.fading.path_loss == PathLossModel::umi ? "umi" : "none")
        << '\n';
    out << "fading.noise_figure_db = " << format_real(cfg.fading.noise_figure_db) << '\n';
    out << "cluster.size = " << cfg.cluster_size << '\n';
    out << "phy.p_max_w = " << format_real(cfg.phy.p_max_w) << '\n';
    out << "phy.tau_p = " << cfg.phy.tau_p << '\n';
    out << "phy.noise_w = " << format_real(cfg.phy.noise_w) << '\n';
    out << "phy.scaling = "
        << (cfg.phy.scaling == ZfScaling::unit_rescale ? "unit_rescale" : "as_printed") << '\n';
    out << "phy.cond_limit = " << format_real(cfg.phy.cond_limit) << '\n';
    out << "objective.w_eta = " << format_real(cfg.weights.w_eta) << '\n';
    out << "objective.w_evd = " << format_real(cfg.weights.w_evd) << '\n';
    out << "objective.w_gini = " << format_real(cfg.weights.w_gini) << '\n';
    out << "objective.eta_th_bps_hz = " << format_real(cfg.weights.eta_th_bps_hz) << '\n';
    out << "objective.rho_max_w = " << format_real(cfg.weights.rho_max_w) << '\n';
    out << "solver = " << solver_name(cfg.solver) << '\n';
    out << "ao.population = " << cfg.ao.population << '\n';
    out << "ao.iterations = " << cfg.ao.iterations << '\n';
    out << "ao.levy_beta = " << format_real(cfg.ao.levy_beta) << '\n';
    out << "ao.alpha = " << format_real(cfg.ao.alpha) << '\n';
    out << "ao.delta = " << format_real(cfg.ao.delta) << '\n';
    out << "hybrid.population = " << cfg.hybrid_inner.population << '\n';
    out << "hybrid.iterations = " << cfg.hybrid_inner.iterations << '\n';
    out << "ddpg.actor_lr = " << format_real(cfg.ddpg.actor_lr) << '\n';
    out << "ddpg.critic_lr = " << format_real(cfg.ddpg.critic_lr) << '\n';
    out << "ddpg.gamma = " << format_real(cfg.ddpg.gamma) << '\n';
    out << "ddpg.buffer_capacity = " << cfg.ddpg.buffer_capacity << '\n';
    out << "ddpg.batch_size = " << cfg.ddpg.batch_size << '\n';
    out << "ddpg.tau = " << format_real(cfg.ddpg.tau) << '\n';
    out << "ddpg.noise = " << format_real(cfg.ddpg.noise) << '\n';
    out << "ddpg.epsilon_start = " << format_real(cfg.ddpg.epsilon_start) << '\n';
    out << "ddpg.epsilon_decay = " << format_real(cfg.ddpg.epsilon_decay) << '\n';
    out << "ddpg.epsilon_floor = " << format_real(cfg.ddpg.epsilon_floor) << '\n';
    out << "ddpg.hidden1 = " << cfg.ddpg.hidden1 << '\n';
    out << "ddpg.hidden2 = " << cfg.ddpg.hidden2 << '\n';
    out << "train.episodes = " << cfg.episodes << '\n';
    out << "train.horizon = " << cfg.horizon << '\n';
    out << "seeds = ";
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
        if (i > 0) out << ',';
        out << cfg.seeds[i];
    }
    out << '\n';
    out << "out_dir = " << cfg.out_dir << '\n';
    return out.str();
}

}  // namespace cfsim

#endif  // CFSIM_CONFIG_HPP
