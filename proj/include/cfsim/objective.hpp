#ifndef CFSIM_OBJECTIVE_HPP
#define CFSIM_OBJECTIVE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "cfsim/channel.hpp"
#include "cfsim/clustering.hpp"
#include "cfsim/phy.hpp"

namespace cfsim {

struct ObjectiveWeights {
    double w_eta = 0.6;
    double w_evd = 0.2;
    double w_gini = 0.2;
    double eta_th_bps_hz = 1.0;
    double rho_max_w = 0.0;  // 0 means "derive as K * equal power" at evaluation time

    void validate() const {
        if (w_eta < 0 || w_evd < 0 || w_gini < 0)
            throw std::invalid_argument("objective: weights must be nonnegative");
        if (w_eta == 0 && w_evd == 0 && w_gini == 0)
            throw std::invalid_argument("objective: at least one weight must be positive");
        if (eta_th_bps_hz < 0) throw std::invalid_argument("objective: eta_th must be >= 0");
        if (rho_max_w < 0) throw std::invalid_argument("objective: rho_max must be >= 0");
    }
};

struct ConstraintFlags {
    bool c1_power = false;
    bool c2_min_se = false;
    bool c3_single_subband = false;  // unrepresentable via Assignment; kept for raw inputs
    bool c4_ue_budget = false;
    std::size_t c2_violating_ues = 0;

    bool any() const { return c1_power || c2_min_se || c3_single_subband || c4_ue_budget; }
    std::size_t violated_count() const {
        return static_cast<std::size_t>(c1_power) + static_cast<std::size_t>(c2_min_se) +
               static_cast<std::size_t>(c3_single_subband) + static_cast<std::size_t>(c4_ue_budget);
    }
};

struct ObjectiveReport {
    double total_se_bps_hz = 0.0;
    double gini = 0.0;
    double lambda_min = 1.0;
    double normalized_value = 0.0;
    ConstraintFlags violations;
    bool feasible = true;
    bool gini_degenerate = false;   // all-zero SE vector
    bool lambda_vacuous = false;    // no occupied subband
    std::size_t num_zf_infeasible = 0;
    Eigen::VectorXd se_bps_hz;      // per UE
};

// Sum of per-UE spectral efficiencies.
inline double total_se(const Eigen::VectorXd& se) {
    for (Eigen::Index i = 0; i < se.size(); ++i)
        if (se[i] < 0.0) throw std::invalid_argument("total_se: negative entry");
    return se.sum();
}

// Mean-absolute-difference dispersion in [0, 1]; 0 for perfectly even rates.
// Computed via the sorted linear-time identity rather than the double loop.
inline double gini(const Eigen::VectorXd& se, bool* degenerate = nullptr) {
    if (degenerate) *degenerate = false;
    const std::size_t n = static_cast<std::size_t>(se.size());
    if (n == 0) {
        if (degenerate) *degenerate = true;
        return 0.0;
    }
    std::vector<double> x(se.data(), se.data() + se.size());
    double mean = 0.0;
    for (double v : x) {
        if (v < 0.0) throw std::invalid_argument("gini: negative entry");
        mean += v;
    }
    mean /= static_cast<double>(n);
    if (mean <= 0.0) {
        if (degenerate) *degenerate = true;
        return 0.0;
    }
    std::sort(x.begin(), x.end());
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += (2.0 * static_cast<double>(i + 1) - static_cast<double>(n) - 1.0) * x[i];
    return acc / (static_cast<double>(n) * static_cast<double>(n) * mean);
}

// Smallest Gram eigenvalue across occupied subbands, built from each UE's own
// masked channel row normalized to unit length. 1 when nothing is assigned.
inline double min_eigenvalue(const ChannelTensor& channels, const ClusterMap& cluster,
                             const Assignment& assignment, bool* vacuous = nullptr) {
    if (vacuous) *vacuous = false;
    const auto occ = assignment.occupancy();
    bool any = false;
    double lo = 1.0;
    for (std::size_t s = 0; s < occ.size(); ++s) {
        const auto& group = occ[s];
        if (group.empty()) continue;
        any = true;
        Eigen::MatrixXcd rows(static_cast<Eigen::Index>(group.size()),
                              static_cast<Eigen::Index>(channels.num_aps() * channels.antennas_per_ap()));
        for (std::size_t i = 0; i < group.size(); ++i) {
            Eigen::VectorXcd masked = mask_channel(channels.stacked_row(group[i], s), cluster,
                                                   group[i], channels.antennas_per_ap());
            const double norm = masked.norm();
            if (norm > 0.0) masked /= norm;
            rows.row(static_cast<Eigen::Index>(i)) = masked.transpose();
        }
        const Eigen::MatrixXcd gram = rows * rows.adjoint();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram, Eigen::EigenvaluesOnly);
        if (eig.info() != Eigen::Success)
            throw std::runtime_error("min_eigenvalue: eigensolver failed");
        lo = std::min(lo, eig.eigenvalues().minCoeff());
    }
    if (!any) {
        if (vacuous) *vacuous = true;
        return 1.0;
    }
    return lo;
}

// C1/C2/C4 as value checks; C3 is structural for Assignment inputs.
inline ConstraintFlags check_constraints(const Assignment& assignment, const PrecodeResult& phy_result,
                                         const ObjectiveWeights& weights, double rho_max_w) {
    ConstraintFlags flags;
    const double total_rho = phy_result.rho_w.sum();
    flags.c1_power = total_rho > rho_max_w * (1.0 + 1e-12);
    for (std::size_t k = 0; k < assignment.num_ues(); ++k)
        if (assignment.is_assigned(k) &&
            phy_result.se_bps_hz[static_cast<Eigen::Index>(k)] < weights.eta_th_bps_hz)
            ++flags.c2_violating_ues;
    flags.c2_min_se = flags.c2_violating_ues > 0;
    flags.c4_ue_budget = assignment.num_assigned() > assignment.num_ues();
    return flags;
}

// Scores assignments against a fixed instance. The reference SE and the
// per-instance constants are computed once so repeated evaluations inside
// optimizer loops stay cheap.
class Evaluator {
public:
    Evaluator(const ChannelTensor& channels, const ClusterMap& cluster, const PhyConfig& phy,
              const ObjectiveWeights& weights)
        : channels_(&channels), cluster_(&cluster), phy_(phy), weights_(weights) {
        phy_.validate();
        weights_.validate();
        if (cluster.num_ues() != channels.num_ues())
            throw std::invalid_argument("evaluator: cluster/channel UE mismatch");
        const std::size_t K = channels.num_ues();
        rho_max_w_ = weights_.rho_max_w > 0.0
                         ? weights_.rho_max_w
                         : equal_power_w(phy_.p_max_w, phy_.tau_p) * static_cast<double>(K);
        // Interference-free SNR of each UE averaged over subbands, then over
        // UEs; anchors the SE term to a deployment-wide single-user scale.
        const double rho = equal_power_w(phy_.p_max_w, phy_.tau_p);
        double snr_acc = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            double gain = 0.0;
            for (std::size_t l : cluster.serves[k]) gain += channels.large_scale_gain(k, l);
            snr_acc += rho * gain / phy_.noise_w;
        }
        const double snr_single = K > 0 ? snr_acc / static_cast<double>(K) : 0.0;
        eta_ref_ = static_cast<double>(K) * std::log2(1.0 + snr_single);
    }

    double eta_ref() const { return eta_ref_; }
    double rho_max_w() const { return rho_max_w_; }
    const PhyConfig& phy() const { return phy_; }
    const ObjectiveWeights& weights() const { return weights_; }
    const ChannelTensor& channels() const { return *channels_; }
    const ClusterMap& cluster() const { return *cluster_; }

    ObjectiveReport evaluate(const Assignment& assignment) const {
        PrecodeResult phy_result = evaluate_phy(*channels_, *cluster_, assignment, phy_);
        ObjectiveReport report;
        report.se_bps_hz = phy_result.se_bps_hz;
        report.num_zf_infeasible = phy_result.num_infeasible;
        report.total_se_bps_hz = total_se(phy_result.se_bps_hz);
        report.gini = gini(phy_result.se_bps_hz, &report.gini_degenerate);
        report.lambda_min = min_eigenvalue(*channels_, *cluster_, assignment, &report.lambda_vacuous);
        report.violations = check_constraints(assignment, phy_result, weights_, rho_max_w_);
        report.feasible = !report.violations.any();
        const double se_term = eta_ref_ > 0.0 ? report.total_se_bps_hz / eta_ref_ : 0.0;
        report.normalized_value = weights_.w_eta * se_term + weights_.w_evd * report.lambda_min -
                                  weights_.w_gini * report.gini -
                                  weights_.w_eta * static_cast<double>(report.violations.c2_violating_ues);
        return report;
    }

private:
    const ChannelTensor* channels_;
    const ClusterMap* cluster_;
    PhyConfig phy_;
    ObjectiveWeights weights_;
    double rho_max_w_ = 0.0;
    double eta_ref_ = 0.0;
};

}  // namespace cfsim

#endif  // CFSIM_OBJECTIVE_HPP
