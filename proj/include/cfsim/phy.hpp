#ifndef CFSIM_PHY_HPP
#define CFSIM_PHY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "cfsim/channel.hpp"
#include "cfsim/clustering.hpp"

namespace cfsim {

// Maps each UE to at most one subband. Double assignment is unrepresentable;
// occupancy sets are derived on demand.
class Assignment {
public:
    static constexpr std::size_t unassigned = std::numeric_limits<std::size_t>::max();

    Assignment(std::size_t num_ues, std::size_t num_subbands)
        : num_subbands_(num_subbands), subband_of_(num_ues, unassigned) {
        if (num_subbands < 1) throw std::invalid_argument("assignment: need at least one subband");
    }

    std::size_t num_ues() const { return subband_of_.size(); }
    std::size_t num_subbands() const { return num_subbands_; }

    void assign(std::size_t k, std::size_t s) {
        check_ue(k);
        if (s >= num_subbands_) throw std::invalid_argument("assignment: subband index out of range");
        subband_of_[k] = s;
    }

    void clear(std::size_t k) {
        check_ue(k);
        subband_of_[k] = unassigned;
    }

    bool is_assigned(std::size_t k) const {
        check_ue(k);
        return subband_of_[k] != unassigned;
    }

    std::size_t subband_of(std::size_t k) const {
        check_ue(k);
        return subband_of_[k];
    }

    std::size_t num_assigned() const {
        std::size_t n = 0;
        for (std::size_t s : subband_of_)
            if (s != unassigned) ++n;
        return n;
    }

    // UEs on each subband, ascending.
    std::vector<std::vector<std::size_t>> occupancy() const {
        std::vector<std::vector<std::size_t>> occ(num_subbands_);
        for (std::size_t k = 0; k < subband_of_.size(); ++k)
            if (subband_of_[k] != unassigned) occ[subband_of_[k]].push_back(k);
        return occ;
    }

    bool operator==(const Assignment& other) const {
        return num_subbands_ == other.num_subbands_ && subband_of_ == other.subband_of_;
    }

private:
    void check_ue(std::size_t k) const {
        if (k >= subband_of_.size()) throw std::invalid_argument("assignment: UE index out of range");
    }

    std::size_t num_subbands_;
    std::vector<std::size_t> subband_of_;
};

// Converts a raw S x K indicator matrix into an Assignment, rejecting any
// column that claims more than one subband for a UE.
inline Assignment validate_assignment_matrix(const Eigen::MatrixXi& m) {
    const std::size_t S = static_cast<std::size_t>(m.rows());
    const std::size_t K = static_cast<std::size_t>(m.cols());
    if (S < 1) throw std::invalid_argument("assignment matrix: need at least one subband row");
    Assignment a(K, S);
    for (std::size_t k = 0; k < K; ++k) {
        std::size_t count = 0, where = 0;
        for (std::size_t s = 0; s < S; ++s) {
            const int v = m(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(k));
            if (v != 0 && v != 1)
                throw std::invalid_argument("assignment matrix: entries must be 0 or 1");
            if (v == 1) {
                ++count;
                where = s;
            }
        }
        if (count > 1)
            throw std::invalid_argument("assignment matrix: UE " + std::to_string(k) +
                                        " assigned to multiple subbands");
        if (count == 1) a.assign(k, where);
    }
    return a;
}

enum class ZfScaling {
    unit_rescale,  // w = sqrt(rho) * w / ||w||
    as_printed     // w = sqrt(rho / ||w||) * w
};

struct PhyConfig {
    double p_max_w = 0.2;
    std::size_t tau_p = 10;
    double noise_w = 1e-12;
    ZfScaling scaling = ZfScaling::unit_rescale;
    double cond_limit = 1e12;

    void validate() const {
        if (p_max_w < 0) throw std::invalid_argument("phy: p_max_w must be >= 0");
        if (tau_p < 1) throw std::invalid_argument("phy: tau_p must be >= 1");
        if (noise_w <= 0) throw std::invalid_argument("phy: noise_w must be > 0");
        if (cond_limit <= 1) throw std::invalid_argument("phy: cond_limit must be > 1");
    }
};

// Uniform per-UE transmit power.
inline double equal_power_w(double p_max_w, std::size_t tau_p) {
    if (tau_p < 1) throw std::invalid_argument("equal_power_w: tau_p must be >= 1");
    return p_max_w / static_cast<double>(tau_p);
}

// Co-channel UEs whose serving sets intersect UE k's, plus k itself.
// Ascending order, so the caller gets a deterministic row layout.
inline std::vector<std::size_t> interference_members(const Assignment& assignment,
                                                     const ClusterMap& cluster, std::size_t k) {
    if (!assignment.is_assigned(k))
        throw std::invalid_argument("interference_members: UE " + std::to_string(k) + " unassigned");
    const std::size_t s = assignment.subband_of(k);
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < assignment.num_ues(); ++i)
        if (assignment.is_assigned(i) && assignment.subband_of(i) == s &&
            (i == k || clusters_overlap(cluster, i, k)))
            members.push_back(i);
    return members;
}

struct ZfVector {
    Eigen::VectorXcd w;
    bool feasible = true;
};

// Zero-forcing beam for UE k. `rows` holds the stacked channel rows of the
// nulling group with UE k's row first; all rows are masked by k's selector
// before the Gram solve, so the beam lives on k's serving blocks only.
inline ZfVector zf_precoder(const std::vector<Eigen::VectorXcd>& rows, const ClusterMap& cluster,
                            std::size_t k, double rho,
                            ZfScaling scaling = ZfScaling::unit_rescale, double cond_limit = 1e12) {
    if (rows.empty()) throw std::invalid_argument("zf_precoder: need at least UE k's row");
    const std::size_t n_antennas = static_cast<std::size_t>(rows[0].size()) / cluster.num_aps;
    if (n_antennas * cluster.num_aps != static_cast<std::size_t>(rows[0].size()))
        throw std::invalid_argument("zf_precoder: row length not divisible by AP count");
    ZfVector out;
    out.w = Eigen::VectorXcd::Zero(rows[0].size());
    if (rows.size() > n_antennas * cluster.serves[k].size()) {
        out.feasible = false;
        return out;
    }
    const Eigen::Index c = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXcd masked(c, rows[0].size());
    for (Eigen::Index i = 0; i < c; ++i) {
        if (rows[static_cast<std::size_t>(i)].size() != rows[0].size())
            throw std::invalid_argument("zf_precoder: inconsistent row lengths");
        masked.row(i) =
            mask_channel(rows[static_cast<std::size_t>(i)], cluster, k, n_antennas).transpose();
    }
    const Eigen::MatrixXcd gram = masked * masked.adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram);
    if (eig.info() != Eigen::Success) {
        out.feasible = false;
        return out;
    }
    const Eigen::VectorXd evals = eig.eigenvalues();
    const double lo = evals.minCoeff(), hi = evals.maxCoeff();
    if (lo <= 0.0 || hi / lo > cond_limit) {
        out.feasible = false;
        return out;
    }
    Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(c);
    e1[0] = 1.0;
    const Eigen::VectorXcd coeff =
        eig.eigenvectors() * (eig.eigenvalues().cwiseInverse().asDiagonal() *
                              (eig.eigenvectors().adjoint() * e1));
    Eigen::VectorXcd w_un = masked.adjoint() * coeff;
    const double norm = w_un.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        out.feasible = false;
        return out;
    }
    if (rho <= 0.0) return out;  // zero beam, still feasible
    if (scaling == ZfScaling::unit_rescale)
        out.w = std::sqrt(rho) / norm * w_un;
    else
        out.w = std::sqrt(rho / norm) * w_un;
    return out;
}

struct PrecodeResult {
    std::vector<Eigen::VectorXcd> w;  // per UE, length N*L
    Eigen::VectorXd rho_w;            // allocated power, 0 for unassigned
    Eigen::VectorXd sinr;             // linear, 0 for unassigned or infeasible
    Eigen::VectorXd se_bps_hz;        // log2(1 + sinr)
    std::vector<char> zf_infeasible;  // per UE
    std::size_t num_infeasible = 0;
};

// Full downlink evaluation of an assignment: per-UE ZF beams, then SINR with
// interference summed over every co-channel UE, then SE. Unassigned UEs carry
// zero power and zero SE; ZF-infeasible UEs keep their power budget but are
// flagged and scored as silent outage.
inline PrecodeResult evaluate_phy(const ChannelTensor& channels, const ClusterMap& cluster,
                                  const Assignment& assignment, const PhyConfig& phy) {
    phy.validate();
    const std::size_t K = channels.num_ues();
    if (assignment.num_ues() != K || cluster.num_ues() != K)
        throw std::invalid_argument("evaluate_phy: UE count mismatch");
    if (assignment.num_subbands() > channels.num_subbands())
        throw std::invalid_argument("evaluate_phy: assignment uses more subbands than the channel has");
    PrecodeResult res;
    res.w.assign(K, Eigen::VectorXcd::Zero(
                        static_cast<Eigen::Index>(channels.num_aps() * channels.antennas_per_ap())));
    res.rho_w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(K));
    res.sinr = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(K));
    res.se_bps_hz = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(K));
    res.zf_infeasible.assign(K, 0);
    if (K == 0) return res;

    const double rho = equal_power_w(phy.p_max_w, phy.tau_p);
    const auto occ = assignment.occupancy();

    std::vector<Eigen::VectorXcd> stacked(K);
    for (std::size_t k = 0; k < K; ++k)
        if (assignment.is_assigned(k)) {
            stacked[k] = channels.stacked_row(k, assignment.subband_of(k));
            res.rho_w[static_cast<Eigen::Index>(k)] = rho;
        }

    for (std::size_t k = 0; k < K; ++k) {
        if (!assignment.is_assigned(k)) continue;
        std::vector<std::size_t> members = interference_members(assignment, cluster, k);
        std::vector<Eigen::VectorXcd> rows;
        rows.reserve(members.size());
        rows.push_back(stacked[k]);
        for (std::size_t i : members)
            if (i != k) rows.push_back(stacked[i]);
        ZfVector beam = zf_precoder(rows, cluster, k, rho, phy.scaling, phy.cond_limit);
        if (!beam.feasible) {
            res.zf_infeasible[k] = 1;
            ++res.num_infeasible;
            continue;
        }
        res.w[k] = std::move(beam.w);
    }

    for (std::size_t s = 0; s < assignment.num_subbands(); ++s) {
        for (std::size_t k : occ[s]) {
            if (res.zf_infeasible[k]) continue;
            const std::complex<double> sig = stacked[k].cwiseProduct(res.w[k]).sum();
            double denom = phy.noise_w;
            for (std::size_t i : occ[s]) {
                if (i == k || res.zf_infeasible[i]) continue;
                const std::complex<double> leak = stacked[k].cwiseProduct(res.w[i]).sum();
                denom += std::norm(leak);
            }
            const double sinr = std::norm(sig) / denom;
            res.sinr[static_cast<Eigen::Index>(k)] = sinr;
            res.se_bps_hz[static_cast<Eigen::Index>(k)] = std::log2(1.0 + sinr);
        }
    }
    return res;
}

// Rows `ue_index,subband,sinr_db,se_bps_hz`; unassigned UEs leave the subband
// and SINR fields empty, as does an outage with zero SINR.
inline void export_phy_csv(const PrecodeResult& res, const Assignment& assignment, std::ostream& out) {
    out << "ue_index,subband,sinr_db,se_bps_hz\n";
    char buf[64];
    for (std::size_t k = 0; k < assignment.num_ues(); ++k) {
        out << k << ',';
        if (assignment.is_assigned(k)) out << assignment.subband_of(k);
        out << ',';
        const double sinr = res.sinr[static_cast<Eigen::Index>(k)];
        if (sinr > 0.0) {
            std::snprintf(buf, sizeof(buf), "%.12g", 10.0 * std::log10(sinr));
            out << buf;
        }
        out << ',';
        std::snprintf(buf, sizeof(buf), "%.12g", res.se_bps_hz[static_cast<Eigen::Index>(k)]);
        out << buf << '\n';
    }
}

}  // namespace cfsim

#endif  // CFSIM_PHY_HPP
