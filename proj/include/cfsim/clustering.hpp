#ifndef CFSIM_CLUSTERING_HPP
#define CFSIM_CLUSTERING_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "cfsim/channel.hpp"

namespace cfsim {

// Per-UE serving AP subsets. Each UE's set induces a block-diagonal selector
// over the stacked N*L channel without ever materializing it.
struct ClusterMap {
    std::size_t num_aps = 0;
    std::size_t cluster_size = 0;                 // requested M after clamping
    bool clamped = false;                         // true when M exceeded L
    std::vector<std::vector<std::size_t>> serves; // serves[k]: ascending AP indices

    std::size_t num_ues() const { return serves.size(); }

    void validate() const {
        for (const auto& set : serves) {
            if (set.empty()) throw std::invalid_argument("cluster: empty serving set");
            if (set.size() > num_aps) throw std::invalid_argument("cluster: serving set larger than L");
            for (std::size_t i = 0; i < set.size(); ++i) {
                if (set[i] >= num_aps) throw std::invalid_argument("cluster: AP index out of range");
                if (i > 0 && set[i] <= set[i - 1])
                    throw std::invalid_argument("cluster: serving set not strictly ascending");
            }
        }
    }
};

// Picks the M strongest APs per UE from the large-scale gains, lowest index
// winning ties. M larger than L clamps to L and flags it.
inline ClusterMap select_serving_aps(const ChannelTensor& channels, std::size_t m) {
    if (m < 1) throw std::invalid_argument("select_serving_aps: M must be >= 1");
    const std::size_t K = channels.num_ues(), L = channels.num_aps();
    ClusterMap map;
    map.num_aps = L;
    map.clamped = m > L;
    map.cluster_size = std::min(m, L);
    map.serves.resize(K);
    std::vector<std::size_t> order(L);
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t l = 0; l < L; ++l) {
            const double g = channels.large_scale_gain(k, l);
            if (!std::isfinite(g) || g < 0.0)
                throw std::invalid_argument("select_serving_aps: gains must be finite and nonnegative");
        }
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double ga = channels.large_scale_gain(k, a);
            const double gb = channels.large_scale_gain(k, b);
            if (ga != gb) return ga > gb;
            return a < b;
        });
        map.serves[k].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(map.cluster_size));
        std::sort(map.serves[k].begin(), map.serves[k].end());
    }
    return map;
}

// Applies UE k's selector to a stacked row: blocks outside serves[k] become
// exactly zero.
inline Eigen::VectorXcd mask_channel(const Eigen::VectorXcd& row, const ClusterMap& cluster,
                                     std::size_t k, std::size_t antennas_per_ap) {
    if (static_cast<std::size_t>(row.size()) != antennas_per_ap * cluster.num_aps)
        throw std::invalid_argument("mask_channel: row length must be N*L");
    if (k >= cluster.num_ues()) throw std::invalid_argument("mask_channel: UE index out of range");
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(row.size());
    for (std::size_t l : cluster.serves[k]) {
        const Eigen::Index base = static_cast<Eigen::Index>(l * antennas_per_ap);
        out.segment(base, static_cast<Eigen::Index>(antennas_per_ap)) =
            row.segment(base, static_cast<Eigen::Index>(antennas_per_ap));
    }
    return out;
}

// Whether two UEs share at least one serving AP (their selectors interact).
inline bool clusters_overlap(const ClusterMap& cluster, std::size_t i, std::size_t k) {
    if (i >= cluster.num_ues() || k >= cluster.num_ues())
        throw std::invalid_argument("clusters_overlap: UE index out of range");
    const auto& a = cluster.serves[i];
    const auto& b = cluster.serves[k];
    std::size_t ia = 0, ib = 0;
    while (ia < a.size() && ib < b.size()) {
        if (a[ia] == b[ib]) return true;
        if (a[ia] < b[ib])
            ++ia;
        else
            ++ib;
    }
    return false;
}

// Rows `ue_index,ap_index_list` with the list semicolon-separated.
inline void export_clusters_csv(const ClusterMap& cluster, std::ostream& out) {
    out << "ue_index,ap_index_list\n";
    for (std::size_t k = 0; k < cluster.num_ues(); ++k) {
        out << k << ',';
        for (std::size_t i = 0; i < cluster.serves[k].size(); ++i) {
            if (i > 0) out << ';';
            out << cluster.serves[k][i];
        }
        out << '\n';
    }
}

}  // namespace cfsim

#endif  // CFSIM_CLUSTERING_HPP
