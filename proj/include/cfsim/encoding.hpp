#ifndef CFSIM_ENCODING_HPP
#define CFSIM_ENCODING_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include <Eigen/Dense>

#include "cfsim/phy.hpp"

namespace cfsim {

// Continuous relaxation bridge: solvers move real vectors in [0, S)^K, the
// objective sees the floored assignment. Every real vector decodes to a valid
// single-subband-per-UE assignment.
inline Assignment decode_solution(const Eigen::VectorXd& x, std::size_t num_subbands) {
    Assignment a(static_cast<std::size_t>(x.size()), num_subbands);
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        if (!std::isfinite(x[k])) throw std::invalid_argument("decode: non-finite coordinate");
        double clamped = x[k];
        if (clamped < 0.0) clamped = 0.0;
        std::size_t s = static_cast<std::size_t>(std::floor(clamped));
        if (s >= num_subbands) s = num_subbands - 1;
        a.assign(static_cast<std::size_t>(k), s);
    }
    return a;
}

// Centers each coordinate in its subband's cell so decode(encode(a)) == a.
inline Eigen::VectorXd encode_solution(const Assignment& a) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(a.num_ues()));
    for (std::size_t k = 0; k < a.num_ues(); ++k) {
        if (!a.is_assigned(k))
            throw std::invalid_argument("encode: UE " + std::to_string(k) + " unassigned");
        x[static_cast<Eigen::Index>(k)] = static_cast<double>(a.subband_of(k)) + 0.5;
    }
    return x;
}

}  // namespace cfsim

#endif  // CFSIM_ENCODING_HPP
