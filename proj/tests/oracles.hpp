#ifndef CFSIM_TESTS_ORACLES_HPP
#define CFSIM_TESTS_ORACLES_HPP

// Deliberately naive reference implementations used only by tests. Each one
// recomputes a quantity the library produces, by a different route, so the
// two cannot share a bug.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// Dense block-diagonal selector for a serving set: NL x NL with identity
// blocks on the served APs.
inline Eigen::MatrixXcd dense_selector(const std::vector<std::size_t>& serves, std::size_t num_aps,
                                       std::size_t antennas_per_ap) {
    const Eigen::Index nl = static_cast<Eigen::Index>(num_aps * antennas_per_ap);
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(nl, nl);
    for (std::size_t l : serves)
        for (std::size_t n = 0; n < antennas_per_ap; ++n) {
            const Eigen::Index i = static_cast<Eigen::Index>(l * antennas_per_ap + n);
            d(i, i) = 1.0;
        }
    return d;
}

// Smallest eigenvalue of a Hermitian matrix via cyclic Jacobi sweeps on the
// real symmetric 2n x 2n embedding [[Re, -Im], [Im, Re]].
inline double min_eig_hermitian(const Eigen::MatrixXcd& h) {
    const Eigen::Index n = h.rows();
    if (h.cols() != n) throw std::invalid_argument("min_eig_hermitian: square matrix required");
    if (n == 0) throw std::invalid_argument("min_eig_hermitian: empty matrix");
    const Eigen::Index m = 2 * n;
    std::vector<std::vector<double>> a(m, std::vector<double>(m, 0.0));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            a[i][j] = h(i, j).real();
            a[i][j + n] = -h(i, j).imag();
            a[i + n][j] = h(i, j).imag();
            a[i + n][j + n] = h(i, j).real();
        }
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (Eigen::Index p = 0; p < m; ++p)
            for (Eigen::Index q = p + 1; q < m; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-26) break;
        for (Eigen::Index p = 0; p < m; ++p)
            for (Eigen::Index q = p + 1; q < m; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (Eigen::Index i = 0; i < m; ++i) {
                    const double aip = a[i][p], aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for (Eigen::Index i = 0; i < m; ++i) {
                    const double api = a[p][i], aqi = a[q][i];
                    a[p][i] = c * api - s * aqi;
                    a[q][i] = s * api + c * aqi;
                }
            }
    }
    double lo = a[0][0];
    for (Eigen::Index i = 1; i < m; ++i) lo = std::min(lo, a[i][i]);
    return lo;
}

// Straight-line loop evaluation of a 2-hidden-layer ReLU net, no Eigen math,
// for cross-checking the batched forward.
inline std::vector<double> mlp_forward_loops(const std::vector<std::vector<double>>& w1,
                                             const std::vector<double>& b1,
                                             const std::vector<std::vector<double>>& w2,
                                             const std::vector<double>& b2,
                                             const std::vector<std::vector<double>>& w3,
                                             const std::vector<double>& b3,
                                             const std::vector<double>& x, bool softmax,
                                             std::size_t group) {
    auto affine_relu = [](const std::vector<std::vector<double>>& w, const std::vector<double>& b,
                          const std::vector<double>& in, bool relu) {
        std::vector<double> out(w.size(), 0.0);
        for (std::size_t r = 0; r < w.size(); ++r) {
            double acc = b[r];
            for (std::size_t c = 0; c < in.size(); ++c) acc += w[r][c] * in[c];
            out[r] = relu && acc < 0.0 ? 0.0 : acc;
        }
        return out;
    };
    std::vector<double> a1 = affine_relu(w1, b1, x, true);
    std::vector<double> a2 = affine_relu(w2, b2, a1, true);
    std::vector<double> y = affine_relu(w3, b3, a2, false);
    if (softmax) {
        for (std::size_t start = 0; start < y.size(); start += group) {
            double peak = y[start];
            for (std::size_t i = 1; i < group; ++i) peak = std::max(peak, y[start + i]);
            double total = 0.0;
            for (std::size_t i = 0; i < group; ++i) {
                y[start + i] = std::exp(y[start + i] - peak);
                total += y[start + i];
            }
            for (std::size_t i = 0; i < group; ++i) y[start + i] /= total;
        }
    }
    return y;
}

// Mean absolute difference form of the dispersion index, straight double loop.
inline double gini_double_loop(const std::vector<double>& x) {
    const std::size_t n = x.size();
    if (n == 0) return 0.0;
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    if (mean == 0.0) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) acc += std::abs(x[i] - x[j]);
    return acc / (2.0 * static_cast<double>(n) * static_cast<double>(n) * mean);
}

}  // namespace oracle

#endif  // CFSIM_TESTS_ORACLES_HPP
