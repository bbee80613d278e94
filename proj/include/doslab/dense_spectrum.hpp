#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "doslab/band_matrix.hpp"
#include "doslab/counting.hpp"

namespace doslab {

inline constexpr std::int64_t kDenseCap = 4096;

inline Eigen::MatrixXd densify(const BandMatrix& H) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(H.n, H.n);
    for (std::int64_t i = 0; i < H.n; ++i) {
        std::int64_t omax = std::min(H.half_bandwidth, i);
        for (std::int64_t off = 0; off <= omax; ++off) {
            double v = H.entry(i, off);
            M(i, i - off) = v;
            M(i - off, i) = v;
        }
    }
    return M;
}

// All eigenvalues, ascending. Householder tridiagonalization + implicit-shift
// QR underneath; oracle-grade, so the order is capped.
inline std::vector<double> dense_spectrum(const BandMatrix& H, std::int64_t cap = kDenseCap) {
    if (H.n > cap)
        throw std::invalid_argument("dense_spectrum: order " + std::to_string(H.n) +
                                    " exceeds the dense cap " + std::to_string(cap));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(densify(H), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("dense_spectrum: eigensolver failed");
    std::vector<double> out(static_cast<std::size_t>(H.n));
    for (std::int64_t i = 0; i < H.n; ++i) out[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
    return out;
}

// Orthonormal eigenpairs spanning Ran chi_[E,E+eps](H). The eigenvalue
// selection is anchored to the inertia counts so the basis size always equals
// count_in_interval on the same window.
struct EigenBasis {
    std::int64_t n = 0;
    std::int64_t count = 0;
    std::vector<double> values;   // ascending
    Eigen::MatrixXd vectors;      // n x count, orthonormal columns
};

inline EigenBasis eigenpairs_in_window(const BandMatrix& H, const SpectralWindow& w,
                                       std::int64_t cap = kDenseCap) {
    if (H.n > cap)
        throw std::invalid_argument("eigenpairs_in_window: order exceeds the dense cap");
    if (!(w.eps > 0.0)) throw std::invalid_argument("eigenpairs_in_window: window width must be positive");

    std::int64_t k1 = count_lt(H, w.E);
    std::int64_t k2 = count_le(H, w.hi());
    EigenBasis basis;
    basis.n = H.n;
    basis.count = std::max<std::int64_t>(k2 - k1, 0);
    if (basis.count == 0) {
        basis.vectors = Eigen::MatrixXd::Zero(H.n, 0);
        return basis;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(densify(H));
    if (es.info() != Eigen::Success)
        throw std::runtime_error("eigenpairs_in_window: eigensolver failed");
    basis.vectors = es.eigenvectors().middleCols(k1, basis.count);
    basis.values.resize(static_cast<std::size_t>(basis.count));
    for (std::int64_t i = 0; i < basis.count; ++i)
        basis.values[static_cast<std::size_t>(i)] = es.eigenvalues()(k1 + i);
    return basis;
}

}  // namespace doslab
