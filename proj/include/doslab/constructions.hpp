#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doslab/band_matrix.hpp"
#include "doslab/counting.hpp"
#include "doslab/dense_spectrum.hpp"
#include "doslab/lattice.hpp"

namespace doslab {

// Per-center boundary layer {x : |x-y|_inf in {R/2, R/2-1}} has exactly
// (R+1)^d - (R-3)^d sites for R >= 4 (both shells of the two-shell ring).
inline std::int64_t layer_ring_count(int d, int R) {
    auto ipow = [](std::int64_t base, int e) {
        std::int64_t r = 1;
        for (int i = 0; i < e; ++i) r *= base;
        return r;
    };
    if (R >= 4) return ipow(R + 1, d) - ipow(R - 3, d);
    return ipow(R + 1, d);  // R == 2: the two shells exhaust the sub-box
}

// c_d = max over even R in [2, 64] of |layer| / R^(d-1), frozen here and
// re-derived by brute force in the test suite.
inline double layer_constant(int d) {
    switch (d) {
        case 1: return 4.0;
        case 2: return 7.875;
        case 3: return 11.6318359375;
        default: throw std::invalid_argument("layer_constant: d must be 1, 2 or 3");
    }
}

struct GridCover {
    BoxSpec box;
    int R = 0;
    std::vector<Coord> centers;             // lexicographic over the per-axis center lists
    std::vector<std::int64_t> layer;        // union of per-center layers, sorted site indices
    std::int64_t per_center_layer = 0;      // |shell| of one center (no clipping occurs)
};

// Axis-aligned covering grid of spacing R, last center clamped so every
// sub-box Lambda_R(y) stays inside the parent box.
inline GridCover build_grid(const BoxSpec& box, int R) {
    if (R < 2 || R % 2 != 0)
        throw std::invalid_argument("build_grid: R must be an even integer >= 2, got " + std::to_string(R));
    if (!(static_cast<double>(R) < box.L))
        throw std::invalid_argument("build_grid: R must be smaller than the box side");

    GridCover cover;
    cover.box = box;
    cover.R = R;
    cover.per_center_layer = layer_ring_count(box.d, R);

    std::vector<std::vector<std::int64_t>> axis_centers(static_cast<std::size_t>(box.d));
    for (int k = 0; k < box.d; ++k) {
        std::int64_t lo = box.center[k] - box.half;
        std::int64_t hi = box.center[k] + box.half;
        std::int64_t m = (box.side - 2 + R) / R;  // ceil((side-1)/R)
        for (std::int64_t j = 0; j < m; ++j)
            axis_centers[static_cast<std::size_t>(k)].push_back(std::min(lo + R / 2 + j * R, hi - R / 2));
    }

    std::vector<std::size_t> cursor(static_cast<std::size_t>(box.d), 0);
    for (;;) {
        Coord y{0, 0, 0};
        for (int k = 0; k < box.d; ++k)
            y[k] = axis_centers[static_cast<std::size_t>(k)][cursor[static_cast<std::size_t>(k)]];
        cover.centers.push_back(y);
        int k = box.d - 1;
        while (k >= 0 && ++cursor[static_cast<std::size_t>(k)] ==
                             axis_centers[static_cast<std::size_t>(k)].size()) {
            cursor[static_cast<std::size_t>(k)] = 0;
            --k;
        }
        if (k < 0) break;
    }

    // union of the two-shell layers over all centers
    std::vector<std::int64_t> layer;
    int half = R / 2;
    std::vector<std::int64_t> off(static_cast<std::size_t>(box.d), -half);
    for (const Coord& y : cover.centers) {
        std::fill(off.begin(), off.end(), -half);
        for (;;) {
            std::int64_t m = 0;
            for (int k = 0; k < box.d; ++k) m = std::max(m, std::abs(off[static_cast<std::size_t>(k)]));
            if (m == half || m == half - 1) {
                Coord x = y;
                for (int k = 0; k < box.d; ++k) x[k] += off[static_cast<std::size_t>(k)];
                layer.push_back(box.index_of(x));
            }
            int k = box.d - 1;
            while (k >= 0 && ++off[static_cast<std::size_t>(k)] > half) {
                off[static_cast<std::size_t>(k)] = -half;
                --k;
            }
            if (k < 0) break;
        }
    }
    std::sort(layer.begin(), layer.end());
    layer.erase(std::unique(layer.begin(), layer.end()), layer.end());
    cover.layer = std::move(layer);
    return cover;
}

// R per the covering recipe: the unique even integer in
// [2^(d+1) c_d / rho, 2^(d+1) c_d / rho + 2), clamped to the box when the
// asymptotic regime does not fit at this scale.
struct RSelection {
    int R = 0;
    double policy_target = 0.0;
    bool clamped = false;
};

inline RSelection select_R(int d, double rho, const BoxSpec& box) {
    if (!(rho > 0.0)) throw std::invalid_argument("select_R: rho must be positive");
    RSelection sel;
    sel.policy_target = std::pow(2.0, d + 1) * layer_constant(d) / rho;
    double r = 2.0 * std::ceil(sel.policy_target / 2.0);
    std::int64_t rmax = 2 * static_cast<std::int64_t>(std::floor(box.L / 2.0));
    if (static_cast<double>(rmax) >= box.L) rmax -= 2;
    if (rmax < 2) throw std::invalid_argument("select_R: box too small for any covering grid");
    if (r > static_cast<double>(rmax)) {
        sel.R = static_cast<int>(rmax);
        sel.clamped = true;
    } else {
        sel.R = static_cast<int>(r);
    }
    return sel;
}

// The L^infty extremal of a finite-dimensional subspace: scan the rows of the
// reproducing kernel K = B B^T, normalized by sqrt of the diagonal, and return
// the best row as a unit vector. Guarantees sup norm >= sqrt(N/n).
struct ExtremalResult {
    Eigen::VectorXd psi;
    double attained = 0.0;
    std::int64_t argmax_site = -1;
};

inline ExtremalResult linf_extremal(const Eigen::MatrixXd& basis) {
    const std::int64_t n = basis.rows();
    const std::int64_t N = basis.cols();
    if (N == 0) throw std::invalid_argument("linf_extremal: empty basis");

    ExtremalResult best;
    for (std::int64_t x = 0; x < n; ++x) {
        double diag = basis.row(x).squaredNorm();
        if (diag <= 0.0) continue;
        Eigen::VectorXd row = basis * basis.row(x).transpose();  // K(x, .)
        double val = row.lpNorm<Eigen::Infinity>() / std::sqrt(diag);
        if (val > best.attained) {
            best.attained = val;
            best.argmax_site = x;
            best.psi = row / std::sqrt(diag);
        }
    }
    if (best.argmax_site < 0)
        throw std::logic_error("linf_extremal: kernel diagonal vanished at every site");
    return best;
}

// F = Ran P intersected with {psi : psi = 0 on the layer sites}, realized as
// the null space of the evaluation map on span(P).
struct ConstrainedSubspace {
    Eigen::MatrixXd basis;  // n x dim, orthonormal columns
    std::int64_t dim = 0;
};

inline ConstrainedSubspace constrained_subspace(const EigenBasis& P,
                                                const std::vector<std::int64_t>& layer) {
    ConstrainedSubspace F;
    if (P.count == 0) {
        F.basis = Eigen::MatrixXd::Zero(P.n, 0);
        return F;
    }
    if (layer.empty()) {
        F.basis = P.vectors;
        F.dim = P.count;
        return F;
    }
    Eigen::MatrixXd M(static_cast<std::int64_t>(layer.size()), P.count);
    for (std::size_t r = 0; r < layer.size(); ++r) {
        if (layer[r] < 0 || layer[r] >= P.n)
            throw std::invalid_argument("constrained_subspace: layer site out of range");
        M.row(static_cast<std::int64_t>(r)) = P.vectors.row(layer[r]);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
    double tol = 1e-11 * std::max(1.0, svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0);
    std::int64_t rank = 0;
    for (std::int64_t i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > tol) ++rank;
    F.dim = P.count - rank;
    F.basis = P.vectors * svd.matrixV().rightCols(F.dim);
    return F;
}

// sup-norm bound eps * (R/2 - 1) * A^(R/2 - 2) propagated from the two
// vanishing shells, A = 2d - 1 + |V - E|_inf
inline double propagation_bound(double eps, int R, double A) {
    double log_bound = std::log(eps) + std::log(static_cast<double>(R) / 2.0 - 1.0) +
                       (static_cast<double>(R) / 2.0 - 2.0) * std::log(A);
    if (log_bound > 700.0) return std::numeric_limits<double>::infinity();
    return std::exp(log_bound);
}

struct PropagationReport {
    double A = 0.0;
    double bound = 0.0;
    std::int64_t checked = 0;
    double max_inf_norm = 0.0;
    double max_ratio = 0.0;  // sup norm / bound, over the basis
    bool pass = true;        // vacuous when dim F == 0
};

// Verify |psi|_inf <= eps (R/2 - 1) A^(R/2-2) for every unit basis vector of F.
inline PropagationReport propagation_check(const ConstrainedSubspace& F, const BandMatrix& H,
                                           const SpectralWindow& w, const GridCover& cover) {
    if (F.basis.rows() != H.n || cover.box.n != H.n)
        throw std::invalid_argument("propagation_check: F, H and cover sizes disagree");
    PropagationReport rep;
    double dev = 0.0;
    for (std::int64_t i = 0; i < H.n; ++i) dev = std::max(dev, std::abs(H.entry(i, 0) - w.E));
    rep.A = 2.0 * cover.box.d - 1.0 + dev;
    rep.bound = propagation_bound(w.eps, cover.R, rep.A);
    rep.checked = F.dim;
    for (std::int64_t j = 0; j < F.dim; ++j) {
        Eigen::VectorXd psi = F.basis.col(j);
        psi /= psi.norm();
        double inf_norm = psi.lpNorm<Eigen::Infinity>();
        rep.max_inf_norm = std::max(rep.max_inf_norm, inf_norm);
        double ratio = inf_norm / rep.bound;
        rep.max_ratio = std::max(rep.max_ratio, ratio);
        if (inf_norm > rep.bound) rep.pass = false;
    }
    return rep;
}

}  // namespace doslab
