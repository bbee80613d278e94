#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "doslab/band_matrix.hpp"
#include "doslab/counting.hpp"
#include "doslab/dense_spectrum.hpp"
#include "doslab/pool.hpp"

namespace doslab {

// A probe of the translate supremum: a box center for deterministic
// potentials, a realization seed for random ones.
struct Probe {
    enum class Kind { Center, Seed };
    Kind kind = Kind::Seed;
    Coord center{0, 0, 0};
    std::uint64_t seed = 0;

    static Probe of_seed(std::uint64_t s) {
        Probe p;
        p.kind = Kind::Seed;
        p.seed = s;
        return p;
    }
    static Probe of_center(Coord c) {
        Probe p;
        p.kind = Kind::Center;
        p.center = c;
        return p;
    }

    std::string token(int d) const {
        if (kind == Kind::Seed) return "seed:" + std::to_string(seed);
        std::string t = "center:";
        for (int k = 0; k < d; ++k) t += (k ? "|" : "") + std::to_string(center[k]);
        return t;
    }
};

struct DosPoint {
    double eps = 0.0;
    double eta = 0.0;
    std::int64_t count = 0;
    double L = 0.0;
    double E = 0.0;
    Bc bc = Bc::Dirichlet;
    std::string probe;
};

struct OuterEstimate {
    double value = 0.0;
    std::string argmax;
    int probes = 0;
};

struct FitResult {
    double C_hat = 0.0;
    double kappa_hat = 0.0;
    double residual = 0.0;
    int points_used = 0;
    int points_zero = 0;  // eta == 0 points excluded from the fit
};

struct DosCurve {
    std::vector<DosPoint> points;  // descending eps
    std::optional<FitResult> fit;
};

// reference exponents kappa_d of the log-Holder bound C/(log 1/eps)^kappa
inline double kappa_reference(int d) {
    switch (d) {
        case 1: return 1.0;
        case 2: return 0.25;
        case 3: return 0.125;
        default: throw std::invalid_argument("kappa_reference: d must be 1, 2 or 3");
    }
}

// eta_Lambda([E, E+eps]) = tr chi_[E,E+eps](H) / |Lambda|
inline DosPoint eta_interval(const BandMatrix& H, const SpectralWindow& w) {
    DosPoint p;
    p.eps = w.eps;
    p.E = w.E;
    p.count = count_in_interval(H, w);
    p.eta = static_cast<double>(p.count) / static_cast<double>(H.n);
    p.L = H.box_dim > 0 ? H.box_L : static_cast<double>(H.n);
    p.bc = H.bc;
    return p;
}

// integrated density of states N_Lambda(E) = eta(]-inf, E]) = count(<=E)/|Lambda|
inline double ids(const BandMatrix& H, double E) {
    return static_cast<double>(count_le(H, E)) / static_cast<double>(H.n);
}

namespace detail {

inline BandMatrix probe_hamiltonian(const PotentialSpec& spec, const BoxSpec& box0, const Probe& probe) {
    BoxSpec box = box0;
    PotentialSpec s = spec;
    if (probe.kind == Probe::Kind::Center)
        box = make_box(box0.d, box0.L, probe.center, box0.bc);
    else
        s = spec.with_seed(probe.seed);
    return assemble_hamiltonian(sample_potential(s, box));
}

}  // namespace detail

// sup over the probed family of eta_{Lambda_L(x)}([E, E+eps]); finite stand-in
// for the translate supremum of the outer-measure
inline OuterEstimate translate_sup(const PotentialSpec& spec, const BoxSpec& box0,
                                   const SpectralWindow& w, const std::vector<Probe>& probes,
                                   int threads = 1) {
    if (probes.empty()) throw std::invalid_argument("translate_sup: empty probe list");
    std::vector<double> etas(probes.size(), 0.0);
    parallel_for(probes.size(), threads, [&](std::size_t i) {
        BandMatrix H = detail::probe_hamiltonian(spec, box0, probes[i]);
        etas[i] = eta_interval(H, w).eta;
    });
    OuterEstimate est;
    est.probes = static_cast<int>(probes.size());
    std::size_t best = 0;
    for (std::size_t i = 1; i < probes.size(); ++i)
        if (etas[i] > etas[best]) best = i;
    est.value = etas[best];
    est.argmax = probes[best].token(box0.d);
    return est;
}

// least-squares fit of log eta against log log(1/eps):
// slope -> -kappa_hat, intercept -> log C_hat
inline FitResult fit_log_holder(const std::vector<DosPoint>& points) {
    FitResult fit;
    std::vector<double> xs, ys;
    for (const DosPoint& p : points) {
        if (!(p.eps > 0.0 && p.eps < 1.0))
            throw std::invalid_argument("fit_log_holder: eps must lie in (0, 1), got " +
                                        std::to_string(p.eps));
        if (p.eta > 0.0) {
            xs.push_back(std::log(std::log(1.0 / p.eps)));
            ys.push_back(std::log(p.eta));
        } else {
            ++fit.points_zero;
        }
    }
    fit.points_used = static_cast<int>(xs.size());
    if (fit.points_used < 3)
        throw std::invalid_argument("fit_log_holder: need at least 3 points with eta > 0, have " +
                                    std::to_string(fit.points_used));
    double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    double det = n * sxx - sx * sx;
    double slope, intercept;
    if (det == 0.0) {  // all eps equal; flat regression
        slope = 0.0;
        intercept = sy / n;
    } else {
        slope = (n * sxy - sx * sy) / det;
        intercept = (sy - slope * sx) / n;
    }
    fit.kappa_hat = -slope;
    fit.C_hat = std::exp(intercept);
    double ss = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double r = ys[i] - (intercept + slope * xs[i]);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

// optional external cache for sweep points, serialized through the caller
struct SweepHooks {
    std::function<std::optional<std::int64_t>(const Probe&, double eps)> try_load;
    std::function<void(const Probe&, double eps, std::int64_t count)> store;
};

struct SweepResult {
    std::vector<std::vector<DosPoint>> per_probe;  // [probe][eps index]
    DosCurve sup_curve;                            // OuterEstimate-backed point per eps
    int cache_hits = 0;
};

// One eta per (probe, eps), the per-eps sup over probes, and the log-Holder
// fit of the sup curve. Counts are exact, so per-probe monotonicity in eps is
// asserted, not just measured.
inline SweepResult dos_sweep(const PotentialSpec& spec, const BoxSpec& box0, double E,
                             const std::vector<double>& eps_grid, const std::vector<Probe>& probes,
                             int threads = 1, const SweepHooks* hooks = nullptr) {
    if (probes.empty()) throw std::invalid_argument("dos_sweep: empty probe list");
    if (eps_grid.empty()) throw std::invalid_argument("dos_sweep: empty eps grid");
    for (std::size_t k = 0; k < eps_grid.size(); ++k) {
        if (!(eps_grid[k] > 0.0 && eps_grid[k] <= 0.5))
            throw std::invalid_argument("dos_sweep: eps must lie in (0, 1/2], got " +
                                        std::to_string(eps_grid[k]));
        if (k > 0 && !(eps_grid[k] < eps_grid[k - 1]))
            throw std::invalid_argument("dos_sweep: eps grid must be strictly decreasing");
    }
    // keep the endpoint nudges well clear of the narrowest window
    double tau = 1e-9 * std::max({1.0, std::abs(E) + 1.0, 2.0 * box0.d + spec.sup_bound()});
    if (eps_grid.back() < 1e2 * tau)
        throw std::invalid_argument("dos_sweep: smallest eps is within 100 counting nudges");

    const std::size_t np = probes.size(), ne = eps_grid.size();
    std::vector<std::int64_t> counts(np * ne, -1);
    SweepResult result;

    if (hooks && hooks->try_load) {
        for (std::size_t p = 0; p < np; ++p)
            for (std::size_t k = 0; k < ne; ++k)
                if (auto c = hooks->try_load(probes[p], eps_grid[k])) {
                    counts[p * ne + k] = *c;
                    ++result.cache_hits;
                }
    }

    parallel_for(np, threads, [&](std::size_t p) {
        bool missing = false;
        for (std::size_t k = 0; k < ne; ++k) missing |= counts[p * ne + k] < 0;
        if (!missing) return;
        BandMatrix H = detail::probe_hamiltonian(spec, box0, probes[p]);
        for (std::size_t k = 0; k < ne; ++k)
            if (counts[p * ne + k] < 0)
                counts[p * ne + k] = count_in_interval(H, SpectralWindow{E, eps_grid[k]});
    });

    if (hooks && hooks->store)
        for (std::size_t p = 0; p < np; ++p)
            for (std::size_t k = 0; k < ne; ++k) hooks->store(probes[p], eps_grid[k], counts[p * ne + k]);

    double vol = static_cast<double>(box0.n);
    result.per_probe.resize(np);
    for (std::size_t p = 0; p < np; ++p) {
        result.per_probe[p].resize(ne);
        for (std::size_t k = 0; k < ne; ++k) {
            DosPoint& pt = result.per_probe[p][k];
            pt.eps = eps_grid[k];
            pt.count = counts[p * ne + k];
            pt.eta = static_cast<double>(pt.count) / vol;
            pt.L = box0.L;
            pt.E = E;
            pt.bc = box0.bc;
            pt.probe = probes[p].token(box0.d);
            if (k > 0 && pt.count > result.per_probe[p][k - 1].count)
                throw std::logic_error("dos_sweep: per-probe count increased on a nested window");
        }
    }

    result.sup_curve.points.resize(ne);
    for (std::size_t k = 0; k < ne; ++k) {
        std::size_t best = 0;
        for (std::size_t p = 1; p < np; ++p)
            if (counts[p * ne + k] > counts[best * ne + k]) best = p;
        result.sup_curve.points[k] = result.per_probe[best][k];
    }
    if (ne >= 3) {
        try {
            result.sup_curve.fit = fit_log_holder(result.sup_curve.points);
        } catch (const std::invalid_argument&) {
            result.sup_curve.fit = std::nullopt;  // fewer than 3 positive points
        }
    }
    return result;
}

struct BcComparison {
    std::int64_t count_dirichlet = 0;
    std::int64_t count_periodic = 0;
    std::int64_t rank_of_difference = 0;
};

// Counts under both boundary conditions on the same realization, plus the
// numerical rank of H_D - H_P; eigenvalue interlacing bounds the count gap by
// that rank.
inline BcComparison bc_compare(const PotentialSpec& spec, int d, double L, Coord center,
                               const SpectralWindow& w, std::int64_t cap = kDenseCap) {
    BoxSpec bD = make_box(d, L, center, Bc::Dirichlet);
    BoxSpec bP = make_box(d, L, center, Bc::Periodic);
    PotentialField field = sample_potential(spec, bD);  // values depend on coordinates only
    PotentialField fieldP = field;
    fieldP.box = bP;

    BandMatrix HD = assemble_hamiltonian(field);
    BandMatrix HP = assemble_hamiltonian(fieldP);
    BcComparison cmp;
    cmp.count_dirichlet = count_in_interval(HD, w);
    cmp.count_periodic = count_in_interval(HP, w);

    if (bD.n > cap) throw std::invalid_argument("bc_compare: order exceeds the dense cap");
    Eigen::MatrixXd diff = densify(HD) - densify(HP);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(diff);
    qr.setThreshold(1e-10);
    cmp.rank_of_difference = qr.rank();
    return cmp;
}

}  // namespace doslab
