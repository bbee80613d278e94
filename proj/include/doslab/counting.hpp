#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "doslab/band_matrix.hpp"

namespace doslab {

// closed interval [E, E+eps]
struct SpectralWindow {
    double E = 0.0;
    double eps = 0.0;
    double hi() const { return E + eps; }
};

struct InertiaTriple {
    std::int64_t below = 0;
    std::int64_t zero = 0;
    std::int64_t above = 0;
};

struct InertiaResult {
    InertiaTriple counts;
    double shift_requested = 0.0;
    double shift_used = 0.0;
    double perturbation = 0.0;
    int retries = 0;
    double flops = 0.0;
};

class factorization_error : public std::runtime_error {
  public:
    explicit factorization_error(double shift)
        : std::runtime_error("LDL^T factorization broke down at shift " + std::to_string(shift)),
          shift_(shift) {}
    double shift() const { return shift_; }

  private:
    double shift_;
};

// endpoint nudge for the closed-interval counting convention
inline double counting_nudge(const BandMatrix& H, double x) {
    return 1e-9 * std::max({1.0, std::abs(x), H.scale()});
}

namespace detail {

// One LDL^T pass of H - shift*I without pivoting, keeping only the last b
// columns of L. Counts pivot signs (Sylvester). An exactly zero pivot is
// accepted only when its whole in-band column is zero (a decoupled site);
// otherwise the pass reports breakdown and the caller perturbs the shift.
inline std::optional<InertiaTriple> band_ldlt_pass(const BandMatrix& H, double shift, double* flops) {
    const std::int64_t n = H.n;
    const std::int64_t b = H.half_bandwidth;
    InertiaTriple t;
    double fl = 0.0;

    if (b == 0) {
        for (std::int64_t j = 0; j < n; ++j) {
            double dj = H.entry(j, 0) - shift;
            if (!std::isfinite(dj)) return std::nullopt;
            if (dj == 0.0) ++t.zero;
            else if (dj < 0.0) ++t.below;
            else ++t.above;
        }
        if (flops) *flops = static_cast<double>(n);
        return t;
    }

    std::vector<double> cols(static_cast<std::size_t>(b * b), 0.0);  // cols[(k%b)*b + (i-k-1)] = L(i,k)
    std::vector<double> dbuf(static_cast<std::size_t>(b), 0.0);
    std::vector<double> snum(static_cast<std::size_t>(b), 0.0);

    auto Lat = [&](std::int64_t i, std::int64_t k) -> double& {
        return cols[static_cast<std::size_t>((k % b) * b + (i - k - 1))];
    };

    for (std::int64_t j = 0; j < n; ++j) {
        double dj = H.entry(j, 0) - shift;
        std::int64_t k0 = std::max<std::int64_t>(0, j - b);
        for (std::int64_t k = k0; k < j; ++k) {
            double Ljk = Lat(j, k);
            dj -= Ljk * Ljk * dbuf[static_cast<std::size_t>(k % b)];
        }
        std::int64_t imax = std::min(n - 1, j + b);
        for (std::int64_t i = j + 1; i <= imax; ++i) {
            double s = (i - j <= H.half_bandwidth) ? H.entry(i, i - j) : 0.0;
            std::int64_t kk0 = std::max(k0, i - b);
            for (std::int64_t k = kk0; k < j; ++k) {
                s -= Lat(i, k) * Lat(j, k) * dbuf[static_cast<std::size_t>(k % b)];
                fl += 2.0;
            }
            snum[static_cast<std::size_t>(i - j - 1)] = s;
        }
        fl += 2.0 * static_cast<double>(j - k0);

        if (!std::isfinite(dj)) return std::nullopt;
        if (dj == 0.0) {
            for (std::int64_t i = j + 1; i <= imax; ++i)
                if (snum[static_cast<std::size_t>(i - j - 1)] != 0.0) return std::nullopt;
            ++t.zero;
            for (std::int64_t i = j + 1; i <= j + b; ++i) Lat(i, j) = 0.0;
            dbuf[static_cast<std::size_t>(j % b)] = 0.0;
            continue;
        }
        if (dj < 0.0) ++t.below;
        else ++t.above;
        for (std::int64_t i = j + 1; i <= imax; ++i) {
            double v = snum[static_cast<std::size_t>(i - j - 1)] / dj;
            if (!std::isfinite(v)) return std::nullopt;
            Lat(i, j) = v;
        }
        for (std::int64_t i = imax + 1; i <= j + b; ++i) Lat(i, j) = 0.0;
        dbuf[static_cast<std::size_t>(j % b)] = dj;
    }
    if (flops) *flops = fl;
    return t;
}

// Sturm-style pivot recurrence, the dedicated tridiagonal path. Same zero
// pivot semantics as the band pass.
inline std::optional<InertiaTriple> sturm_pass(const BandMatrix& H, double shift, double* flops) {
    const std::int64_t n = H.n;
    InertiaTriple t;
    double dprev = 0.0;
    for (std::int64_t j = 0; j < n; ++j) {
        double dj = H.entry(j, 0) - shift;
        if (j > 0) {
            double c = H.half_bandwidth >= 1 ? H.entry(j, 1) : 0.0;
            if (dprev != 0.0) dj -= c * c / dprev;
            else if (c != 0.0) return std::nullopt;
        }
        if (!std::isfinite(dj)) return std::nullopt;
        if (dj == 0.0) ++t.zero;
        else if (dj < 0.0) ++t.below;
        else ++t.above;
        dprev = dj;
    }
    if (flops) *flops = 3.0 * static_cast<double>(n);
    return t;
}

template <typename Pass>
InertiaResult inertia_with_retries(const BandMatrix& H, double shift, int direction, Pass pass) {
    InertiaResult res;
    res.shift_requested = shift;
    double tau = counting_nudge(H, shift);
    double dir = direction < 0 ? -1.0 : 1.0;
    for (int attempt = 0; attempt <= 3; ++attempt) {
        double s = attempt == 0 ? shift : shift + dir * tau * std::ldexp(1.0, attempt - 1);
        double fl = 0.0;
        if (auto counts = pass(H, s, &fl)) {
            res.counts = *counts;
            res.shift_used = s;
            res.perturbation = s - shift;
            res.retries = attempt;
            res.flops = fl;
            return res;
        }
    }
    throw factorization_error(shift);
}

}  // namespace detail

// Inertia of H - shift*I via band LDL^T (Sylvester's law). `direction` is the
// side on which the shift is perturbed if a zero pivot forces a retry.
inline InertiaResult ldlt_inertia(const BandMatrix& H, double shift, int direction = +1) {
    return detail::inertia_with_retries(H, shift, direction, detail::band_ldlt_pass);
}

// Tridiagonal fast path; requires half_bandwidth <= 1.
inline InertiaResult sturm_inertia(const BandMatrix& H, double shift, int direction = +1) {
    if (H.half_bandwidth > 1)
        throw std::invalid_argument("sturm_inertia: matrix is not tridiagonal");
    return detail::inertia_with_retries(H, shift, direction, detail::sturm_pass);
}

inline InertiaResult inertia_at(const BandMatrix& H, double shift, int direction = +1) {
    return H.half_bandwidth <= 1 ? sturm_inertia(H, shift, direction) : ldlt_inertia(H, shift, direction);
}

// #{eigenvalues < x}, endpoint resolved by the nudge convention
inline std::int64_t count_lt(const BandMatrix& H, double x) {
    return inertia_at(H, x - counting_nudge(H, x), -1).counts.below;
}

// #{eigenvalues <= x}
inline std::int64_t count_le(const BandMatrix& H, double x) {
    return inertia_at(H, x + counting_nudge(H, x), +1).counts.below;
}

// #{eigenvalues in the closed window [E, E+eps]}
inline std::int64_t count_in_interval(const BandMatrix& H, const SpectralWindow& w) {
    if (!(w.eps > 0.0)) throw std::invalid_argument("count_in_interval: window width must be positive");
    std::int64_t c = count_le(H, w.hi()) - count_lt(H, w.E);
    return std::max<std::int64_t>(c, 0);
}

}  // namespace doslab
