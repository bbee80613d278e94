#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

#include "doslab/lattice.hpp"

namespace doslab {

namespace detail {

// (1 - e^{-t})/t, extended by 1 at t = 0; Taylor series below the knee keeps
// the evaluation away from the 0/0
inline double carleman_integrand(double t) {
    if (t < 1e-3) {
        double sum = 0.0, term = 1.0;
        for (int k = 1; std::abs(term) > 1e-18; ++k) {
            sum += term;
            term *= -t / static_cast<double>(k + 1);
        }
        return sum;
    }
    return -std::expm1(-t) / t;
}

inline double simpson(double fa, double fm, double fb, double h) { return h / 6.0 * (fa + 4.0 * fm + fb); }

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                               double fm, double fb, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double fl = f(0.5 * (a + m));
    double fr = f(0.5 * (m + b));
    double left = simpson(fa, fl, fm, m - a);
    double right = simpson(fm, fr, fb, b - m);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, fl, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, fr, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// int_0^s (1 - e^{-t})/t dt by adaptive Simpson, absolute error well under 1e-12
inline double carleman_exponent_integral(double s) {
    if (s < 0.0) throw std::invalid_argument("carleman_exponent_integral: negative argument");
    if (s == 0.0) return 0.0;
    auto f = [](double t) { return detail::carleman_integrand(t); };
    double total = 0.0;
    double a = 0.0;
    // unit panels keep the adaptive recursion shallow on long ranges
    while (a < s) {
        double b = std::min(a + 1.0, s);
        double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
        double whole = detail::simpson(fa, fm, fb, b - a);
        total += detail::adaptive_simpson(f, a, b, fa, fm, fb, whole, 1e-14, 48);
        a = b;
    }
    return total;
}

// phi(s) = s exp(-int_0^s (1-e^{-t})/t dt): strictly increasing, phi(0) = 0
inline double carleman_phi(double s) {
    if (s < 0.0) throw std::invalid_argument("carleman_phi: negative argument");
    if (s == 0.0) return 0.0;
    return s * std::exp(-carleman_exponent_integral(s));
}

// C_1 = 1/phi(1), in ]2, 3[
inline double carleman_c1() {
    static const double c1 = 1.0 / carleman_phi(1.0);
    return c1;
}

// radial weight w_rho(x) = phi(|x|/rho); on B(0, rho) it is sandwiched between
// |x|/(C_1 rho) and |x|/rho
struct CarlemanWeight {
    double rho;

    explicit CarlemanWeight(double r) : rho(r) {
        if (!(r > 0.0)) throw std::invalid_argument("CarlemanWeight: rho must be positive");
    }

    double radial(double dist) const { return carleman_phi(dist / rho); }

    double operator()(const double* x, int d) const {
        double s = 0.0;
        for (int k = 0; k < d; ++k) s += x[k] * x[k];
        return radial(std::sqrt(s));
    }
};

}  // namespace doslab
