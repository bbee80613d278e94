#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "doslab/band_matrix.hpp"
#include "doslab/lattice.hpp"

namespace doslab {

// Empirical unique-continuation quantities for an approximate eigenfunction:
// mass on a distant set Theta versus local mass near x0 plus the defect
// zeta = (H - E) psi. The local mass uses the lattice surrogate
// |psi(x0)| delta^(d/2) since delta is below the lattice spacing.
struct UcpReport {
    double Q = 0.0;
    double delta = 0.0;
    double dist_x0_theta = 0.0;
    double norm_theta = 0.0;
    double norm_local = 0.0;
    double norm_zeta = 0.0;
    double norm_total = 0.0;
    double K = 0.0;  // |V - E|_inf over the box
    std::optional<double> empirical_exponent;
};

inline UcpReport ucp_probe(std::span<const double> psi, const BandMatrix& H, const BoxSpec& box,
                           double E, const std::vector<std::int64_t>& theta, std::int64_t x0_index,
                           double delta) {
    if (static_cast<std::int64_t>(psi.size()) != H.n || box.n != H.n)
        throw std::invalid_argument("ucp_probe: psi, H and box sizes disagree");
    if (theta.empty()) throw std::invalid_argument("ucp_probe: empty Theta");
    if (x0_index < 0 || x0_index >= box.n) throw std::invalid_argument("ucp_probe: x0 outside box");
    if (std::find(theta.begin(), theta.end(), x0_index) != theta.end())
        throw std::invalid_argument("ucp_probe: x0 must not lie in Theta");

    UcpReport rep;
    Coord x0 = box.site(x0_index);
    rep.dist_x0_theta = std::numeric_limits<double>::infinity();
    double theta_sq = 0.0;
    for (std::int64_t t : theta) {
        if (t < 0 || t >= box.n) throw std::invalid_argument("ucp_probe: Theta site outside box");
        double dist = euclid_dist(box.site(t), x0, box.d);
        rep.Q = std::max(rep.Q, dist);
        rep.dist_x0_theta = std::min(rep.dist_x0_theta, dist);
        theta_sq += psi[static_cast<std::size_t>(t)] * psi[static_cast<std::size_t>(t)];
    }
    if (rep.Q < 1.0) throw std::invalid_argument("ucp_probe: Q(x0, Theta) must be >= 1");

    double delta_max = std::min(rep.dist_x0_theta, 1.0 / 24.0);
    if (!(delta > 0.0 && delta <= delta_max))
        throw std::invalid_argument("ucp_probe: delta must lie in (0, min{dist(x0,Theta), 1/24}]");
    rep.delta = delta;

    rep.norm_theta = std::sqrt(theta_sq);
    if (!(rep.norm_theta > 0.0)) throw std::invalid_argument("ucp_probe: psi vanishes on Theta");

    rep.norm_local =
        std::abs(psi[static_cast<std::size_t>(x0_index)]) * std::pow(delta, 0.5 * box.d);

    std::vector<double> zeta = H.apply(psi);
    double zeta_sq = 0.0, total_sq = 0.0, dev = 0.0;
    for (std::int64_t i = 0; i < H.n; ++i) {
        zeta[static_cast<std::size_t>(i)] -= E * psi[static_cast<std::size_t>(i)];
        zeta_sq += zeta[static_cast<std::size_t>(i)] * zeta[static_cast<std::size_t>(i)];
        total_sq += psi[static_cast<std::size_t>(i)] * psi[static_cast<std::size_t>(i)];
        dev = std::max(dev, std::abs(H.entry(i, 0) - E));
    }
    rep.norm_zeta = std::sqrt(zeta_sq);
    rep.norm_total = std::sqrt(total_sq);
    rep.K = dev;

    double numerator = rep.norm_local * rep.norm_local + delta * delta * zeta_sq;
    if (numerator > 0.0)
        rep.empirical_exponent = std::log(numerator / theta_sq) / std::log(delta / rep.Q);
    return rep;
}

}  // namespace doslab
