#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "doslab/lattice.hpp"

namespace doslab {

// splitmix64 finalizer; the site RNG below is counter-based so that sampling
// is a pure function of (seed, coordinates) and therefore order-independent.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t site_stream(std::uint64_t seed, const Coord& y, int d) {
    std::uint64_t h = mix64(seed + 0x9e3779b97f4a7c15ULL);
    for (int k = 0; k < d; ++k)
        h = mix64(h ^ (static_cast<std::uint64_t>(y[k]) +
                       0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(k + 1)));
    return h;
}

inline double unit_uniform(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

enum class PotentialKind { Constant, Periodic, Quasiperiodic, AndersonUniform, AndersonBernoulli };

inline std::string to_string(PotentialKind k) {
    switch (k) {
        case PotentialKind::Constant: return "constant";
        case PotentialKind::Periodic: return "periodic";
        case PotentialKind::Quasiperiodic: return "quasiperiodic";
        case PotentialKind::AndersonUniform: return "anderson_uniform";
        case PotentialKind::AndersonBernoulli: return "anderson_bernoulli";
    }
    return "?";
}

struct PotentialSpec {
    PotentialKind kind = PotentialKind::Constant;

    double constant_value = 0.0;                       // Constant
    std::array<std::int64_t, 3> period{1, 1, 1};       // Periodic
    std::vector<double> table;                         // Periodic, lexicographic over period cell
    double amplitude = 0.0;                            // Quasiperiodic
    std::array<double, 3> frequency{0.0, 0.0, 0.0};    // Quasiperiodic
    double phase = 0.0;                                // Quasiperiodic
    double coupling = 0.0;                             // Anderson*
    double lo = 0.0, hi = 0.0;                         // AndersonUniform
    double prob = 0.0;                                 // AndersonBernoulli
    std::uint64_t seed = 0;

    bool stochastic() const {
        return kind == PotentialKind::AndersonUniform || kind == PotentialKind::AndersonBernoulli;
    }

    // sup-norm bound from parameters alone, without sampling
    double sup_bound() const {
        switch (kind) {
            case PotentialKind::Constant: return std::abs(constant_value);
            case PotentialKind::Periodic: {
                double m = 0;
                for (double v : table) m = std::max(m, std::abs(v));
                return m;
            }
            case PotentialKind::Quasiperiodic: return std::abs(amplitude);
            case PotentialKind::AndersonUniform:
                return std::abs(coupling) * std::max(std::abs(lo), std::abs(hi));
            case PotentialKind::AndersonBernoulli: return std::abs(coupling);
        }
        return 0;
    }

    double value_at(const Coord& y, int d) const {
        switch (kind) {
            case PotentialKind::Constant: return constant_value;
            case PotentialKind::Periodic: {
                std::int64_t idx = 0;
                for (int k = 0; k < d; ++k) {
                    std::int64_t m = y[k] % period[k];
                    if (m < 0) m += period[k];
                    idx = idx * period[k] + m;
                }
                return table[static_cast<std::size_t>(idx)];
            }
            case PotentialKind::Quasiperiodic: {
                double arg = phase;
                for (int k = 0; k < d; ++k) arg += frequency[k] * static_cast<double>(y[k]);
                return amplitude * std::cos(2.0 * std::numbers::pi * arg);
            }
            case PotentialKind::AndersonUniform: {
                double u = unit_uniform(site_stream(seed, y, d));
                return coupling * (lo + (hi - lo) * u);
            }
            case PotentialKind::AndersonBernoulli: {
                double u = unit_uniform(site_stream(seed, y, d));
                return u < prob ? coupling : 0.0;
            }
        }
        return 0;
    }

    PotentialSpec with_seed(std::uint64_t s) const {
        PotentialSpec out = *this;
        out.seed = s;
        return out;
    }
};

inline PotentialSpec constant_potential(double c) {
    PotentialSpec s;
    s.kind = PotentialKind::Constant;
    s.constant_value = c;
    return s;
}

inline PotentialSpec periodic_potential(std::array<std::int64_t, 3> period, std::vector<double> table, int d) {
    std::int64_t cell = 1;
    for (int k = 0; k < d; ++k) {
        if (period[k] < 1) throw std::invalid_argument("periodic_potential: period components must be >= 1");
        cell *= period[k];
    }
    if (static_cast<std::int64_t>(table.size()) != cell)
        throw std::invalid_argument("periodic_potential: table size must equal the period cell volume");
    PotentialSpec s;
    s.kind = PotentialKind::Periodic;
    s.period = period;
    s.table = std::move(table);
    return s;
}

inline PotentialSpec quasiperiodic_potential(double amplitude, std::array<double, 3> frequency, double phase) {
    PotentialSpec s;
    s.kind = PotentialKind::Quasiperiodic;
    s.amplitude = amplitude;
    s.frequency = frequency;
    s.phase = phase;
    return s;
}

inline PotentialSpec anderson_uniform(double coupling, double lo, double hi, std::uint64_t seed) {
    if (hi < lo) throw std::invalid_argument("anderson_uniform: hi < lo");
    PotentialSpec s;
    s.kind = PotentialKind::AndersonUniform;
    s.coupling = coupling;
    s.lo = lo;
    s.hi = hi;
    s.seed = seed;
    return s;
}

inline PotentialSpec anderson_bernoulli(double coupling, double prob, std::uint64_t seed) {
    if (!(prob >= 0.0 && prob <= 1.0))
        throw std::invalid_argument("anderson_bernoulli: probability must lie in [0,1]");
    PotentialSpec s;
    s.kind = PotentialKind::AndersonBernoulli;
    s.coupling = coupling;
    s.prob = prob;
    s.seed = seed;
    return s;
}

// Realized potential values on the sites of a box.
struct PotentialField {
    BoxSpec box;
    PotentialSpec spec;
    std::vector<double> values;  // one per site, in box enumeration order
    double realized_sup = 0.0;
};

inline PotentialField sample_potential(const PotentialSpec& spec, const BoxSpec& box) {
    PotentialField f;
    f.box = box;
    f.spec = spec;
    f.values.resize(static_cast<std::size_t>(box.n));
    double sup = 0.0;
    for (std::int64_t i = 0; i < box.n; ++i) {
        double v = spec.value_at(box.site(i), box.d);
        f.values[static_cast<std::size_t>(i)] = v;
        sup = std::max(sup, std::abs(v));
    }
    f.realized_sup = sup;
    return f;
}

}  // namespace doslab
