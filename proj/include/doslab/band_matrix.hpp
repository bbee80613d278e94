#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "doslab/lattice.hpp"
#include "doslab/potential.hpp"

namespace doslab {

// Symmetric band matrix, lower band stored row-wise:
// entry(i, off) = A(i, i-off) for off = 0..b.
struct BandMatrix {
    std::int64_t n = 0;
    std::int64_t half_bandwidth = 0;
    std::vector<double> a;

    // provenance of assembled Hamiltonians; d == 0 for hand-built matrices
    int box_dim = 0;
    double box_L = 0.0;
    Bc bc = Bc::Dirichlet;

    BandMatrix() = default;
    BandMatrix(std::int64_t order, std::int64_t b)
        : n(order), half_bandwidth(b), a(static_cast<std::size_t>(order * (b + 1)), 0.0) {}

    double& entry(std::int64_t i, std::int64_t off) {
        return a[static_cast<std::size_t>(i * (half_bandwidth + 1) + off)];
    }
    double entry(std::int64_t i, std::int64_t off) const {
        return a[static_cast<std::size_t>(i * (half_bandwidth + 1) + off)];
    }

    // symmetric accessor, zero outside the band
    double at(std::int64_t i, std::int64_t j) const {
        if (i < j) std::swap(i, j);
        std::int64_t off = i - j;
        if (off > half_bandwidth) return 0.0;
        return entry(i, off);
    }

    // max row sum of absolute values; bounds the spectral radius
    double scale() const {
        std::vector<double> row(static_cast<std::size_t>(n), 0.0);
        for (std::int64_t i = 0; i < n; ++i) {
            row[static_cast<std::size_t>(i)] += std::abs(entry(i, 0));
            std::int64_t omax = std::min(half_bandwidth, i);
            for (std::int64_t off = 1; off <= omax; ++off) {
                double v = std::abs(entry(i, off));
                if (v == 0.0) continue;
                row[static_cast<std::size_t>(i)] += v;
                row[static_cast<std::size_t>(i - off)] += v;
            }
        }
        double m = 0.0;
        for (double r : row) m = std::max(m, r);
        return m;
    }

    std::vector<double> apply(std::span<const double> x) const {
        if (static_cast<std::int64_t>(x.size()) != n)
            throw std::invalid_argument("BandMatrix::apply: size mismatch");
        std::vector<double> y(static_cast<std::size_t>(n), 0.0);
        for (std::int64_t i = 0; i < n; ++i) {
            y[static_cast<std::size_t>(i)] += entry(i, 0) * x[static_cast<std::size_t>(i)];
            std::int64_t omax = std::min(half_bandwidth, i);
            for (std::int64_t off = 1; off <= omax; ++off) {
                double v = entry(i, off);
                if (v == 0.0) continue;
                y[static_cast<std::size_t>(i)] += v * x[static_cast<std::size_t>(i - off)];
                y[static_cast<std::size_t>(i - off)] += v * x[static_cast<std::size_t>(i)];
            }
        }
        return y;
    }

    std::vector<double> dense() const {
        std::vector<double> m(static_cast<std::size_t>(n * n), 0.0);
        for (std::int64_t i = 0; i < n; ++i) {
            std::int64_t omax = std::min(half_bandwidth, i);
            for (std::int64_t off = 0; off <= omax; ++off) {
                double v = entry(i, off);
                m[static_cast<std::size_t>(i * n + (i - off))] = v;
                m[static_cast<std::size_t>((i - off) * n + i)] = v;
            }
        }
        return m;
    }
};

// H = -Delta + V on the box, with hopping -1 between nearest neighbours and
// wraparound pairs per axis under periodic boundary conditions.
inline BandMatrix assemble_hamiltonian(const PotentialField& field) {
    const BoxSpec& box = field.box;
    if (static_cast<std::int64_t>(field.values.size()) != box.n)
        throw std::invalid_argument("assemble_hamiltonian: field does not match its box");

    std::int64_t b = 0;
    if (box.side > 1) {
        b = box.stride(0);  // slowest axis has the widest stride
        if (box.bc == Bc::Periodic) b = (box.side - 1) * box.stride(0);
    }

    BandMatrix H(box.n, b);
    H.box_dim = box.d;
    H.box_L = box.L;
    H.bc = box.bc;

    for (std::int64_t i = 0; i < box.n; ++i) {
        H.entry(i, 0) = field.values[static_cast<std::size_t>(i)];
        Coord y = box.site(i);
        for (int k = 0; k < box.d; ++k) {
            std::int64_t s = box.stride(k);
            if (y[k] < box.center[k] + box.half) {
                H.entry(i + s, s) = -1.0;  // bond to the +e_k neighbour
            } else if (box.bc == Bc::Periodic && box.side >= 3) {
                H.entry(i, (box.side - 1) * s) = -1.0;  // wraparound bond
            }
        }
    }
    return H;
}

}  // namespace doslab
