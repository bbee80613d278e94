#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace doslab {

using Coord = std::array<std::int64_t, 3>;

enum class Bc { Dirichlet, Periodic };

inline std::string to_string(Bc bc) { return bc == Bc::Dirichlet ? "D" : "P"; }

// Lattice box {y in Z^d : |y - x0|_inf <= L/2}, sites enumerated
// lexicographically in (y_1,...,y_d) with the last coordinate fastest.
struct BoxSpec {
    int d = 1;
    double L = 1.0;
    Coord center{0, 0, 0};
    Bc bc = Bc::Dirichlet;

    std::int64_t half = 0;   // floor(L/2)
    std::int64_t side = 1;   // sites per axis, 2*half + 1
    std::int64_t n = 1;      // side^d

    std::int64_t stride(int axis) const {
        std::int64_t s = 1;
        for (int k = axis + 1; k < d; ++k) s *= side;
        return s;
    }

    std::int64_t index_of(const Coord& y) const {
        std::int64_t idx = 0;
        for (int k = 0; k < d; ++k) {
            std::int64_t off = y[k] - (center[k] - half);
            if (off < 0 || off >= side) throw std::out_of_range("site outside box");
            idx = idx * side + off;
        }
        return idx;
    }

    Coord site(std::int64_t index) const {
        if (index < 0 || index >= n) throw std::out_of_range("site index out of range");
        Coord y{0, 0, 0};
        for (int k = d - 1; k >= 0; --k) {
            y[k] = center[k] - half + index % side;
            index /= side;
        }
        return y;
    }

    bool contains(const Coord& y) const {
        for (int k = 0; k < d; ++k)
            if (std::abs(y[k] - center[k]) > half) return false;
        return true;
    }
};

inline BoxSpec make_box(int d, double L, Coord center = {0, 0, 0}, Bc bc = Bc::Dirichlet) {
    if (d < 1 || d > 3)
        throw std::invalid_argument("make_box: dimension must be 1, 2 or 3, got " + std::to_string(d));
    if (!(L >= 1.0) || !std::isfinite(L))
        throw std::invalid_argument("make_box: side length must satisfy L >= 1, got " + std::to_string(L));
    BoxSpec box;
    box.d = d;
    box.L = L;
    box.center = center;
    box.bc = bc;
    box.half = static_cast<std::int64_t>(std::floor(L / 2.0));
    box.side = 2 * box.half + 1;
    box.n = 1;
    for (int k = 0; k < d; ++k) {
        box.n *= box.side;
        if (box.n > (std::int64_t{1} << 40))
            throw std::invalid_argument("make_box: box too large");
    }
    if (bc == Bc::Periodic && box.side < 3)
        throw std::invalid_argument(
            "make_box: periodic boundary condition needs at least 3 sites per axis, got " +
            std::to_string(box.side));
    return box;
}

inline double euclid_dist(const Coord& a, const Coord& b, int d) {
    double s = 0;
    for (int k = 0; k < d; ++k) {
        double t = static_cast<double>(a[k] - b[k]);
        s += t * t;
    }
    return std::sqrt(s);
}

}  // namespace doslab
