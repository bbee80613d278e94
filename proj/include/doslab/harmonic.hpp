#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace doslab {

inline std::uint64_t binomial(std::int64_t n, std::int64_t k) {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    unsigned __int128 r = 1;
    for (std::int64_t i = 1; i <= k; ++i) {
        r = r * static_cast<unsigned __int128>(n - k + i) / static_cast<unsigned __int128>(i);
        if (r > static_cast<unsigned __int128>(UINT64_MAX))
            throw std::overflow_error("binomial: result exceeds 64 bits");
    }
    return static_cast<std::uint64_t>(r);
}

// dim of the homogeneous harmonic polynomials of degree m on R^d
inline std::uint64_t harmonic_dim(int d, int m) {
    if (d < 2) throw std::invalid_argument("harmonic_dim: d must be >= 2");
    if (m < 0) throw std::invalid_argument("harmonic_dim: negative degree");
    if (m == 0) return 1;
    if (m == 1) return static_cast<std::uint64_t>(d);
    return binomial(d + m - 1, d - 1) - binomial(d + m - 3, d - 1);
}

struct HarmonicDims {
    int d = 0;
    int N = 0;
    std::vector<std::uint64_t> table;       // dim H_m, m = 0..N
    std::vector<std::uint64_t> cumulative;  // dim H_{<=m}, m = 0..N
    double gamma = 0.0;                     // max over 1<=n<=N of cumulative(n)/n^(d-1)
};

// Table of harmonic-polynomial dimensions together with the smallest constant
// gamma_d certifying cumulative <= gamma_d N^(d-1) on the tabulated range.
inline HarmonicDims harmonic_dims(int d, int N) {
    if (d < 2) throw std::invalid_argument("harmonic_dims: d must be >= 2");
    if (N < 0) throw std::invalid_argument("harmonic_dims: N must be >= 0");
    HarmonicDims h;
    h.d = d;
    h.N = N;
    h.table.resize(static_cast<std::size_t>(N) + 1);
    h.cumulative.resize(static_cast<std::size_t>(N) + 1);
    std::uint64_t cum = 0;
    for (int m = 0; m <= N; ++m) {
        h.table[static_cast<std::size_t>(m)] = harmonic_dim(d, m);
        cum += h.table[static_cast<std::size_t>(m)];
        h.cumulative[static_cast<std::size_t>(m)] = cum;
    }
    for (int n = 1; n <= N; ++n) {
        double ratio = static_cast<double>(h.cumulative[static_cast<std::size_t>(n)]) /
                       std::pow(static_cast<double>(n), d - 1);
        h.gamma = std::max(h.gamma, ratio);
    }
    return h;
}

}  // namespace doslab
