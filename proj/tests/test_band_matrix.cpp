#include <catch2/catch.hpp>
#include <random>

#include "doslab/band_matrix.hpp"
#include "doslab/dense_spectrum.hpp"
#include "oracles.hpp"

using namespace doslab;

namespace {

BandMatrix assemble(int d, double L, const PotentialSpec& spec, Bc bc, Coord center = {0, 0, 0}) {
    return assemble_hamiltonian(sample_potential(spec, make_box(d, L, center, bc)));
}

std::int64_t offdiag_nonzeros(const BandMatrix& H) {
    std::int64_t c = 0;
    for (std::int64_t i = 0; i < H.n; ++i)
        for (std::int64_t off = 1; off <= std::min(H.half_bandwidth, i); ++off)
            if (H.entry(i, off) != 0.0) ++c;
    return c;
}

}  // namespace

TEST_CASE("free 1D chain, L=3, Dirichlet: tridiagonal with two bonds") {
    BandMatrix H = assemble(1, 3, constant_potential(0.0), Bc::Dirichlet);
    REQUIRE(H.n == 3);
    REQUIRE(H.half_bandwidth == 1);
    for (std::int64_t i = 0; i < 3; ++i) CHECK(H.entry(i, 0) == 0.0);
    CHECK(H.entry(1, 1) == -1.0);
    CHECK(H.entry(2, 1) == -1.0);
}

TEST_CASE("free 1D chain, L=3, periodic: every site couples twice") {
    BandMatrix H = assemble(1, 3, constant_potential(0.0), Bc::Periodic);
    REQUIRE(H.n == 3);
    CHECK(H.at(0, 1) == -1.0);
    CHECK(H.at(1, 2) == -1.0);
    CHECK(H.at(0, 2) == -1.0);  // wraparound bond
    for (std::int64_t i = 0; i < 3; ++i) {
        std::int64_t degree = 0;
        for (std::int64_t j = 0; j < 3; ++j)
            if (j != i && H.at(i, j) == -1.0) ++degree;
        CHECK(degree == 2);
    }
}

TEST_CASE("2D L=3 free Dirichlet has 24 off-diagonal entries") {
    BandMatrix H = assemble(2, 3, constant_potential(0.0), Bc::Dirichlet);
    REQUIRE(H.n == 9);
    // brute-force edge enumeration over the 3x3 grid
    BoxSpec box = make_box(2, 3, {0, 0, 0});
    std::int64_t edges = 0;
    for (std::int64_t i = 0; i < box.n; ++i)
        for (std::int64_t j = i + 1; j < box.n; ++j) {
            Coord a = box.site(i), b = box.site(j);
            std::int64_t manhattan = std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]);
            if (manhattan == 1) {
                ++edges;
                CHECK(H.at(i, j) == -1.0);
            } else {
                CHECK(H.at(i, j) == 0.0);
            }
        }
    CHECK(edges == 12);
    CHECK(offdiag_nonzeros(H) == 12);  // lower-band storage holds each edge once
}

TEST_CASE("assembled Hamiltonians are symmetric after densification") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 4; ++trial) {
        int d = 1 + trial % 3;
        double L = d == 3 ? 4 : 8;
        Bc bc = trial % 2 == 0 ? Bc::Dirichlet : Bc::Periodic;
        BandMatrix H = assemble(d, L, anderson_uniform(1.0, -1.0, 1.0, rng()), bc);
        REQUIRE(H.n <= 200);
        Eigen::MatrixXd M = densify(H);
        CHECK((M - M.transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK(M.diagonal().cwiseAbs().maxCoeff() <= 1.0 + 1e-15);
    }
}

TEST_CASE("Gershgorin containment against dense spectra") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 6; ++trial) {
        int d = 1 + trial % 2;
        BandMatrix H = assemble(d, d == 1 ? 31 : 9, anderson_uniform(1.5, -1.0, 1.0, rng()),
                                trial % 2 ? Bc::Periodic : Bc::Dirichlet);
        std::vector<double> eigs = oracles::dense_eigenvalues(H);
        double sup = 0;
        for (std::int64_t i = 0; i < H.n; ++i) sup = std::max(sup, std::abs(H.entry(i, 0)));
        CHECK(eigs.front() >= -2.0 * d - sup - 1e-12);
        CHECK(eigs.back() <= 2.0 * d + sup + 1e-12);
    }
}

TEST_CASE("translation covariance for constant and matching-period potentials") {
    PotentialSpec constant = constant_potential(0.7);
    PotentialSpec periodic = periodic_potential({2, 2, 1}, {0.0, 1.0, -1.0, 0.5}, 2);
    for (const auto& spec : {constant, periodic}) {
        BandMatrix A = assemble(2, 5, spec, Bc::Dirichlet, {0, 0, 0});
        BandMatrix B = assemble(2, 5, spec, Bc::Dirichlet, {2, -4, 0});  // translate by the period
        CHECK(A.a == B.a);
    }
}

TEST_CASE("Dirichlet/periodic difference is supported on wraparound pairs") {
    for (int d = 1; d <= 2; ++d) {
        double L = d == 1 ? 11 : 5;
        PotentialSpec spec = anderson_uniform(1.0, 0.0, 1.0, 3);
        BoxSpec boxD = make_box(d, L, {0, 0, 0}, Bc::Dirichlet);
        PotentialField field = sample_potential(spec, boxD);
        BandMatrix HD = assemble_hamiltonian(field);
        field.box = make_box(d, L, {0, 0, 0}, Bc::Periodic);
        BandMatrix HP = assemble_hamiltonian(field);

        BoxSpec box = field.box;
        std::vector<std::vector<double>> diff(static_cast<std::size_t>(box.n),
                                              std::vector<double>(static_cast<std::size_t>(box.n), 0.0));
        std::int64_t nonzeros = 0;
        for (std::int64_t i = 0; i < box.n; ++i)
            for (std::int64_t j = 0; j < box.n; ++j) {
                double v = HD.at(i, j) - HP.at(i, j);
                diff[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
                if (v != 0.0) {
                    ++nonzeros;
                    Coord a = box.site(i), b = box.site(j);
                    bool wrap = false;  // exactly one axis wraps, the others agree
                    for (int k = 0; k < d; ++k) {
                        if (std::abs(a[k] - b[k]) == box.side - 1) {
                            wrap = !wrap;
                        } else if (a[k] != b[k]) {
                            wrap = false;
                            break;
                        }
                    }
                    CHECK(wrap);
                }
            }
        std::int64_t rank = oracles::gauss_rank(diff);
        std::int64_t sides = 1;
        for (int k = 1; k < d; ++k) sides *= box.side;
        CHECK(rank <= 2 * d * sides);
        CHECK(nonzeros == 2 * d * sides);  // one wrap bond per line per axis
    }
}
