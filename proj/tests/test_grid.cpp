#include "support.hpp"

#include <catch_amalgamated.hpp>

using namespace qcov;
using Catch::Approx;

TEST_CASE("grid geometry", "[grid]") {
    const GridSpec g = make_grid(2, 64, 16.0);
    CHECK(g.size() == 4096);
    CHECK(g.dq() == Approx(0.25));
    CHECK(g.dk() == Approx(two_pi / 16.0));
    CHECK(g.k_max() == Approx(pi / 0.25));
    CHECK(g.coordinate(0) == -8.0);
    CHECK(g.coordinate(32) == 0.0);
    CHECK(g.wavenumber(32) == 0.0);
    CHECK(g.wavenumber(0) == Approx(-32 * g.dk()));

    // Row-major, axis 0 slowest.
    CHECK(g.flat_index({1, 2, 0}) == 66);
    CHECK(g.multi_index(66)[0] == 1);
    CHECK(g.multi_index(66)[1] == 2);
    CHECK(g.axis_index(66, 0) == 1);
    CHECK(g.axis_index(66, 1) == 2);
    CHECK(g.flat_index({-1, 64, 0}) == g.flat_index({63, 0, 0}));
    CHECK(g.position(66).isApprox(Vec(-7.75, -7.5, 0.0)));
}

TEST_CASE("grid construction rejects bad parameters", "[grid]") {
    CHECK_THROWS_AS(make_grid(0, 64, 1.0), precondition_error);
    CHECK_THROWS_AS(make_grid(4, 64, 1.0), precondition_error);
    CHECK_THROWS_AS(make_grid(1, 48, 1.0), precondition_error);
    CHECK_THROWS_AS(make_grid(1, 2, 1.0), precondition_error);
    CHECK_THROWS_AS(make_grid(1, 64, -1.0), precondition_error);
    CHECK_THROWS_AS(make_grid(3, 512, 1.0), precondition_error);  // 2^27 points exceeds the cap
    CHECK_NOTHROW(make_grid(3, 64, 1.0));
}

TEST_CASE("inner product and normalization", "[grid]") {
    const GridSpec g = make_grid(1, 256, 32.0);
    const Wavefunction psi = sample_gaussian(g, 1.0);
    CHECK(norm(psi) == Approx(1.0).epsilon(1e-14));
    // Peak value (2 pi)^{-1/4} for lambda = 1.
    CHECK(std::abs(psi[128]) == Approx(std::pow(two_pi, -0.25)).epsilon(1e-12));

    const Wavefunction phi = sample_gaussian(g, 1.5, Vec(1.0, 0, 0), Vec(0.5, 0, 0));
    const cplx a = inner(phi, psi);
    CHECK(std::abs(a - std::conj(inner(psi, phi))) < 1e-15);
    // Antilinear in the first slot.
    CHECK(std::abs(inner(cplx(0, 2) * phi, psi) - cplx(0, -2) * a) < 1e-14);
    CHECK_THROWS_AS(normalize(Wavefunction(g)), precondition_error);
}

TEST_CASE("grid mismatch is detected", "[grid]") {
    const Wavefunction a = sample_gaussian(make_grid(1, 128, 16.0), 1.0);
    const Wavefunction b = sample_gaussian(make_grid(1, 128, 20.0), 1.0);
    CHECK_THROWS_AS(inner(a, b), grid_mismatch);
    CHECK_THROWS_AS(a - b, grid_mismatch);
}

TEST_CASE("gaussian sampling preconditions", "[grid]") {
    const GridSpec g = make_grid(1, 128, 32.0);  // dq = 0.25
    CHECK_THROWS_AS(sample_gaussian(g, 0.9), precondition_error);  // below 4 dq
    CHECK_THROWS_AS(sample_gaussian(g, 4.5), precondition_error);  // above L/8
    CHECK_THROWS_AS(sample_gaussian(g, 1.0, Vec::Zero(), Vec(7.0, 0, 0)), precondition_error);
    CHECK_NOTHROW(sample_gaussian(g, 1.0));
    CHECK_NOTHROW(sample_gaussian(g, 4.0));
}

TEST_CASE("minimum-image displacement wraps across the box", "[grid]") {
    const GridSpec g = make_grid(2, 128, 10.0);
    const Vec d = periodic_displacement(g, Vec(-4.5, 4.5, 0), Vec(4.5, -4.5, 0));
    CHECK(d[0] == Approx(1.0));
    CHECK(d[1] == Approx(-1.0));
    // A packet centred near the edge is continuous across it.
    const Wavefunction psi = sample_gaussian(g, 0.5, Vec(4.8, 0, 0));
    CHECK(norm(psi) == Approx(1.0).epsilon(1e-13));
    CHECK(std::abs(mean_position(psi)[1]) < 1e-12);
}
