#include "support.hpp"

#include <catch_amalgamated.hpp>

using namespace qcov;

namespace {

const GridSpec& vn_grid() {
    static const GridSpec g = make_grid(1, 128, 24.0);
    return g;
}

}  // namespace

TEST_CASE("projection construction and guards", "[uniqueness]") {
    const VNProjection proj = make_vn_projection(vn_grid());
    CHECK(vn_truncation_bound(proj) < 1e-10);
    for (std::size_t s = 0; s < proj.steps.size(); ++s) CHECK(std::abs(proj.shift_of(s)) <= 12.0);
    CHECK_THROWS_AS(make_vn_projection(make_grid(2, 16, 8.0)), precondition_error);
    CHECK_THROWS_AS(make_vn_projection(make_grid(1, 2048, 24.0)), precondition_error);
    CHECK_THROWS_AS(make_vn_projection(vn_grid(), 20.0), precondition_error);
}

TEST_CASE("dense checks: idempotent, symmetric, rank one, two routes agree", "[uniqueness]") {
    const VNDenseReport r = vn_dense_checks(make_vn_projection(vn_grid()));
    CHECK(r.idempotency < 1e-8);
    CHECK(r.symmetry < 1e-10);
    CHECK(r.rank_gap < 1e-6);
    CHECK(r.weyl_agreement < 1e-8);
}

TEST_CASE("FFT route: projection onto the vacuum", "[uniqueness]") {
    test::Draws draws(61);
    const GridSpec& g = vn_grid();
    const VNProjection proj = make_vn_projection(g);
    const Wavefunction vac = vn_vacuum(g);
    CHECK(std::abs(norm(vac) - 1.0) < 1e-12);
    CHECK(distance(vn_apply(proj, vac), vac) < 1e-10);

    const Wavefunction odd = normalize(position_apply(0, vac));
    CHECK(norm(vn_apply(proj, odd)) < 1e-10);

    const Wavefunction phi = sample_gaussian(g, 1.0, Vec(1.0, 0, 0), Vec(0.5, 0, 0));
    const Wavefunction psi = sample_gaussian(g, 2.0, Vec(-2.0, 0, 0));
    const Wavefunction ephi = vn_apply(proj, phi), epsi = vn_apply(proj, psi);
    CHECK(distance(vn_apply(proj, ephi), ephi) < 1e-8);
    CHECK(std::abs(inner(phi, epsi) - inner(ephi, psi)) < 1e-8);
    // Rank one: any two outputs are parallel.
    CHECK(1.0 - std::abs(inner(ephi, epsi)) / (norm(ephi) * norm(epsi)) < 1e-6);
    CHECK(distance(vn_apply_weyl(proj, phi), ephi) < 1e-8);

    for (int i = 0; i < 5; ++i) {
        const Wavefunction seed = normalize(test::trig_function(draws, g, 4, 6) + cplx(0.5) * vac);
        CHECK(distance(vn_apply(proj, seed), inner(vac, seed) * vac) < 1e-10);
    }
}

TEST_CASE("compression coefficient lambda", "[uniqueness][slow]") {
    test::Draws draws(62);
    const GridSpec& g = vn_grid();
    const VNProjection proj = make_vn_projection(g);

    SpectralFunction point(g);
    point[g.size() / 2] = 1.0 / g.dk();  // weight one at k = 0
    CHECK(std::abs(lambda_coeff(point, 0.0) - 1.0) < 1e-15);

    const GridFunction probe = probe_gaussian(g);
    CHECK(std::abs(lambda_coeff(forward(probe), 0.0) - lambda_coeff_direct(probe, 0.0)) < 1e-10);
    CHECK(std::abs(lambda_coeff(forward(probe), 0.7) - lambda_coeff_direct(probe, 0.7)) < 1e-10);
    CHECK(compression_error(proj, probe, 0.7) < 1e-6);

    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const GridFunction f = test::trig_function(draws, g, 3, 8);
        const double a = draws.uniform(-3.0, 3.0);
        worst = std::max(worst, compression_error(proj, f, a));
        CHECK(std::abs(lambda_coeff(forward(f), a) - lambda_coeff_direct(f, a)) < 1e-10);
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("correlation witness in range(E)", "[uniqueness]") {
    test::Draws draws(63);
    const GridSpec& g = vn_grid();
    const VNProjection proj = make_vn_projection(g);
    const Wavefunction psi1 = vn_range_state(proj, sample_gaussian(g, 1.5, Vec(0.7, 0, 0), Vec(-0.4, 0, 0)));
    const Wavefunction psi2 = vn_range_state(proj, normalize(test::trig_function(draws, g, 5, 5) + vn_vacuum(g)));

    double worst = 0.0, seeds = 0.0;
    for (int i = 0; i < 50; ++i) {
        const GridFunction f = test::trig_function(draws, g, 3, 8);
        const Vec a(draws.uniform(-2, 2), 0, 0), b(draws.uniform(-2, 2), 0, 0);
        const cplx closed = uniqueness_witness(forward(f), a[0], b[0]);
        const cplx f1 = shift_correlation(f, a, b, psi1), f2 = shift_correlation(f, a, b, psi2);
        worst = std::max(worst, std::abs(closed - f1));
        seeds = std::max(seeds, std::abs(f1 - f2));
    }
    CHECK(worst < 1e-6);
    CHECK(seeds < 1e-6);

    const GridFunction f = test::trig_function(draws, g, 3, 8);
    CHECK(std::abs(uniqueness_witness(forward(f), 0.0, 0.0) - lambda_coeff(forward(f), 0.0)) < 1e-15);
    CHECK_THROWS_AS(vn_range_state(proj, normalize(position_apply(0, vn_vacuum(g)))), precondition_error);
}
