#include "support.hpp"

#include <catch_amalgamated.hpp>

using namespace qcov;

namespace {

double mdiff(const Mat2c& a, const Mat2c& b) { return (a - b).cwiseAbs().maxCoeff(); }

Mat2c random_su2(test::Draws& d) {
    Eigen::Vector4d q(d.uniform(-1, 1), d.uniform(-1, 1), d.uniform(-1, 1), d.uniform(-1, 1));
    q.normalize();
    Mat2c u;
    u << cplx(q[0], -q[3]), cplx(-q[2], -q[1]), cplx(q[2], -q[1]), cplx(q[0], q[3]);
    return u;
}

/// The convention of the rotation-group literature used for the examples: Lambda_j(theta) rotates by -theta.
Mat lambda_j(int j, double theta) { return axis_rotation(j - 1, -theta); }

}  // namespace

TEST_CASE("Pauli matrices and M(q)", "[spin]") {
    for (int j = 1; j <= 3; ++j) {
        CHECK(mdiff(pauli(j) * pauli(j), Mat2c::Identity()) == 0.0);
        CHECK(pauli(j).trace() == cplx(0.0));
    }
    CHECK(mdiff(pauli(1) * pauli(2), I * pauli(3)) == 0.0);
    CHECK_THROWS_AS(pauli(0), precondition_error);
    CHECK(mdiff(m_of_q(Vec::UnitZ()), pauli(3)) == 0.0);
    CHECK(m_of_q(Vec::Zero()).isZero(0.0));
    const Mat2c m = m_of_q(Vec(1, 2, 3));
    CHECK(std::abs(m.determinant() + 14.0) < 1e-14);
    CHECK(mdiff(m, m.adjoint()) == 0.0);
}

TEST_CASE("covering map is a 2-to-1 homomorphism onto SO(3)", "[spin]") {
    test::Draws draws(41);
    CHECK((covering_map(Mat2c::Identity()) - Mat::Identity()).norm() == 0.0);
    for (int i = 0; i < 100; ++i) {
        const Mat2c u = random_su2(draws), v = random_su2(draws);
        const Mat r = covering_map(u);
        CHECK(is_rotation(r, 3, 1e-12));
        CHECK(r.determinant() > 0.0);
        CHECK((covering_map(u) * covering_map(v) - covering_map(u * v)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((covering_map(-u) - r).cwiseAbs().maxCoeff() == 0.0);
    }
    // exp(-i (a/2) n.sigma) covers the right-handed rotation by a about n.
    const Vec n = Vec(1, -2, 0.5).normalized();
    CHECK((covering_map(su2_exp(n, 0.7)) - Mat(Eigen::AngleAxisd(0.7, n))).cwiseAbs().maxCoeff() < 1e-14);
    // Hence v(Lambda_3(a)) = +-exp(i (a/2) sigma3).
    const double a = 1.1;
    const Mat2c expected = (std::cos(a / 2) * Mat2c::Identity() + I * std::sin(a / 2) * pauli(3));
    CHECK(mdiff(section(lambda_j(3, a)), expected) < 1e-14);
    Mat2c bad = Mat2c::Identity();
    bad(0, 0) = 2.0;
    CHECK_THROWS_AS(covering_map(bad), precondition_error);
}

TEST_CASE("section: roundtrip, positive trace and tie-break", "[spin]") {
    test::Draws draws(42);
    CHECK(mdiff(section(Mat::Identity()), Mat2c::Identity()) == 0.0);
    CHECK(mdiff(section(lambda_j(3, pi / 2)), std::cos(pi / 4) * Mat2c::Identity() + I * std::sin(pi / 4) * pauli(3)) < 1e-15);
    for (int i = 0; i < 200; ++i) {
        const Mat r = draws.rotation();
        const Mat2c v = section(r);
        CHECK(is_su2(v));
        CHECK((covering_map(v) - r).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(v.trace().real() >= 0.0);
        const Mat2c u = random_su2(draws);
        const Mat2c s = section(covering_map(u));
        CHECK(std::min(mdiff(s, u), mdiff(s, -u)) < 1e-10);
    }
    // Angle pi: both lifts are traceless; the choice is reproducible.
    const Mat2c half = section(axis_rotation(2, pi));
    CHECK(std::abs(half.trace()) < 1e-15);
    CHECK(mdiff(half, section(axis_rotation(2, -pi))) < 1e-12);
    CHECK(half(0, 0).imag() > 0.0);
}

TEST_CASE("multiplier values and cocycle identity", "[spin]") {
    test::Draws draws(43);
    CHECK(multiplier(lambda_j(3, pi), lambda_j(3, pi)) == -1);
    CHECK(multiplier(axis_rotation(2, pi), axis_rotation(2, pi)) == -1);
    for (int i = 0; i < 50; ++i) {
        const Mat r = draws.rotation();
        CHECK(multiplier(Mat::Identity(), r) == 1);
        CHECK(multiplier(r, Mat::Identity()) == 1);
        // Small rotations compose without a sign.
        const Mat s1 = Eigen::AngleAxisd(draws.uniform(0, pi / 4), draws.vec(3, 1).normalized()).toRotationMatrix();
        const Mat s2 = Eigen::AngleAxisd(draws.uniform(0, pi / 4), draws.vec(3, 1).normalized()).toRotationMatrix();
        CHECK(multiplier(s1, s2) == 1);
    }
    int violations = 0, minus = 0;
    for (int i = 0; i < 500; ++i) {
        const Mat a = draws.rotation(), b = draws.rotation(), c = draws.rotation();
        if (multiplier(a, b) * multiplier(a * b, c) != multiplier(b, c) * multiplier(a, b * c)) ++violations;
        if (multiplier(a, b) == -1) ++minus;
    }
    CHECK(violations == 0);
    CHECK(minus > 0);  // the sign is genuinely two-valued
}

TEST_CASE("path lifts classify closed loops", "[spin]") {
    CHECK(mdiff(lift_path({{Mat::Identity(), Mat::Identity()}}), Mat2c::Identity()) == 0.0);
    for (const Vec& axis : {Vec(Vec::UnitX()), Vec(Vec::UnitZ()), Vec(1, 1, 1)}) {
        CHECK(mdiff(lift_path(winding_path(axis, two_pi, 16)), -Mat2c::Identity()) < 1e-10);
        CHECK(mdiff(lift_path(winding_path(axis, 2 * two_pi, 32)), Mat2c::Identity()) < 1e-10);
    }
    CHECK_THROWS_AS(lift_path(winding_path(Vec::UnitZ(), two_pi, 4)), precondition_error);
}

TEST_CASE("spinor rotations: norm, projective law, component phases", "[spin]") {
    test::Draws draws(44);
    const GridSpec g = make_grid(2, 64, 24.0);
    const Wavefunction a = sample_gaussian(g, 1.5, Vec(1, 0.5, 0)), b = sample_gaussian(g, 1.5, Vec(-0.5, 1, 0), Vec(0.3, 0, 0));
    const SpinorField field = make_spinor(cplx(0.6) * a, cplx(0, 0.8) * b);
    CHECK_THROWS_AS(make_spinor(a, b), precondition_error);

    const SpinorField same = spinor_rotate(Mat::Identity(), field);
    CHECK(distance(same.up, field.up) == 0.0);
    for (int i = 0; i < 20; ++i) {
        const Mat r = draws.quarter_turn(), s = draws.quarter_turn();
        const SpinorField lhs = spinor_rotate(r, spinor_rotate(s, field));
        const SpinorField rhs = spinor_rotate(r * s, field);
        const cplx xi(multiplier(r, s));
        CHECK(distance(lhs.up, xi * rhs.up) + distance(lhs.down, xi * rhs.down) < 1e-13);
        CHECK(std::abs(norm(lhs) - 1.0) < 1e-12);
    }
    // Lambda_3(alpha) on |psi, 0>: component 0 picks up exp(i alpha/2) with this section.
    const SpinorField up = make_spinor(a, Wavefunction(g));
    const double alpha = pi / 2;
    const SpinorField rotated = spinor_rotate(lambda_j(3, alpha), up);
    CHECK(distance(rotated.up, std::exp(I * alpha / 2.0) * rotate(lambda_j(3, alpha), a)) < 1e-14);
    CHECK(norm(rotated.down) == 0.0);
}

TEST_CASE("conjugate action turns |psi,psi>/sqrt2 into a pure component", "[spin]") {
    const GridSpec g = make_grid(3, 16, 10.0);
    const Wavefunction psi = normalize(sample(g, [](const Vec& q) { return cplx(std::exp(-0.5 * (q - Vec(1, 0, 0.5)).squaredNorm())); }));
    const SpinorField field = make_spinor(psi * cplx(std::sqrt(0.5)), psi * cplx(std::sqrt(0.5)));
    const Mat l = lambda_j(2, -pi / 2);
    // U(L)* = U(L^{-1}) up to the multiplier, which is +1 here.
    const SpinorField out = spinor_rotate(l.transpose(), field);
    CHECK(distance(out.up, rotate(l.transpose(), psi)) < 1e-14);
    CHECK(norm(out.down) < 1e-14);
}

TEST_CASE("spinor correlations: phases, trace form, expectation", "[spin]") {
    test::Draws draws(45);
    const GridSpec g = make_grid(2, 64, 16.0);
    const Wavefunction base = normalize(sample(g, [](const Vec& q) { return cplx(std::exp(-0.5 * q.squaredNorm())); }));
    const cplx c0(0.6, 0.0), c1(0.0, 0.8);
    const SpinorField field = make_spinor(c0 * base, c1 * base);
    const GridFunction f = sample(g, [](const Vec& q) { return cplx(1.0 + std::exp(-0.25 * q.squaredNorm())); });
    const cplx x00 = inner(field.up, multiply(f, field.up)), x11 = inner(field.down, multiply(f, field.down));

    double worst = 0.0;
    for (const auto& [alpha, beta] : std::vector<std::pair<double, double>>{{0.3, 0.0}, {1.1, -0.4}, {pi / 2, pi}, {2.5, 2.5}}) {
        const cplx value = spinor_correlation_lifted(f, Vec::Zero(), su2_exp(Vec::UnitZ(), alpha), Vec::Zero(),
                                                     su2_exp(Vec::UnitZ(), beta), field);
        const cplx expected = std::exp(0.5 * I * (alpha - beta)) * x00 + std::exp(-0.5 * I * (alpha - beta)) * x11;
        worst = std::max(worst, std::abs(value - expected));
    }
    CHECK(worst < 1e-8);

    // A full turn of one argument flips the sign of the correlation.
    const SpinorField pure = make_spinor(base, Wavefunction(g));
    const cplx at0 = spinor_correlation_lifted(f, Vec::Zero(), Mat2c::Identity(), Vec::Zero(), Mat2c::Identity(), pure);
    const cplx at2pi = spinor_correlation_lifted(f, Vec::Zero(), su2_exp(Vec::UnitZ(), two_pi), Vec::Zero(), Mat2c::Identity(), pure);
    CHECK(std::abs(at2pi + at0) < 1e-8);

    // Trace form equals the explicit component sum for random lattice data.
    const SpinorField mixed = make_spinor(cplx(0.6) * sample_gaussian(g, 1.0, Vec(0.5, 0, 0), Vec(0.2, 0.1, 0)),
                                          cplx(0, 0.8) * sample_gaussian(g, 1.2, Vec(-0.3, 0.4, 0)));
    for (int i = 0; i < 5; ++i) {
        const Vec a = draws.vec(2, 1.0), b = draws.vec(2, 1.0);
        const Mat2c u = su2_exp(Vec::UnitZ(), 0.5 * pi * draws.integer(0, 7));
        const Mat2c w = su2_exp(Vec::UnitZ(), 0.5 * pi * draws.integer(0, 7));
        const GridFunction h = test::trig_function(draws, g, 3, 3);
        const cplx direct = spinor_correlation_lifted(h, a, u, b, w, mixed);
        CHECK(std::abs(direct - spinor_correlation_trace_form(h, a, u, b, w, mixed)) < 1e-12);
    }

    // Expectation: identity elements give the componentwise sum, and a rotated spinor has the same
    // expectation as its spatially rotated components.
    const EuclideanElement e;
    CHECK(std::abs(spinor_correlation(f, e, e, mixed) -
                   (inner(mixed.up, multiply(f, mixed.up)) + inner(mixed.down, multiply(f, mixed.down)))) < 1e-14);
    const Mat r = plane_rotation(pi / 2);
    const SpinorField turned = spinor_rotate(r, mixed);
    const Wavefunction su = rotate(r, mixed.up), sd = rotate(r, mixed.down);
    CHECK(std::abs(spinor_correlation(f, e, e, turned) - (inner(su, multiply(f, su)) + inner(sd, multiply(f, sd)))) < 1e-10);
}
