#pragma once

#include "qcov/states.hpp"

#include <array>
#include <vector>

namespace qcov {

using Mat2c = Eigen::Matrix2cd;

/// Pauli matrix sigma_j, j in {1, 2, 3}.
inline Mat2c pauli(int j) {
    Mat2c s;
    switch (j) {
        case 1: s << 0.0, 1.0, 1.0, 0.0; break;
        case 2: s << 0.0, -I, I, 0.0; break;
        case 3: s << 1.0, 0.0, 0.0, -1.0; break;
        default: throw precondition_error("pauli: index must be 1, 2 or 3");
    }
    return s;
}

/// M(q) = q1 sigma1 + q2 sigma2 + q3 sigma3.
inline Mat2c m_of_q(const Vec& q) {
    return q[0] * pauli(1) + q[1] * pauli(2) + q[2] * pauli(3);
}

inline bool is_su2(const Mat2c& u, double tol = 1e-12) {
    return (u.adjoint() * u - Mat2c::Identity()).cwiseAbs().maxCoeff() <= tol &&
           std::abs(u.determinant() - 1.0) <= tol;
}

/// exp(-i (theta/2) n.sigma) for a unit axis n.
inline Mat2c su2_exp(const Vec& axis, double theta) {
    const Vec n = axis.normalized();
    return std::cos(0.5 * theta) * Mat2c::Identity() - I * std::sin(0.5 * theta) * m_of_q(n);
}

/**
 * Xi(u) defined by u M(q) u* = M(Xi(u) q); column j is read off from
 * (1/2) tr(sigma_i u sigma_j u*).
 *
 * With this definition Xi(exp(-i (a/2) sigma3)) is the right-handed rotation
 * by +a about axis 3, so exp(+i (a/2) sigma3) covers the rotation by -a.
 */
inline Mat covering_map(const Mat2c& u) {
    require(is_su2(u, 1e-10), "covering_map: input is not in SU(2)");
    Mat r;
    for (int j = 0; j < 3; ++j) {
        const Mat2c conj_j = u * pauli(j + 1) * u.adjoint();
        for (int i = 0; i < 3; ++i) r(i, j) = 0.5 * (pauli(i + 1) * conj_j).trace().real();
    }
    return r;
}

namespace detail {

/// Unit quaternion (w, x, y, z) of a rotation matrix (Shepperd's method), w >= 0.
inline Eigen::Vector4d rotation_quaternion(const Mat& m) {
    const Eigen::Quaterniond q(m);
    Eigen::Vector4d out(q.w(), q.x(), q.y(), q.z());
    if (out[0] < 0.0) out = -out;
    return out / out.norm();
}

/// Flips u to the tie-break representative used at rotation angle pi.
inline Mat2c tie_break(const Mat2c& u) {
    const std::array<cplx, 4> entries{u(0, 0), u(0, 1), u(1, 0), u(1, 1)};
    for (const cplx& e : entries) {
        if (std::abs(e) <= 1e-12) continue;
        if (std::abs(e.real()) > 1e-12) return e.real() > 0.0 ? u : Mat2c(-u);
        return e.imag() > 0.0 ? u : Mat2c(-u);
    }
    throw internal_error("tie_break: zero matrix");
}

}  // namespace detail

/**
 * The section v(L): the SU(2) lift of L with positive trace.
 *
 * At rotation angle pi both lifts are traceless; the one whose first
 * nonzero entry (reading order) has positive real part, or else positive
 * imaginary part, is chosen so that the result is reproducible.
 */
inline Mat2c section(const Mat& rot) {
    require_rotation(rot, 3, "section");
    const Eigen::Vector4d q = detail::rotation_quaternion(rot);
    const double w = q[0], x = q[1], y = q[2], z = q[3];
    // u = w - i (x sigma1 + y sigma2 + z sigma3) covers the right-handed rotation.
    Mat2c u;
    u << cplx(w, -z), cplx(-y, -x), cplx(y, -x), cplx(w, z);
    if (w <= 1e-12) u = detail::tie_break(u);
    return u;
}

/// xi(L, L') with v(L) v(L') = xi v(L L'); always +1 or -1.
inline int multiplier(const Mat& l1, const Mat& l2) {
    const Mat2c s = section(l1) * section(l2) * section(l1 * l2).adjoint();
    if ((s - Mat2c::Identity()).cwiseAbs().maxCoeff() <= 1e-10) return 1;
    if ((s + Mat2c::Identity()).cwiseAbs().maxCoeff() <= 1e-10) return -1;
    throw internal_error("multiplier: v(L)v(L')v(LL')* is not +-I");
}

/// Geodesic angle between two rotations.
inline double rotation_distance(const Mat& a, const Mat& b) {
    const double c = 0.5 * ((a.transpose() * b).trace() - 1.0);
    return std::acos(std::clamp(c, -1.0, 1.0));
}

/// A discretized path in SO(3) that starts at the identity and moves less than pi/2 per step.
struct RotationPath {
    std::vector<Mat> steps;
};

/// Path winding `total_angle` about `axis` in `steps` equal increments (steps + 1 matrices).
inline RotationPath winding_path(const Vec& axis, double total_angle, int steps) {
    require(steps >= 1, "winding_path: need at least one step");
    RotationPath path;
    for (int i = 0; i <= steps; ++i)
        path.steps.push_back(Eigen::AngleAxisd(total_angle * i / steps, axis.normalized()).toRotationMatrix());
    return path;
}

/// Continuity lift of a path: each step picks the lift of +-section nearest the previous one.
inline Mat2c lift_path(const RotationPath& path) {
    require(!path.steps.empty(), "lift_path: empty path");
    require(path.steps.front().isIdentity(1e-12), "lift_path: path must start at the identity");
    Mat2c u = Mat2c::Identity();
    for (std::size_t i = 1; i < path.steps.size(); ++i) {
        if (rotation_distance(path.steps[i - 1], path.steps[i]) >= 0.5 * pi)
            throw precondition_error("lift_path: step of pi/2 or more makes the lift ambiguous");
        const Mat2c v = section(path.steps[i]);
        u = (u.adjoint() * v).trace().real() >= 0.0 ? v : Mat2c(-v);
    }
    return u;
}

// ---------------------------------------------------------------------------
// Spinor fields

struct SpinorField {
    Wavefunction up;
    Wavefunction down;
};

inline SpinorField make_spinor(Wavefunction up, Wavefunction down) {
    require_same_grid(up.grid(), down.grid(), "make_spinor");
    const double n2 = std::pow(norm(up), 2) + std::pow(norm(down), 2);
    require(std::abs(n2 - 1.0) <= 1e-10, "make_spinor: components are not jointly normalized");
    return {std::move(up), std::move(down)};
}

inline cplx inner(const SpinorField& a, const SpinorField& b) {
    return inner(a.up, b.up) + inner(a.down, b.down);
}

inline double norm(const SpinorField& s) { return std::sqrt(std::abs(inner(s, s))); }

/// Spatial part of a rotation: identity or the 3D grid rotation.
inline Wavefunction spatial_rotate(const Mat& rot, const Wavefunction& psi) {
    return is_identity_rotation(rot) ? psi : rotate(rot, psi);
}

/// U(u) Psi with an explicit lift u: components mix by u, spatial parts rotate by Xi(u).
inline SpinorField spinor_rotate_lifted(const Mat2c& u, const SpinorField& field) {
    const Mat rot = covering_map(u);
    const Wavefunction a = spatial_rotate(rot, field.up);
    const Wavefunction b = spatial_rotate(rot, field.down);
    return {u(0, 0) * a + u(0, 1) * b, u(1, 0) * a + u(1, 1) * b};
}

/// U(L) Psi = (v00 U(L) psi0 + v01 U(L) psi1, v10 U(L) psi0 + v11 U(L) psi1) with v = section(L).
inline SpinorField spinor_rotate(const Mat& rot, const SpinorField& field) {
    return spinor_rotate_lifted(section(rot), field);
}

inline SpinorField spinor_shift(const Vec& a, const SpinorField& field) {
    return {shift(a, field.up), shift(a, field.down)};
}

/// U(a, L) = U(a) U(L).
inline SpinorField spinor_euclid(const EuclideanElement& x, const SpinorField& field) {
    return spinor_shift(x.a, spinor_rotate(x.rot, field));
}

/// U(a, u)* Psi = U(u)* U(a)* Psi for an explicit lift u.
inline SpinorField spinor_euclid_adjoint_lifted(const Vec& a, const Mat2c& u,
                                                const SpinorField& field) {
    return spinor_rotate_lifted(u.adjoint(), spinor_shift(-a, field));
}

/// F(f, (a, u), (b, w)) = <U(b, w)* Psi | f^ | U(a, u)* Psi> with explicit lifts u, w.
inline cplx spinor_correlation_lifted(const GridFunction& f, const Vec& a, const Mat2c& u,
                                      const Vec& b, const Mat2c& w, const SpinorField& field) {
    const SpinorField x = spinor_euclid_adjoint_lifted(a, u, field);
    const SpinorField y = spinor_euclid_adjoint_lifted(b, w, field);
    return inner(y.up, multiply(f, x.up)) + inner(y.down, multiply(f, x.down));
}

/// F(f, (a, L), (b, M)) for the spinor representation built on the section.
inline cplx spinor_correlation(const GridFunction& f, const EuclideanElement& x,
                               const EuclideanElement& y, const SpinorField& field) {
    return spinor_correlation_lifted(f, x.a, section(x.rot), y.a, section(y.rot), field);
}

/**
 * Trace form of the same quantity, tr(v(L)* X v(M)), where
 * X_{ji} = <U(b, M)* psi_i | f^ | U(a, L)* psi_j> collects scalar
 * correlations. This separates the projective phases (u, w) from the
 * spatial data X.
 */
inline cplx spinor_correlation_trace_form(const GridFunction& f, const Vec& a, const Mat2c& u,
                                          const Vec& b, const Mat2c& w, const SpinorField& field) {
    const EuclideanElement x{a, covering_map(u)};
    const EuclideanElement y{b, covering_map(w)};
    const std::array<const Wavefunction*, 2> comps{&field.up, &field.down};
    Mat2c xm;
    for (int i = 0; i < 2; ++i) {
        const Wavefunction yi = euclid_adjoint(y, *comps[i]);
        for (int j = 0; j < 2; ++j)
            xm(j, i) = inner(yi, multiply(f, euclid_adjoint(x, *comps[j])));
    }
    return (u.adjoint() * xm * w).trace();
}

}  // namespace qcov
