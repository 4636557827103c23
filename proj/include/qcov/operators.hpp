#pragma once

#include "qcov/fourier.hpp"

#include <functional>
#include <variant>
#include <vector>

namespace qcov {

/// Element (a, L) of the euclidean group acting as q -> L q + a.
struct EuclideanElement {
    Vec a = Vec::Zero();
    Mat rot = Mat::Identity();

    static EuclideanElement shift(const Vec& a) { return {a, Mat::Identity()}; }
    static EuclideanElement rotation(const Mat& r) { return {Vec::Zero(), r}; }

    /// (b, M)(a, L) = (b + M a, M L).
    friend EuclideanElement operator*(const EuclideanElement& g2, const EuclideanElement& g1) {
        return {g2.a + g2.rot * g1.a, g2.rot * g1.rot};
    }

    EuclideanElement inverse() const {
        const Mat rt = rot.transpose();
        return {-(rt * a), rt};
    }
};

/// f^ psi (q) = f(q) psi(q).
inline Wavefunction multiply(const GridFunction& f, const Wavefunction& psi) {
    require_same_grid(f.grid(), psi.grid(), "multiply");
    return pointwise_product(f, psi);
}

/// U(a) psi (q) = psi(q - a), realized as exp(-i k.a) on the spectrum.
inline Wavefunction shift(const Vec& a, const Wavefunction& psi) {
    const Vec aa = truncate(a, psi.grid().dim());
    if (aa.isZero(0.0)) return psi;
    return apply_fourier_multiplier(psi, [&](const Vec& k) { return std::exp(-I * k.dot(aa)); });
}

/// Circular index shift by whole grid steps: psi(q - steps*dq). Exact cross-check for shift().
inline Wavefunction roll(const std::array<int, 3>& steps, const Wavefunction& psi) {
    const GridSpec& grid = psi.grid();
    Wavefunction out(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto idx = grid.multi_index(i);
        for (int j = 0; j < grid.dim(); ++j) idx[j] -= steps[j];
        out[i] = psi[grid.flat_index(idx)];
    }
    return out;
}

namespace detail {

inline bool is_lattice_symmetry(const Mat& rot, int dim) {
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c)
            if (std::abs(rot(r, c) - std::round(rot(r, c))) > 1e-12) return false;
    return true;
}

/// U(L) psi(q) = psi(L^T q) for a signed axis permutation L: an exact relabeling.
inline Wavefunction permute_lattice(const Mat& rot, const Wavefunction& psi) {
    const GridSpec& grid = psi.grid();
    const int half = grid.points_per_axis() / 2;
    Eigen::Matrix3i rt = Eigen::Matrix3i::Identity();
    for (int r = 0; r < grid.dim(); ++r)
        for (int c = 0; c < grid.dim(); ++c)
            rt(r, c) = static_cast<int>(std::lround(rot(c, r)));
    Wavefunction out(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto idx = grid.multi_index(i);
        Eigen::Vector3i m(idx[0] - half, idx[1] - half, idx[2] - half);
        for (int j = grid.dim(); j < 3; ++j) m[j] = 0;
        const Eigen::Vector3i p = rt * m;
        out[i] = psi[grid.flat_index({p[0] + half, p[1] + half, p[2] + half})];
    }
    return out;
}

/// Rotation by theta in the (i, j) coordinate plane, taking e_i towards e_j.
inline Mat coordinate_plane_rotation(int i, int j, double theta) {
    Mat m = Mat::Identity();
    m(i, i) = std::cos(theta);
    m(i, j) = -std::sin(theta);
    m(j, i) = std::sin(theta);
    m(j, j) = std::cos(theta);
    return m;
}

/// In place: psi(q) <- psi(q - sigma q_by e_along), one spectral 1D shift per line.
inline void shear_inplace(std::vector<cplx>& data, const GridSpec& grid, int along, int by,
                          double sigma) {
    const int n = grid.points_per_axis();
    std::size_t stride = 1;
    for (int j = grid.dim() - 1; j > along; --j) stride *= static_cast<std::size_t>(n);
    const std::vector<int> dims{n};
    std::vector<cplx> line(static_cast<std::size_t>(n));
    std::vector<cplx> phase(static_cast<std::size_t>(n));
    for (std::size_t start = 0; start < grid.size(); ++start) {
        if (grid.axis_index(start, along) != 0) continue;
        const double amount = sigma * grid.coordinate(grid.axis_index(start, by));
        for (int r = 0; r < n; ++r) line[r] = data[start + r * stride];
        dft_inplace(line, dims, Direction::forward);
        for (int r = 0; r < n; ++r)
            line[r] *= std::exp(-I * (raw_to_mode(r, n) * grid.dk() * amount)) / double(n);
        dft_inplace(line, dims, Direction::backward);
        for (int r = 0; r < n; ++r) data[start + r * stride] = line[r];
    }
}

/**
 * Band-limited rotation in the (i, j) plane. Quarter turns are exact
 * relabelings; the residual angle in [-pi/4, pi/4] is done with the
 * three-shear factorization R = X(-tan(t/2)) Y(sin t) X(-tan(t/2)), each
 * shear being a line-by-line spectral shift.
 */
inline Wavefunction rotate_plane(const Wavefunction& psi, int i, int j, double theta) {
    const double quarter = 0.5 * pi;
    const double turns = std::round(theta / quarter);
    const double rest = theta - turns * quarter;
    std::vector<cplx> data = psi.values();
    if (rest != 0.0) {
        const double t = std::tan(0.5 * rest);
        const double s = std::sin(rest);
        shear_inplace(data, psi.grid(), i, j, -t);
        shear_inplace(data, psi.grid(), j, i, s);
        shear_inplace(data, psi.grid(), i, j, -t);
    }
    Wavefunction out(psi.grid(), std::move(data));
    const int q = static_cast<int>(((static_cast<long long>(turns) % 4) + 4) % 4);
    if (q != 0) out = permute_lattice(coordinate_plane_rotation(i, j, q * quarter), out);
    return out;
}

/// Angles with L = Rz(alpha) Ry(beta) Rz(gamma).
struct EulerZYZ {
    double alpha, beta, gamma;
};

inline EulerZYZ euler_zyz(const Mat& m) {
    const double beta = std::acos(std::clamp(m(2, 2), -1.0, 1.0));
    EulerZYZ e{0.0, beta, 0.0};
    if (std::sin(beta) > 1e-8) {
        e.alpha = std::atan2(m(1, 2), m(0, 2));
        e.gamma = std::atan2(m(2, 1), -m(2, 0));
    } else if (m(2, 2) > 0.0) {
        e.alpha = std::atan2(m(1, 0), m(0, 0));
    } else {
        e.alpha = std::atan2(-m(1, 0), -m(0, 0));
    }
    const Mat back = axis_rotation(2, e.alpha) * axis_rotation(1, e.beta) * axis_rotation(2, e.gamma);
    if (!(back - m).isZero(1e-7)) throw internal_error("euler_zyz: reconstruction failed");
    return e;
}

}  // namespace detail

/**
 * U(L) psi (q) = psi(L^{-1} q).
 *
 * Signed axis permutations are applied as exact relabelings. Any other
 * rotation is band-limited resampling (shear factorization, Euler angles in
 * 3D) and is accurate only for states well inside the box and the band.
 */
inline Wavefunction rotate(const Mat& rot, const Wavefunction& psi) {
    const GridSpec& grid = psi.grid();
    require(grid.dim() >= 2, "rotate: rotations need a grid of dimension 2 or 3");
    require_rotation(rot, grid.dim(), "rotate");
    if (detail::is_lattice_symmetry(rot, grid.dim())) return detail::permute_lattice(rot, psi);
    if (grid.dim() == 2) return detail::rotate_plane(psi, 0, 1, std::atan2(rot(1, 0), rot(0, 0)));
    const auto e = detail::euler_zyz(rot);
    Wavefunction out = detail::rotate_plane(psi, 0, 1, e.gamma);
    out = detail::rotate_plane(out, 2, 0, e.beta);
    return detail::rotate_plane(out, 0, 1, e.alpha);
}

inline bool is_identity_rotation(const Mat& rot) { return rot.isIdentity(0.0); }

/// U(a, L) = U(a) U(L): psi(L^{-1}(q - a)).
inline Wavefunction euclid(const EuclideanElement& x, const Wavefunction& psi) {
    if (is_identity_rotation(x.rot)) return shift(x.a, psi);
    return shift(x.a, rotate(x.rot, psi));
}

/// U(x)* psi = U(x^{-1}) psi = psi(L q + a).
inline Wavefunction euclid_adjoint(const EuclideanElement& x, const Wavefunction& psi) {
    return euclid(x.inverse(), psi);
}

/// K_j psi = -i d psi / dq_j, i.e. multiplication by k_j on the spectrum.
inline Wavefunction wavevector_apply(int axis, const Wavefunction& psi) {
    require(axis >= 0 && axis < psi.grid().dim(), "wavevector_apply: axis out of range");
    return apply_fourier_multiplier(psi, [&](const Vec& k) { return cplx(k[axis]); });
}

/// Q_j psi(q) = q_j psi(q) with the principal coordinate q_j in [-L/2, L/2).
inline Wavefunction position_apply(int axis, const Wavefunction& psi) {
    const GridSpec& grid = psi.grid();
    require(axis >= 0 && axis < grid.dim(), "position_apply: axis out of range");
    Wavefunction out(grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
        out[i] = grid.coordinate(grid.axis_index(i, axis)) * psi[i];
    return out;
}

/// Plane wave exp(i k.q) sampled on the grid.
inline GridFunction plane_wave(const GridSpec& grid, const Vec& k) {
    const Vec kk = truncate(k, grid.dim());
    return sample(grid, [&](const Vec& q) { return std::exp(I * kk.dot(q)); });
}

/// W(k, a) = exp(i(k.Q - a.K)) = exp(-i k.a/2) exp(i k.Q) U(a).
inline Wavefunction weyl(const Vec& k, const Vec& a, const Wavefunction& psi) {
    const GridSpec& grid = psi.grid();
    const Vec kk = truncate(k, grid.dim());
    const Vec aa = truncate(a, grid.dim());
    Wavefunction out = multiply(plane_wave(grid, kk), shift(aa, psi));
    return out *= std::exp(-0.5 * I * kk.dot(aa));
}

/// Per-axis ||(i[K_j, Q_j] - 1) psi|| / ||psi||.
inline std::vector<double> ccr_residuals(const Wavefunction& psi) {
    const double n0 = norm(psi);
    require(n0 > 0.0, "ccr_residuals: zero state");
    std::vector<double> out;
    for (int j = 0; j < psi.grid().dim(); ++j) {
        Wavefunction comm = wavevector_apply(j, position_apply(j, psi)) -
                            position_apply(j, wavevector_apply(j, psi));
        comm *= I;
        out.push_back(distance(comm, psi) / n0);
    }
    return out;
}

inline double ccr_residual(const Wavefunction& psi) {
    const auto r = ccr_residuals(psi);
    return *std::max_element(r.begin(), r.end());
}

// ---------------------------------------------------------------------------
// Operator handles

struct LinearOperatorHandle;

namespace op {
struct Multiply { GridFunction f; };
struct Shift { Vec a; };
struct Rotate { Mat rot; };
struct Euclid { EuclideanElement x; };
struct Wavevector { int axis; };
struct Position { int axis; };
struct Weyl { Vec k; Vec a; };
/// Operator product factors[0] * factors[1] * ...; the last factor acts first.
struct Chain { std::vector<LinearOperatorHandle> factors; };
}  // namespace op

/// A value-type description of one of the standard-representation operators.
struct LinearOperatorHandle {
    std::variant<op::Multiply, op::Shift, op::Rotate, op::Euclid, op::Wavevector, op::Position,
                 op::Weyl, op::Chain>
        op;
};

inline Wavefunction apply(const LinearOperatorHandle& h, const Wavefunction& psi) {
    return std::visit(
        [&](const auto& o) -> Wavefunction {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, op::Multiply>) return multiply(o.f, psi);
            else if constexpr (std::is_same_v<T, op::Shift>) return shift(o.a, psi);
            else if constexpr (std::is_same_v<T, op::Rotate>) return rotate(o.rot, psi);
            else if constexpr (std::is_same_v<T, op::Euclid>) return euclid(o.x, psi);
            else if constexpr (std::is_same_v<T, op::Wavevector>) return wavevector_apply(o.axis, psi);
            else if constexpr (std::is_same_v<T, op::Position>) return position_apply(o.axis, psi);
            else if constexpr (std::is_same_v<T, op::Weyl>) return weyl(o.k, o.a, psi);
            else {
                Wavefunction out = psi;
                for (auto it = o.factors.rbegin(); it != o.factors.rend(); ++it) out = apply(*it, out);
                return out;
            }
        },
        h.op);
}

/// True for handles that represent unitary operators.
inline bool is_unitary(const LinearOperatorHandle& h) {
    return std::visit(
        [](const auto& o) -> bool {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, op::Shift> || std::is_same_v<T, op::Rotate> ||
                          std::is_same_v<T, op::Euclid> || std::is_same_v<T, op::Weyl>)
                return true;
            else if constexpr (std::is_same_v<T, op::Chain>) {
                for (const auto& f : o.factors)
                    if (!is_unitary(f)) return false;
                return true;
            } else {
                return false;
            }
        },
        h.op);
}

/// Schroedinger flow psi -> psi_t = V(t)* psi, supplied by the dynamics.
using Evolution = std::function<Wavefunction(double, const Wavefunction&)>;

/// A_t psi with A_t = V(t) A V(t)*.
inline Wavefunction heisenberg_operator_apply(const LinearOperatorHandle& a, double t,
                                              const Wavefunction& psi, const Evolution& evolve) {
    return evolve(-t, apply(a, evolve(t, psi)));
}

/// ||A psi_t - (A_t psi)_t||: agreement of the Schroedinger and Heisenberg pictures.
inline double heisenberg_picture_check(const LinearOperatorHandle& a, const Wavefunction& psi,
                                       double t, const Evolution& evolve) {
    const Wavefunction lhs = apply(a, evolve(t, psi));
    const Wavefunction rhs = evolve(t, heisenberg_operator_apply(a, t, psi, evolve));
    return distance(lhs, rhs);
}

}  // namespace qcov
