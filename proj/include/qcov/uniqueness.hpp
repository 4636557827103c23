#pragma once

#include "qcov/operators.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace qcov {

/**
 * Gaussian-smeared projection E on a 1D grid.
 *
 *   E psi(q) = int da exp(-a^2/4) G_a(q) psi(q - a),   G_a(q) = pi^{-1/2} exp(-(q - a/2)^2),
 *
 * which collapses to |Omega><Omega| with Omega(q) = pi^{-1/4} exp(-q^2/2).
 * The a-integral is a lattice sum with spacing dq truncated at |a| <= a_max;
 * the dropped weight is below exp(-a_max^2/4) (about 2e-16 for a_max = 12).
 */
struct VNProjection {
    GridSpec grid;
    std::vector<int> steps;       ///< a = steps[s] * dq
    std::vector<double> weights;  ///< dq * exp(-a^2/4)
    double a_max;

    double shift_of(std::size_t s) const { return steps[s] * grid.dq(); }
};

inline constexpr int vn_max_points = 1024;

inline VNProjection make_vn_projection(const GridSpec& grid, double a_max = 12.0) {
    require(grid.dim() == 1, "make_vn_projection: the projection is built on 1D grids");
    require(grid.points_per_axis() <= vn_max_points, "make_vn_projection: N exceeds 1024");
    require(a_max > 0.0 && a_max <= 0.5 * grid.box_length(),
            "make_vn_projection: a_max must lie in (0, L/2]");
    VNProjection proj{grid, {}, {}, a_max};
    const int half = grid.points_per_axis() / 2;
    for (int s = -half; s < half; ++s) {
        const double a = s * grid.dq();
        if (std::abs(a) > a_max) continue;
        proj.steps.push_back(s);
        proj.weights.push_back(grid.dq() * std::exp(-0.25 * a * a));
    }
    return proj;
}

/// Upper bound on the mass of exp(-a^2/4) outside |a| <= a_max.
inline double vn_truncation_bound(const VNProjection& proj) {
    return 2.0 * std::sqrt(pi) * std::erfc(0.5 * proj.a_max);
}

namespace detail {

inline double vn_smearing(double q, double a) {
    const double x = q - 0.5 * a;
    return std::exp(-x * x) / std::sqrt(pi);
}

/// Weyl-integral kernel (2 pi)^{-1} sum_k dk exp(-k^2/4) exp(i k x): a periodized smearing Gaussian.
inline double weyl_kernel(const GridSpec& grid, double x) {
    const int n = grid.points_per_axis();
    const double s = pairwise_sum<double>(static_cast<std::size_t>(n), [&](std::size_t i) {
        const double k = grid.wavenumber(static_cast<int>(i));
        return std::exp(-0.25 * k * k) * std::cos(k * x);
    });
    return s * grid.dk() / two_pi;
}

template <class Kernel>
Wavefunction vn_apply_with(const VNProjection& proj, const Wavefunction& psi, const Kernel& kernel) {
    require_same_grid(proj.grid, psi.grid(), "vn_apply");
    const GridSpec& grid = proj.grid;
    const int n = grid.points_per_axis();
    Wavefunction out(grid);
    for (int i = 0; i < n; ++i) {
        out[i] = pairwise_sum<cplx>(proj.steps.size(), [&](std::size_t s) {
            const int src = ((i - proj.steps[s]) % n + n) % n;
            return proj.weights[s] * kernel(i, s) * psi[src];
        });
    }
    return out;
}

}  // namespace detail

/// E psi via the smearing form.
inline Wavefunction vn_apply(const VNProjection& proj, const Wavefunction& psi) {
    return detail::vn_apply_with(proj, psi, [&](int i, std::size_t s) {
        return detail::vn_smearing(proj.grid.coordinate(i), proj.shift_of(s));
    });
}

/// E psi via (2 pi)^{-1} int da int dk exp(-a^2/4 - k^2/4) W(k, a), with the k-integral done numerically.
inline Wavefunction vn_apply_weyl(const VNProjection& proj, const Wavefunction& psi) {
    return detail::vn_apply_with(proj, psi, [&](int i, std::size_t s) {
        return detail::weyl_kernel(proj.grid, proj.grid.coordinate(i) - 0.5 * proj.shift_of(s));
    });
}

/// The vacuum Omega(q) = pi^{-1/4} exp(-q^2/2) spanning range(E).
inline Wavefunction vn_vacuum(const GridSpec& grid) {
    return sample(grid, [](const Vec& q) { return cplx(std::pow(pi, -0.25) * std::exp(-0.5 * q[0] * q[0])); });
}

// ---------------------------------------------------------------------------
// Dense matrices (verification path)

using DenseOperator = Eigen::MatrixXcd;

/// Matrix of a linear map in the lattice basis (uniform weights, so adjoints are conjugate transposes).
inline DenseOperator dense_operator(const GridSpec& grid,
                                    const std::function<Wavefunction(const Wavefunction&)>& op) {
    const auto n = static_cast<Eigen::Index>(grid.size());
    DenseOperator m(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        Wavefunction e(grid);
        e[static_cast<std::size_t>(j)] = 1.0;
        const Wavefunction col = op(e);
        for (Eigen::Index i = 0; i < n; ++i) m(i, j) = col[static_cast<std::size_t>(i)];
    }
    return m;
}

inline DenseOperator vn_matrix(const VNProjection& proj) {
    const GridSpec& grid = proj.grid;
    const int n = grid.points_per_axis();
    DenseOperator m = DenseOperator::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (std::size_t s = 0; s < proj.steps.size(); ++s) {
            const int j = ((i - proj.steps[s]) % n + n) % n;
            m(i, j) += proj.weights[s] * detail::vn_smearing(grid.coordinate(i), proj.shift_of(s));
        }
    return m;
}

inline DenseOperator vn_matrix_weyl(const VNProjection& proj) {
    const GridSpec& grid = proj.grid;
    const int n = grid.points_per_axis();
    DenseOperator m = DenseOperator::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (std::size_t s = 0; s < proj.steps.size(); ++s) {
            const int j = ((i - proj.steps[s]) % n + n) % n;
            m(i, j) += proj.weights[s] *
                       detail::weyl_kernel(grid, grid.coordinate(i) - 0.5 * proj.shift_of(s));
        }
    return m;
}

inline DenseOperator multiplication_matrix(const GridFunction& f) {
    const auto n = static_cast<Eigen::Index>(f.size());
    DenseOperator m = DenseOperator::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) m(i, i) = f[static_cast<std::size_t>(i)];
    return m;
}

inline DenseOperator shift_matrix(const GridSpec& grid, double a) {
    return dense_operator(grid, [&](const Wavefunction& psi) { return shift(Vec(a, 0, 0), psi); });
}

inline double operator_norm(const DenseOperator& m) {
    return Eigen::JacobiSVD<DenseOperator>(m).singularValues()(0);
}

struct VNDenseReport {
    double idempotency;  ///< ||E^2 - E||
    double symmetry;     ///< ||E - E*||
    double rank_gap;     ///< sigma_2 / sigma_1
    double weyl_agreement;  ///< ||E_smearing - E_weyl||
};

inline VNDenseReport vn_dense_checks(const VNProjection& proj) {
    const DenseOperator e = vn_matrix(proj);
    const auto sv = Eigen::JacobiSVD<DenseOperator>(e).singularValues();
    return {operator_norm(e * e - e), operator_norm(e - e.adjoint()), sv(1) / sv(0),
            operator_norm(e - vn_matrix_weyl(proj))};
}

// ---------------------------------------------------------------------------
// Compression coefficient and correlation witness

/**
 * lambda(f, a) = exp(-a^2/4) sum_k f~(k) exp(-k^2/4) exp(i k a/2) dk,
 * defined by E f^ U(a) E = lambda(f, a) E. The phase exp(i k a/2) comes from
 * the smearing centre q = a/2 and is absent only at a = 0.
 */
inline cplx lambda_coeff(const SpectralFunction& f_tilde, double a) {
    const GridSpec& grid = f_tilde.grid();
    require(grid.dim() == 1, "lambda_coeff: 1D only");
    const cplx s = pairwise_sum<cplx>(grid.size(), [&](std::size_t i) {
        const double k = grid.wavevector(i)[0];
        return f_tilde[i] * std::exp(-0.25 * k * k) * std::exp(0.5 * I * k * a);
    });
    return std::exp(-0.25 * a * a) * s * grid.dk();
}

/// Position-space quadrature of the same coefficient: exp(-a^2/4) pi^{-1/2} int f(q) exp(-(q - a/2)^2) dq.
inline cplx lambda_coeff_direct(const GridFunction& f, double a) {
    const GridSpec& grid = f.grid();
    require(grid.dim() == 1, "lambda_coeff_direct: 1D only");
    const cplx s = pairwise_sum<cplx>(grid.size(), [&](std::size_t i) {
        return f[i] * detail::vn_smearing(grid.position(i)[0], a);
    });
    return std::exp(-0.25 * a * a) * s * grid.dq();
}

/// ||E f^ U(a) E - lambda(f, a) E|| in operator norm, from dense matrices.
inline double compression_error(const VNProjection& proj, const GridFunction& f, double a) {
    const DenseOperator e = vn_matrix(proj);
    const DenseOperator lhs = e * multiplication_matrix(f) * shift_matrix(proj.grid, a) * e;
    return operator_norm(lhs - lambda_coeff(forward(f), a) * e);
}

/// Normalized E phi; throws when the seed has (numerically) no overlap with range(E).
inline Wavefunction vn_range_state(const VNProjection& proj, const Wavefunction& seed) {
    const Wavefunction e = vn_apply(proj, seed);
    if (norm(e) < 1e-8) throw precondition_error("vn_range_state: ||E phi|| < 1e-8, bad seed");
    return normalize(e);
}

/**
 * Closed form of F(f, a, b) = <U(b)* psi | f^ | U(a)* psi> for psi in range(E):
 * lambda(f_b, b - a) with f_b(q) = f(q - b), i.e. f~_b(k) = f~(k) exp(-i k b).
 * Pure shifts commute, so the Weyl composition phase is 1 here.
 */
inline cplx uniqueness_witness(const SpectralFunction& f_tilde, double a, double b) {
    SpectralFunction shifted = f_tilde;
    for (std::size_t i = 0; i < shifted.size(); ++i)
        shifted[i] *= std::exp(-I * f_tilde.grid().wavevector(i)[0] * b);
    return lambda_coeff(shifted, b - a);
}

}  // namespace qcov
