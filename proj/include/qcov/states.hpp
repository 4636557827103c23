#pragma once

#include "qcov/operators.hpp"

#include <Eigen/Eigenvalues>

#include <functional>
#include <string>
#include <vector>

namespace qcov {

/// <f> = sum f |psi|^2 dq^n.
inline cplx expectation(const GridFunction& f, const Wavefunction& psi) {
    require_same_grid(f.grid(), psi.grid(), "expectation");
    const cplx s = pairwise_sum<cplx>(psi.size(), [&](std::size_t i) {
        return f[i] * std::norm(psi[i]);
    });
    return s * psi.grid().cell_volume();
}

/// <Q_j> for every axis (principal coordinates).
inline Vec mean_position(const Wavefunction& psi) {
    const GridSpec& grid = psi.grid();
    Vec out = Vec::Zero();
    for (int j = 0; j < grid.dim(); ++j) {
        const double s = pairwise_sum<double>(psi.size(), [&](std::size_t i) {
            return grid.coordinate(grid.axis_index(i, j)) * std::norm(psi[i]);
        });
        out[j] = s * grid.cell_volume();
    }
    return out;
}

/// <K_j> = (2 pi)^n sum k_j |psi~(k)|^2 dk^n.
inline Vec mean_wavevector(const Wavefunction& psi) {
    const GridSpec& grid = psi.grid();
    const SpectralFunction t = forward(psi);
    const double w = std::pow(two_pi, grid.dim()) * grid.k_cell_volume();
    Vec out = Vec::Zero();
    for (int j = 0; j < grid.dim(); ++j) {
        const double s = pairwise_sum<double>(t.size(), [&](std::size_t i) {
            return grid.wavenumber(grid.axis_index(i, j)) * std::norm(t[i]);
        });
        out[j] = s * w;
    }
    return out;
}

/// Per-axis position variance <(Q_j - <Q_j>)^2>.
inline Vec position_variance(const Wavefunction& psi) {
    const GridSpec& grid = psi.grid();
    const Vec mean = mean_position(psi);
    Vec out = Vec::Zero();
    for (int j = 0; j < grid.dim(); ++j) {
        const double s = pairwise_sum<double>(psi.size(), [&](std::size_t i) {
            const double d = grid.coordinate(grid.axis_index(i, j)) - mean[j];
            return d * d * std::norm(psi[i]);
        });
        out[j] = s * grid.cell_volume();
    }
    return out;
}

/// Query for F(f, x, y) = <U(y)* psi | f^ | U(x)* psi>.
struct CorrelationQuery {
    GridFunction f;
    EuclideanElement x;
    EuclideanElement y;
};

inline cplx correlation(const CorrelationQuery& query, const Wavefunction& psi) {
    require_same_grid(query.f.grid(), psi.grid(), "correlation");
    const Wavefunction ux = euclid_adjoint(query.x, psi);
    const Wavefunction uy = euclid_adjoint(query.y, psi);
    return inner(uy, multiply(query.f, ux));
}

/// Shift-only correlation F(f, a, b) = int f(q) psi(q + a) conj psi(q + b).
inline cplx shift_correlation(const GridFunction& f, const Vec& a, const Vec& b,
                              const Wavefunction& psi) {
    return correlation({f, EuclideanElement::shift(a), EuclideanElement::shift(b)}, psi);
}

namespace detail {

/// chi(k, q) once the half-shifted copies psi(. + q/2) and psi(. - q/2) are known.
inline cplx characteristic_from_halves(const Wavefunction& plus, const Wavefunction& minus,
                                       const Vec& k) {
    const GridSpec& grid = plus.grid();
    const Vec kk = truncate(k, grid.dim());
    const cplx s = pairwise_sum<cplx>(grid.size(), [&](std::size_t i) {
        return std::exp(I * kk.dot(grid.position(i))) * std::conj(plus[i]) * minus[i];
    });
    return s * grid.cell_volume();
}

/// psi(-q), exact on the lattice (index m -> -m).
inline Wavefunction reflect(const Wavefunction& psi) {
    const GridSpec& grid = psi.grid();
    const int n = grid.points_per_axis();
    Wavefunction out(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto idx = grid.multi_index(i);
        for (int j = 0; j < grid.dim(); ++j) idx[j] = n - idx[j];
        out[i] = psi[grid.flat_index(idx)];
    }
    return out;
}

/// rho(q, k) = 2^n sum_u exp(2i k.u) conj psi(q + u) psi(q - u) dq^n, with
/// plus(u) = psi(q + u) and minus(u) = psi(q - u) already prepared.
inline cplx wigner_from_pair(const Wavefunction& plus, const Wavefunction& minus, const Vec& k) {
    const GridSpec& grid = plus.grid();
    const Vec kk = truncate(k, grid.dim());
    const cplx s = pairwise_sum<cplx>(grid.size(), [&](std::size_t i) {
        return std::exp(2.0 * I * kk.dot(grid.position(i))) * std::conj(plus[i]) * minus[i];
    });
    return s * std::pow(2.0, grid.dim()) * grid.cell_volume();
}

}  // namespace detail

/// chi(k, q) = int dq' exp(i k.q') conj psi(q' + q/2) psi(q' - q/2), via spectral half-shifts.
inline cplx characteristic(const Wavefunction& psi, const Vec& k, const Vec& q) {
    return detail::characteristic_from_halves(shift(-0.5 * q, psi), shift(0.5 * q, psi), k);
}

/// Wigner function including its (ideally zero) imaginary residue.
inline cplx wigner_complex(const Wavefunction& psi, const Vec& q, const Vec& k) {
    return detail::wigner_from_pair(shift(-q, psi), shift(q, detail::reflect(psi)), k);
}

/**
 * rho(q, k) = int dq' exp(i k.q') conj psi(q + q'/2) psi(q - q'/2).
 *
 * Evaluated with the substitution q' = 2u, so only whole-vector spectral
 * shifts by q and a lattice reflection are needed. Valid when the support
 * of psi is narrower than half the box.
 */
inline double wigner(const Wavefunction& psi, const Vec& q, const Vec& k) {
    return wigner_complex(psi, q, k).real();
}

/**
 * Second route to rho: tabulate chi(k', q') on the full (k', q') lattice and
 * apply rho(q,k) = (2 pi)^{-n} sum exp(-i k'.q) exp(i k.q') chi(k', q') dk^n dq^n.
 * Costs one spectral shift pair and one DFT per lattice q', so it is meant
 * for cross-checks on small grids.
 */
inline double wigner_via_characteristic(const Wavefunction& psi, const Vec& q, const Vec& k) {
    const GridSpec& grid = psi.grid();
    require(grid.size() <= 4096, "wigner_via_characteristic: grid too large for the double sum");
    const Vec qq = truncate(q, grid.dim());
    const Vec kk = truncate(k, grid.dim());
    const auto dims = detail::grid_dims(grid);
    std::vector<cplx> terms(grid.size());
    for (std::size_t iq = 0; iq < grid.size(); ++iq) {
        const Vec qp = grid.position(iq);
        const Wavefunction plus = shift(-0.5 * qp, psi);
        const Wavefunction minus = shift(0.5 * qp, psi);
        // chi(k', q') for every lattice k' is a DFT of conj(plus) * minus.
        std::vector<cplx> buf(grid.size());
        for (std::size_t r = 0; r < grid.size(); ++r) buf[r] = std::conj(plus[r]) * minus[r];
        detail::dft_inplace(buf, dims, detail::Direction::backward);
        const cplx inner_sum = pairwise_sum<cplx>(grid.size(), [&](std::size_t r) {
            const double sign = detail::odd_raw_parity(grid, r) ? -1.0 : 1.0;
            const Vec kp = detail::raw_wavevector(grid, r);
            return std::exp(-I * kp.dot(qq)) * sign * buf[r];
        });
        terms[iq] = std::exp(I * kk.dot(qp)) * inner_sum * grid.cell_volume();
    }
    const cplx s = pairwise_sum<cplx>(terms.size(), [&](std::size_t i) { return terms[i]; });
    return (s * std::pow(two_pi, -grid.dim()) * grid.k_cell_volume() * grid.cell_volume()).real();
}

// ---------------------------------------------------------------------------
// Phase-space tables

enum class PhaseSpaceKind { characteristic, wigner };

inline const char* to_string(PhaseSpaceKind kind) {
    return kind == PhaseSpaceKind::characteristic ? "characteristic" : "wigner";
}

/// Sampling plan for a table: a points x points product along one axis.
struct TableSpec {
    int axis = 0;
    int points = 33;
    double k_half_width = 4.0;
    double q_half_width = 4.0;
};

/**
 * Sampled chi(k, q) or rho(q, k) values. For the characteristic kind
 * first = k and second = q; for the Wigner kind first = q and second = k.
 */
struct PhaseSpaceTable {
    PhaseSpaceKind kind;
    GridSpec grid;
    std::vector<Vec> first;
    std::vector<Vec> second;
    std::vector<cplx> values;
};

/// Spans +-4/lambda_eff in k and +-4 lambda_eff in q, lambda_eff being the position spread.
inline TableSpec default_table_spec(const Wavefunction& psi, int axis = 0) {
    require(axis >= 0 && axis < psi.grid().dim(), "default_table_spec: axis out of range");
    const double lambda_eff = std::sqrt(position_variance(psi)[axis]);
    require(lambda_eff > 0.0, "default_table_spec: state has no spread");
    return {axis, 33, 4.0 / lambda_eff, 4.0 * lambda_eff};
}

inline std::vector<double> table_axis(int points, double half_width) {
    std::vector<double> out(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        out[i] = points == 1 ? 0.0 : -half_width + 2.0 * half_width * i / (points - 1);
    return out;
}

inline PhaseSpaceTable characteristic_table(const Wavefunction& psi, const TableSpec& spec) {
    PhaseSpaceTable table{PhaseSpaceKind::characteristic, psi.grid(), {}, {}, {}};
    const auto ks = table_axis(spec.points, spec.k_half_width);
    const auto qs = table_axis(spec.points, spec.q_half_width);
    const Vec e = Vec::Unit(spec.axis);
    std::vector<std::pair<Wavefunction, Wavefunction>> halves;
    halves.reserve(qs.size());
    for (double q : qs) halves.emplace_back(shift(-0.5 * q * e, psi), shift(0.5 * q * e, psi));
    for (double k : ks) {
        for (std::size_t iq = 0; iq < qs.size(); ++iq) {
            table.first.push_back(k * e);
            table.second.push_back(qs[iq] * e);
            table.values.push_back(
                detail::characteristic_from_halves(halves[iq].first, halves[iq].second, k * e));
        }
    }
    return table;
}

inline PhaseSpaceTable wigner_table(const Wavefunction& psi, const TableSpec& spec) {
    PhaseSpaceTable table{PhaseSpaceKind::wigner, psi.grid(), {}, {}, {}};
    const auto ks = table_axis(spec.points, spec.k_half_width);
    const auto qs = table_axis(spec.points, spec.q_half_width);
    const Vec e = Vec::Unit(spec.axis);
    const Wavefunction reflected = detail::reflect(psi);
    for (double q : qs) {
        const Wavefunction plus = shift(-q * e, psi);
        const Wavefunction minus = shift(q * e, reflected);
        for (double k : ks) {
            table.first.push_back(q * e);
            table.second.push_back(k * e);
            table.values.push_back(detail::wigner_from_pair(plus, minus, k * e));
        }
    }
    return table;
}

// ---------------------------------------------------------------------------
// Twisted positive-definiteness

using CharacteristicFn = std::function<cplx(const Vec& k, const Vec& q)>;
using PhasePoint = std::pair<Vec, Vec>;  // (k_j, q_j)

/// A_{jj'} = exp(i(k_j.q_j' - k_j'.q_j)/2) chi(k_j' - k_j, q_j' - q_j).
inline Eigen::MatrixXcd twisted_matrix(const CharacteristicFn& chi,
                                       const std::vector<PhasePoint>& points) {
    const auto m = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXcd a(m, m);
    for (Eigen::Index r = 0; r < m; ++r) {
        for (Eigen::Index c = 0; c < m; ++c) {
            const auto& [kr, qr] = points[r];
            const auto& [kc, qc] = points[c];
            a(r, c) = std::exp(0.5 * I * (kr.dot(qc) - kc.dot(qr))) * chi(kc - kr, qc - qr);
        }
    }
    return a;
}

/// Minimum eigenvalue of the twisted matrix; negative values expose a non-realizable chi.
inline double twisted_posdef_min_eig(const CharacteristicFn& chi,
                                     const std::vector<PhasePoint>& points) {
    require(!points.empty() && points.size() <= 64,
            "twisted_posdef_min_eig: between 1 and 64 points required");
    const Eigen::MatrixXcd a = twisted_matrix(chi, points);
    const double asym = (a - a.adjoint()).cwiseAbs().maxCoeff();
    require(asym <= 1e-10, "twisted_posdef_min_eig: matrix is not Hermitian, chi is inconsistent");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(0.5 * (a + a.adjoint()),
                                                           Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

// ---------------------------------------------------------------------------
// Reconstructions from shift-only correlations

/// The Gaussian probe g(q) = (2 pi)^{-n/2} exp(-|q|^2/2), with g~(k) = (2 pi)^{-n} exp(-|k|^2/2).
inline GridFunction probe_gaussian(const GridSpec& grid) {
    const double amp = std::pow(two_pi, -0.5 * grid.dim());
    return sample(grid, [&](const Vec& q) { return cplx(amp * std::exp(-0.5 * q.squaredNorm())); });
}

/// Source of shift correlations F(g, a, b) for the fixed probe g.
using ShiftCorrelationOracle = std::function<cplx(const Vec& a, const Vec& b)>;

inline constexpr double chi_inversion_k_budget = 4.0;

/**
 * chi(k, d) = exp(|k|^2/2) int dc exp(i c.k) F(g, c - d/2, c + d/2).
 *
 * The c integral runs over the grid lattice. The exp(|k|^2/2) factor
 * amplifies quadrature noise, so |k| is capped at 4.
 */
inline cplx chi_from_correlations(const ShiftCorrelationOracle& oracle, const GridSpec& grid,
                                  const Vec& k, const Vec& d) {
    const Vec kk = truncate(k, grid.dim());
    const Vec dd = truncate(d, grid.dim());
    if (kk.norm() > chi_inversion_k_budget)
        throw precondition_error("chi_from_correlations: |k| = " + std::to_string(kk.norm()) +
                                 " exceeds the amplification budget |k| <= 4");
    const cplx s = pairwise_sum<cplx>(grid.size(), [&](std::size_t i) {
        const Vec c = grid.position(i);
        return std::exp(I * c.dot(kk)) * oracle(c - 0.5 * dd, c + 0.5 * dd);
    });
    return std::exp(0.5 * kk.squaredNorm()) * s * grid.cell_volume();
}

/// Row generator: all F(g, a', b') over the lattice b' for the lattice shift a' (flat index).
using ShiftCorrelationRows = std::function<std::vector<cplx>(std::size_t a_index)>;

/**
 * Shift correlations on the lattice computed by cross-correlation:
 * F(g, a', b') = sum_q phi(q) conj psi(q + b') dq^n with phi = g psi(. + a').
 * Output rows are indexed by the centered flat index of b'.
 */
inline ShiftCorrelationRows shift_correlation_rows(const GridFunction& g, const Wavefunction& psi) {
    require_same_grid(g.grid(), psi.grid(), "shift_correlation_rows");
    const GridSpec grid = psi.grid();
    const auto dims = detail::grid_dims(grid);
    std::vector<cplx> psi_hat = psi.values();
    detail::dft_inplace(psi_hat, dims, detail::Direction::forward);
    return [grid, dims, g, psi, psi_hat](std::size_t a_index) {
        const auto ia = grid.multi_index(a_index);
        const int half = grid.points_per_axis() / 2;
        std::array<int, 3> back{0, 0, 0};
        for (int j = 0; j < grid.dim(); ++j) back[j] = -(ia[j] - half);
        const Wavefunction moved = roll(back, psi);  // psi(q + a')
        std::vector<cplx> buf(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) buf[i] = g[i] * moved[i];
        detail::dft_inplace(buf, dims, detail::Direction::forward);
        for (std::size_t r = 0; r < buf.size(); ++r) buf[r] *= std::conj(psi_hat[r]);
        detail::dft_inplace(buf, dims, detail::Direction::forward);
        // buf[m mod N] now holds N^n * sum_q phi(q) conj psi(q + m dq).
        const double scale = grid.cell_volume() / static_cast<double>(grid.size());
        std::vector<cplx> row(grid.size());
        for (std::size_t r = 0; r < buf.size(); ++r)
            row[detail::raw_to_centered(grid, r)] = scale * buf[r];
        return row;
    };
}

/**
 * F(f, (a, L), (b, M)) rebuilt from shift-only correlations with the probe g:
 *
 *   (2 pi)^{-n} sum_{k,k'} exp(i k.a - i k'.b) f~(M^T k' - L^T k) P(k, k') dk^{2n},
 *   P(k, k') = exp(|k' - k|^2/2) sum_{a',b'} exp(-i k.a' + i k'.b') F(g, a', b') dq^{2n},
 *
 * where P(k, k') = (2 pi)^{2n} psi~(k) conj psi~(k') once the probe's
 * spectrum has been divided out. The k, k' sums are cut at |k| <= k_cut because the
 * exp(|k' - k|^2/2) factor amplifies rounding noise; the state must carry
 * negligible spectral weight beyond k_cut.
 */
inline cplx rotation_correlation_reduction(const GridFunction& f, const EuclideanElement& x,
                                           const EuclideanElement& y,
                                           const ShiftCorrelationRows& rows, double k_cut = 3.0) {
    const GridSpec& grid = f.grid();
    require(grid.dim() <= 2 && grid.size() <= 16384,
            "rotation_correlation_reduction: only 1D/2D grids up to 16384 points");
    require(k_cut > 0.0 && 2.0 * k_cut * k_cut <= 40.0,
            "rotation_correlation_reduction: k_cut must keep exp(|k-k'|^2/2) below e^20");
    const auto dims = detail::grid_dims(grid);
    const std::size_t size = grid.size();

    std::vector<std::size_t> disk;  // centered flat indices with |k| <= k_cut
    for (std::size_t i = 0; i < size; ++i)
        if (grid.wavevector(i).norm() <= k_cut) disk.push_back(i);
    const std::size_t nd = disk.size();

    // raw index of each centered index: centered i <-> mode m = i - N/2 <-> raw m mod N.
    auto centered_to_raw = [&](std::size_t c) {
        auto idx = grid.multi_index(c);
        for (int j = 0; j < grid.dim(); ++j) idx[j] -= grid.points_per_axis() / 2;
        return grid.flat_index(idx);
    };

    // H[d][a'] = sum_b' exp(i k'_d.b') F(g, a', b').
    std::vector<cplx> h(nd * size);
    std::vector<cplx> buf(size);
    for (std::size_t ia = 0; ia < size; ++ia) {
        const std::vector<cplx> row = rows(ia);
        for (std::size_t c = 0; c < size; ++c) buf[centered_to_raw(c)] = row[c];
        detail::dft_inplace(buf, dims, detail::Direction::backward);
        for (std::size_t d = 0; d < nd; ++d) h[d * size + ia] = buf[centered_to_raw(disk[d])];
    }

    // P(k_e, k'_d) = exp(|k'-k|^2/2) dq^{2n} sum_a' exp(-i k.a') H[d][a'].
    const double dq2 = grid.cell_volume() * grid.cell_volume();
    Eigen::MatrixXcd p(static_cast<Eigen::Index>(nd), static_cast<Eigen::Index>(nd));
    for (std::size_t d = 0; d < nd; ++d) {
        for (std::size_t c = 0; c < size; ++c) buf[centered_to_raw(c)] = h[d * size + c];
        detail::dft_inplace(buf, dims, detail::Direction::forward);
        const Vec kp = grid.wavevector(disk[d]);
        for (std::size_t e = 0; e < nd; ++e) {
            const Vec k = grid.wavevector(disk[e]);
            p(e, d) = std::exp(0.5 * (kp - k).squaredNorm()) * dq2 * buf[centered_to_raw(disk[e])];
        }
    }

    // f~ on the rotated arguments: lattice lookup for signed permutations, direct sum otherwise.
    const bool lattice = grid.dim() == 1 || (detail::is_lattice_symmetry(x.rot, grid.dim()) &&
                                              detail::is_lattice_symmetry(y.rot, grid.dim()));
    const SpectralFunction ft = forward(f);
    const int half = grid.points_per_axis() / 2;
    auto f_tilde = [&](const Vec& kv) -> cplx {
        if (!lattice) return spectral_value_at(f, kv);
        std::array<int, 3> idx{0, 0, 0};
        for (int j = 0; j < grid.dim(); ++j)
            idx[j] = static_cast<int>(std::lround(kv[j] / grid.dk())) + half;
        return ft[grid.flat_index(idx)];
    };

    const Mat lt = x.rot.transpose();
    const Mat mt = y.rot.transpose();
    const cplx s = pairwise_sum<cplx>(nd * nd, [&](std::size_t ij) {
        const std::size_t e = ij / nd;
        const std::size_t d = ij % nd;
        const Vec k = grid.wavevector(disk[e]);
        const Vec kp = grid.wavevector(disk[d]);
        return std::exp(I * (k.dot(x.a) - kp.dot(y.a))) * f_tilde(mt * kp - lt * k) *
               p(static_cast<Eigen::Index>(e), static_cast<Eigen::Index>(d));
    });
    const double dk2 = grid.k_cell_volume() * grid.k_cell_volume();
    return s * dk2 * std::pow(two_pi, -grid.dim());
}

}  // namespace qcov
