#pragma once

#include "qcov/fft.hpp"

#include <Eigen/Dense>

#include <vector>

namespace qcov {

/// N equally spaced angles alpha_j = 2 pi j / N on [0, 2 pi).
class CircleGrid {
public:
    explicit CircleGrid(int points) : n_(points) {
        require(points >= 4 && (points & (points - 1)) == 0,
                "CircleGrid: point count must be a power of two >= 4");
    }

    int size() const { return n_; }
    double spacing() const { return two_pi / n_; }
    double angle(int j) const { return j * spacing(); }

    /// Fourier mode of raw DFT index r, in (-N/2, N/2]; the Nyquist index maps to +N/2.
    int mode(int r) const { return r <= n_ / 2 ? r : r - n_; }

    bool operator==(const CircleGrid& other) const { return n_ == other.n_; }

private:
    int n_;
};

struct CircleWavefunction {
    CircleGrid grid;
    std::vector<cplx> values;

    explicit CircleWavefunction(const CircleGrid& g) : grid(g), values(static_cast<std::size_t>(g.size())) {}
};

template <class Fn>
CircleWavefunction sample_circle(const CircleGrid& grid, const Fn& fn) {
    CircleWavefunction out(grid);
    for (int j = 0; j < grid.size(); ++j) out.values[j] = fn(grid.angle(j));
    return out;
}

inline cplx inner(const CircleWavefunction& phi, const CircleWavefunction& psi) {
    require(phi.grid == psi.grid, "inner: circle grids differ");
    const cplx s = pairwise_sum<cplx>(phi.values.size(), [&](std::size_t j) {
        return std::conj(phi.values[j]) * psi.values[j];
    });
    return s * phi.grid.spacing();
}

inline double norm(const CircleWavefunction& psi) { return std::sqrt(std::abs(inner(psi, psi))); }

inline double distance(const CircleWavefunction& a, const CircleWavefunction& b) {
    CircleWavefunction d = a;
    for (std::size_t j = 0; j < d.values.size(); ++j) d.values[j] -= b.values[j];
    return norm(d);
}

/// psi_n(alpha) = (2 pi)^{-1/2} exp(i n alpha).
inline CircleWavefunction circle_basis(int n, const CircleGrid& grid) {
    require(2 * std::abs(n) < grid.size(), "circle_basis: |n| must be below N/2 (aliasing)");
    const double amp = 1.0 / std::sqrt(two_pi);
    // Integer phase arithmetic keeps the samples exact roots of unity.
    CircleWavefunction out(grid);
    const long long big_n = grid.size();
    for (int j = 0; j < grid.size(); ++j) {
        const long long m = ((static_cast<long long>(n) * j) % big_n + big_n) % big_n;
        out.values[j] = amp * std::polar(1.0, two_pi * static_cast<double>(m) / big_n);
    }
    return out;
}

/// Multiplies Fourier mode n of psi by multiplier(n).
template <class Multiplier>
CircleWavefunction circle_mode_multiply(const CircleWavefunction& psi, const Multiplier& multiplier) {
    const int n = psi.grid.size();
    std::vector<cplx> buf = psi.values;
    detail::dft_inplace(buf, {n}, detail::Direction::forward);
    for (int r = 0; r < n; ++r) buf[r] *= multiplier(psi.grid.mode(r)) / static_cast<double>(n);
    detail::dft_inplace(buf, {n}, detail::Direction::backward);
    CircleWavefunction out(psi.grid);
    out.values = std::move(buf);
    return out;
}

/// U(alpha') psi(alpha) = psi(alpha - alpha' mod 2 pi): mode n picks up exp(-i n alpha').
inline CircleWavefunction circle_rotate(double alpha_prime, const CircleWavefunction& psi) {
    return circle_mode_multiply(psi, [&](int n) { return std::exp(-I * (n * alpha_prime)); });
}

/// K = -i d/dalpha, so that U(alpha) = exp(-i alpha K).
inline CircleWavefunction circle_k_apply(const CircleWavefunction& psi) {
    return circle_mode_multiply(psi, [](int n) { return cplx(n); });
}

/// Q psi = alpha psi with alpha in [0, 2 pi); discontinuous at the seam alpha = 0.
inline CircleWavefunction circle_q_apply(const CircleWavefunction& psi) {
    CircleWavefunction out = psi;
    for (int j = 0; j < psi.grid.size(); ++j) out.values[j] *= psi.grid.angle(j);
    return out;
}

inline double circle_omega_eigenvalue(int n, double kappa, double c) {
    require(kappa != 0.0 && c > 0.0, "circle: kappa must be nonzero and c positive");
    return static_cast<double>(n) * n * c / (2.0 * kappa);
}

/// Omega = (c / 2 kappa) K^2.
inline CircleWavefunction circle_omega_apply(const CircleWavefunction& psi, double kappa, double c) {
    return circle_mode_multiply(psi, [&](int n) { return cplx(circle_omega_eigenvalue(n, kappa, c)); });
}

/// Mode n evolves by exp(-i n^2 c t / 2 kappa).
inline CircleWavefunction circle_evolve(double t, const CircleWavefunction& psi, double kappa, double c) {
    return circle_mode_multiply(psi, [&](int n) { return std::exp(-I * circle_omega_eigenvalue(n, kappa, c) * t); });
}

/// <U(alpha2)* psi | f^ | U(alpha1)* psi> evaluated directly.
inline cplx circle_correlation_direct(const CircleWavefunction& f, double alpha1, double alpha2,
                                      const CircleWavefunction& psi) {
    const CircleWavefunction x = circle_rotate(-alpha1, psi);
    const CircleWavefunction y = circle_rotate(-alpha2, psi);
    CircleWavefunction fx = x;
    for (std::size_t j = 0; j < fx.values.size(); ++j) fx.values[j] *= f.values[j];
    return inner(y, fx);
}

/// Closed form in the stationary state psi_n: exp(i n (alpha1 - alpha2)) times the mean of f.
inline cplx circle_correlation(const CircleWavefunction& f, double alpha1, double alpha2, int n) {
    const cplx mean = pairwise_sum<cplx>(f.values.size(), [&](std::size_t j) { return f.values[j]; }) /
                      static_cast<double>(f.grid.size());
    return std::exp(I * (n * (alpha1 - alpha2))) * mean;
}

/// ||(i[K, Q] - 1) psi|| / ||psi||; small only for states that vanish smoothly at the seam.
inline double circle_ccr_residual(const CircleWavefunction& psi) {
    const CircleWavefunction kq = circle_k_apply(circle_q_apply(psi));
    const CircleWavefunction qk = circle_q_apply(circle_k_apply(psi));
    CircleWavefunction r = psi;
    for (std::size_t j = 0; j < r.values.size(); ++j) r.values[j] = I * (kq.values[j] - qk.values[j]) - psi.values[j];
    return norm(r) / norm(psi);
}

/// Dense matrix of K in the lattice basis; Hermitian.
inline Eigen::MatrixXcd circle_k_matrix(const CircleGrid& grid) {
    const int n = grid.size();
    Eigen::MatrixXcd m(n, n);
    for (int j = 0; j < n; ++j) {
        CircleWavefunction e(grid);
        e.values[j] = 1.0;
        const CircleWavefunction col = circle_k_apply(e);
        for (int i = 0; i < n; ++i) m(i, j) = col.values[i];
    }
    return m;
}

/// Sorted eigenvalues of the dense K matrix.
inline std::vector<double> circle_k_spectrum(const CircleGrid& grid) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(circle_k_matrix(grid));
    const Eigen::VectorXd ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

struct CircleSpectrumRow {
    int n;
    double k_eigenvalue;
    double omega_eigenvalue;
};

/// (n, <psi_n|K psi_n>, <psi_n|Omega psi_n>) for every |n| < N/2.
inline std::vector<CircleSpectrumRow> circle_spectrum(const CircleGrid& grid, double kappa, double c) {
    std::vector<CircleSpectrumRow> rows;
    for (int n = -(grid.size() / 2 - 1); n <= grid.size() / 2 - 1; ++n) {
        const CircleWavefunction b = circle_basis(n, grid);
        rows.push_back({n, inner(b, circle_k_apply(b)).real(), inner(b, circle_omega_apply(b, kappa, c)).real()});
    }
    return rows;
}

}  // namespace qcov
