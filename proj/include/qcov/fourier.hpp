#pragma once

#include "qcov/fft.hpp"
#include "qcov/grid.hpp"

#include <vector>

namespace qcov {

namespace detail {

inline std::vector<int> grid_dims(const GridSpec& grid) {
    return std::vector<int>(static_cast<std::size_t>(grid.dim()), grid.points_per_axis());
}

/// Raw DFT index r corresponds to the lattice mode m = r (r < N/2) or r - N.
inline int raw_to_mode(int r, int n) { return r < n / 2 ? r : r - n; }

/// Parity of sum_j m_j for the raw multi-index (m and r share parity since N is even).
inline bool odd_raw_parity(const GridSpec& grid, std::size_t flat) {
    const auto idx = grid.multi_index(flat);
    int s = 0;
    for (int j = 0; j < grid.dim(); ++j) s += idx[j];
    return (s & 1) != 0;
}

/// Flat index of the centered layout for the raw (FFT-ordered) flat index.
inline std::size_t raw_to_centered(const GridSpec& grid, std::size_t flat) {
    auto idx = grid.multi_index(flat);
    for (int j = 0; j < grid.dim(); ++j) idx[j] += grid.points_per_axis() / 2;
    return grid.flat_index(idx);
}

/// Wavevector of a raw DFT output index.
inline Vec raw_wavevector(const GridSpec& grid, std::size_t flat) {
    const auto idx = grid.multi_index(flat);
    Vec k = Vec::Zero();
    for (int j = 0; j < grid.dim(); ++j)
        k[j] = raw_to_mode(idx[j], grid.points_per_axis()) * grid.dk();
    return k;
}

}  // namespace detail

/**
 * f~(k) = (2 pi)^{-n} sum_q exp(-i k.q) f(q) dq^n on the centered lattice.
 *
 * The whole (2 pi)^{-n} sits here, so inverse() carries only dk^n and
 * forward followed by inverse is the identity on the lattice.
 */
inline SpectralFunction forward(const GridFunction& f) {
    const GridSpec& grid = f.grid();
    std::vector<cplx> buf = f.values();
    detail::dft_inplace(buf, detail::grid_dims(grid), detail::Direction::forward);
    const double scale = std::pow(two_pi, -grid.dim()) * grid.cell_volume();
    SpectralFunction out(grid);
    for (std::size_t r = 0; r < buf.size(); ++r) {
        const double sign = detail::odd_raw_parity(grid, r) ? -scale : scale;
        out[detail::raw_to_centered(grid, r)] = sign * buf[r];
    }
    return out;
}

/// f(q) = sum_k f~(k) exp(i k.q) dk^n.
inline GridFunction inverse(const SpectralFunction& tf) {
    const GridSpec& grid = tf.grid();
    std::vector<cplx> buf(grid.size());
    const double scale = grid.k_cell_volume();
    for (std::size_t r = 0; r < buf.size(); ++r) {
        const double sign = detail::odd_raw_parity(grid, r) ? -scale : scale;
        buf[r] = sign * tf[detail::raw_to_centered(grid, r)];
    }
    detail::dft_inplace(buf, detail::grid_dims(grid), detail::Direction::backward);
    return GridFunction(grid, std::move(buf));
}

/// (f~ x g~)(k) = sum_k' f~(k') g~(k - k') dk^n with k - k' taken modulo the lattice.
inline SpectralFunction convolve(const SpectralFunction& tf, const SpectralFunction& tg) {
    require_same_grid(tf.grid(), tg.grid(), "convolve");
    return forward(pointwise_product(inverse(tf), inverse(tg)));
}

/// f~*(k) = conj(f~(-k)), with -k taken modulo the lattice.
inline SpectralFunction involution(const SpectralFunction& tf) {
    const GridSpec& grid = tf.grid();
    const int n = grid.points_per_axis();
    SpectralFunction out(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto idx = grid.multi_index(i);
        for (int j = 0; j < grid.dim(); ++j) idx[j] = (n - idx[j]) % n;
        out[i] = std::conj(tf[grid.flat_index(idx)]);
    }
    return out;
}

/**
 * Multiplies the spectrum of psi by multiplier(k) and transforms back.
 *
 * Works directly on the raw DFT so that the normalization constants cancel
 * exactly; this is the kernel behind shifts, generators and free evolution.
 */
template <class Multiplier>
Wavefunction apply_fourier_multiplier(const Wavefunction& psi, const Multiplier& multiplier) {
    const GridSpec& grid = psi.grid();
    std::vector<cplx> buf = psi.values();
    const auto dims = detail::grid_dims(grid);
    detail::dft_inplace(buf, dims, detail::Direction::forward);
    const double inv = 1.0 / static_cast<double>(grid.size());
    for (std::size_t r = 0; r < buf.size(); ++r)
        buf[r] *= inv * multiplier(detail::raw_wavevector(grid, r));
    detail::dft_inplace(buf, dims, detail::Direction::backward);
    return Wavefunction(grid, std::move(buf));
}

/// Direct evaluation of f~ at an arbitrary (possibly off-lattice) wavevector.
inline cplx spectral_value_at(const GridFunction& f, const Vec& k) {
    const GridSpec& grid = f.grid();
    const Vec kk = truncate(k, grid.dim());
    const cplx s = pairwise_sum<cplx>(grid.size(), [&](std::size_t i) {
        return std::exp(-I * kk.dot(grid.position(i))) * f[i];
    });
    return s * std::pow(two_pi, -grid.dim()) * grid.cell_volume();
}

/// Fraction of spectral mass on the outer quarter of wavevector shells
/// (max_j |m_j| >= 3N/8); "band-limited" means this is below 1e-12.
inline double outer_shell_fraction(const SpectralFunction& tf) {
    const GridSpec& grid = tf.grid();
    const int n = grid.points_per_axis();
    double outer = 0.0, total = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto idx = grid.multi_index(i);
        int shell = 0;
        for (int j = 0; j < grid.dim(); ++j) shell = std::max(shell, std::abs(idx[j] - n / 2));
        const double w = std::norm(tf[i]);
        total += w;
        if (4 * shell >= 3 * (n / 2)) outer += w;
    }
    return total > 0.0 ? outer / total : 0.0;
}

}  // namespace qcov
