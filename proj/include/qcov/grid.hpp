#pragma once

#include "qcov/core.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

namespace qcov {

inline constexpr std::size_t default_max_points = std::size_t{1} << 24;

/**
 * Uniform periodic grid over the box [-L/2, L/2)^dim.
 *
 * Position samples sit at q_i = -L/2 + i*dq and wavevector samples at
 * k_i = (i - N/2)*dk for i in [0, N), so both live in "centered" order.
 * Flat indices are row-major with axis 0 varying slowest.
 */
class GridSpec {
public:
    int dim() const { return dim_; }
    int points_per_axis() const { return n_; }
    double box_length() const { return box_; }

    double dq() const { return box_ / n_; }
    double dk() const { return two_pi / box_; }
    /// Magnitude of the Nyquist wavenumber, pi/dq.
    double k_max() const { return pi / dq(); }
    double cell_volume() const { return std::pow(dq(), dim_); }
    double k_cell_volume() const { return std::pow(dk(), dim_); }

    std::size_t size() const { return size_; }

    double coordinate(int i) const { return -0.5 * box_ + i * dq(); }
    double wavenumber(int i) const { return (i - n_ / 2) * dk(); }

    int axis_index(std::size_t flat, int axis) const {
        std::size_t stride = 1;
        for (int j = dim_ - 1; j > axis; --j) stride *= static_cast<std::size_t>(n_);
        return static_cast<int>((flat / stride) % static_cast<std::size_t>(n_));
    }

    std::array<int, 3> multi_index(std::size_t flat) const {
        std::array<int, 3> idx{0, 0, 0};
        for (int j = dim_ - 1; j >= 0; --j) {
            idx[j] = static_cast<int>(flat % static_cast<std::size_t>(n_));
            flat /= static_cast<std::size_t>(n_);
        }
        return idx;
    }

    /// Flat index of a multi-index; components are wrapped modulo N.
    std::size_t flat_index(const std::array<int, 3>& idx) const {
        std::size_t flat = 0;
        for (int j = 0; j < dim_; ++j) {
            int i = idx[j] % n_;
            if (i < 0) i += n_;
            flat = flat * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i);
        }
        return flat;
    }

    Vec position(std::size_t flat) const {
        const auto idx = multi_index(flat);
        Vec q = Vec::Zero();
        for (int j = 0; j < dim_; ++j) q[j] = coordinate(idx[j]);
        return q;
    }

    Vec wavevector(std::size_t flat) const {
        const auto idx = multi_index(flat);
        Vec k = Vec::Zero();
        for (int j = 0; j < dim_; ++j) k[j] = wavenumber(idx[j]);
        return k;
    }

    friend bool operator==(const GridSpec& a, const GridSpec& b) {
        return a.dim_ == b.dim_ && a.n_ == b.n_ && a.box_ == b.box_;
    }

    friend GridSpec make_grid(int dim, int points_per_axis, double box_length,
                              std::size_t max_points);

private:
    GridSpec(int dim, int n, double box, std::size_t size)
        : dim_(dim), n_(n), box_(box), size_(size) {}

    int dim_;
    int n_;
    double box_;
    std::size_t size_;
};

inline bool is_power_of_two(long long n) { return n > 0 && (n & (n - 1)) == 0; }

inline GridSpec make_grid(int dim, int points_per_axis, double box_length,
                          std::size_t max_points = default_max_points) {
    require(dim >= 1 && dim <= 3, "make_grid: dim must be 1, 2 or 3");
    require(points_per_axis >= 4 && is_power_of_two(points_per_axis),
            "make_grid: points per axis must be a power of two >= 4");
    require(box_length > 0.0 && std::isfinite(box_length),
            "make_grid: box length must be positive");
    std::size_t total = 1;
    for (int j = 0; j < dim; ++j) total *= static_cast<std::size_t>(points_per_axis);
    require(total <= max_points, "make_grid: grid exceeds the configured point cap");
    return GridSpec(dim, points_per_axis, box_length, total);
}

inline void require_same_grid(const GridSpec& a, const GridSpec& b, const char* where) {
    if (!(a == b)) throw grid_mismatch(std::string(where) + ": operands live on different grids");
}

struct position_domain {};
struct wavevector_domain {};

/**
 * Complex samples on a grid, tagged by the domain they live in so that
 * position-space and wavevector-space arrays cannot be mixed up.
 */
template <class Domain>
class Sampled {
public:
    explicit Sampled(const GridSpec& grid) : grid_(grid), values_(grid.size()) {}

    Sampled(const GridSpec& grid, std::vector<cplx> values)
        : grid_(grid), values_(std::move(values)) {
        require(values_.size() == grid_.size(), "sample count does not match the grid");
    }

    const GridSpec& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }

    cplx& operator[](std::size_t i) { return values_[i]; }
    const cplx& operator[](std::size_t i) const { return values_[i]; }

    std::vector<cplx>& values() { return values_; }
    const std::vector<cplx>& values() const { return values_; }

    Sampled& operator+=(const Sampled& other) {
        require_same_grid(grid_, other.grid_, "operator+=");
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
        return *this;
    }
    Sampled& operator-=(const Sampled& other) {
        require_same_grid(grid_, other.grid_, "operator-=");
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
        return *this;
    }
    Sampled& operator*=(cplx c) {
        for (auto& v : values_) v *= c;
        return *this;
    }

    friend Sampled operator+(Sampled a, const Sampled& b) { return a += b; }
    friend Sampled operator-(Sampled a, const Sampled& b) { return a -= b; }
    friend Sampled operator*(cplx c, Sampled a) { return a *= c; }
    friend Sampled operator*(Sampled a, cplx c) { return a *= c; }

private:
    GridSpec grid_;
    std::vector<cplx> values_;
};

/// A wavefunction, or any other function of position sampled on the grid.
using Wavefunction = Sampled<position_domain>;
/// Functions f entering multiplication operators share the position layout.
using GridFunction = Wavefunction;
/// Samples on the wavevector lattice, centered at k = 0.
using SpectralFunction = Sampled<wavevector_domain>;

/// Samples fn(q) at every grid point.
template <class Fn>
Wavefunction sample(const GridSpec& grid, const Fn& fn) {
    Wavefunction out(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = fn(grid.position(i));
    return out;
}

/// Samples fn(k) at every wavevector lattice point.
template <class Fn>
SpectralFunction sample_spectral(const GridSpec& grid, const Fn& fn) {
    SpectralFunction out(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = fn(grid.wavevector(i));
    return out;
}

template <class Domain>
Sampled<Domain> pointwise_product(const Sampled<Domain>& a, const Sampled<Domain>& b) {
    require_same_grid(a.grid(), b.grid(), "pointwise_product");
    Sampled<Domain> out(a.grid());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

template <class Domain>
Sampled<Domain> conj(const Sampled<Domain>& a) {
    Sampled<Domain> out(a.grid());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::conj(a[i]);
    return out;
}

template <class Domain>
double max_abs(const Sampled<Domain>& a) {
    double m = 0.0;
    for (const auto& v : a.values()) m = std::max(m, std::abs(v));
    return m;
}

template <class Domain>
double max_abs_diff(const Sampled<Domain>& a, const Sampled<Domain>& b) {
    require_same_grid(a.grid(), b.grid(), "max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// <phi|psi> = sum conj(phi) psi dq^n, antilinear in phi.
inline cplx inner(const Wavefunction& phi, const Wavefunction& psi) {
    require_same_grid(phi.grid(), psi.grid(), "inner");
    const cplx s = pairwise_sum<cplx>(psi.size(), [&](std::size_t i) {
        return std::conj(phi[i]) * psi[i];
    });
    return s * phi.grid().cell_volume();
}

inline double norm(const Wavefunction& psi) {
    const double s = pairwise_sum<double>(psi.size(), [&](std::size_t i) {
        return std::norm(psi[i]);
    });
    return std::sqrt(s * psi.grid().cell_volume());
}

inline Wavefunction normalize(const Wavefunction& psi) {
    const double n = norm(psi);
    require(n > 0.0, "normalize: zero vector");
    return psi * cplx(1.0 / n);
}

/// L2 distance between two wavefunctions on the same grid.
inline double distance(const Wavefunction& a, const Wavefunction& b) { return norm(a - b); }

/// Minimum-image displacement q - c on the periodic box.
inline Vec periodic_displacement(const GridSpec& grid, const Vec& q, const Vec& c) {
    Vec d = Vec::Zero();
    const double L = grid.box_length();
    for (int j = 0; j < grid.dim(); ++j) {
        double x = q[j] - c[j];
        x -= L * std::round(x / L);
        d[j] = x;
    }
    return d;
}

/**
 * Gaussian wave packet (2 pi lambda^2)^{-n/4} exp(-|q-c|^2 / 4 lambda^2) exp(i k0.q).
 *
 * The displacement from `center` uses the minimum image on the box. The
 * result is renormalized by quadrature, a correction that is at rounding
 * level whenever the packet fits comfortably inside the box.
 */
inline Wavefunction sample_gaussian(const GridSpec& grid, double lambda,
                                    const Vec& center = Vec::Zero(),
                                    const Vec& k0 = Vec::Zero()) {
    require(lambda >= 4.0 * grid.dq() * (1.0 - 1e-12),
            "sample_gaussian: lambda below 4 grid spacings is not resolvable");
    require(lambda <= grid.box_length() / 8.0 * (1.0 + 1e-12),
            "sample_gaussian: lambda above L/8 wraps around the box");
    require(truncate(k0, grid.dim()).norm() <= 0.5 * grid.k_max(),
            "sample_gaussian: |k0| exceeds half the Nyquist wavenumber");
    const int n = grid.dim();
    const double amp = std::pow(two_pi * lambda * lambda, -0.25 * n);
    const Vec c = truncate(center, n);
    const Vec kk = truncate(k0, n);
    auto psi = sample(grid, [&](const Vec& q) {
        const Vec d = periodic_displacement(grid, q, c);
        return amp * std::exp(-d.squaredNorm() / (4.0 * lambda * lambda)) *
               std::exp(I * kk.dot(q));
    });
    return normalize(psi);
}

}  // namespace qcov
