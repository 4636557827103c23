#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qcov {

using cplx = std::complex<double>;

/// Spatial vectors and rotations are always 3-component; a d-dimensional
/// grid reads the first d components and ignores the rest.
using Vec = Eigen::Vector3d;
using Mat = Eigen::Matrix3d;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

/// Raised when an operation's documented precondition does not hold.
class precondition_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when two operands live on different grids.
class grid_mismatch : public precondition_error {
public:
    using precondition_error::precondition_error;
};

/// Raised when an internal consistency check fails (a bug, not bad input).
class internal_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw precondition_error(message);
}

/**
 * Deterministic pairwise (tree) summation of term(0) + ... + term(n-1).
 *
 * Every reduction in the library goes through this so that results are
 * bit-for-bit reproducible and the rounding error grows like log(n).
 */
template <class T, class Term>
T pairwise_sum(std::size_t begin, std::size_t end, const Term& term) {
    constexpr std::size_t leaf = 16;
    if (end - begin <= leaf) {
        T acc{};
        for (std::size_t i = begin; i < end; ++i) acc += term(i);
        return acc;
    }
    const std::size_t mid = begin + (end - begin) / 2;
    return pairwise_sum<T>(begin, mid, term) + pairwise_sum<T>(mid, end, term);
}

template <class T, class Term>
T pairwise_sum(std::size_t n, const Term& term) {
    return pairwise_sum<T>(std::size_t{0}, n, term);
}

/// Restricts a vector to its first `dim` components (the rest set to zero).
inline Vec truncate(const Vec& v, int dim) {
    Vec out = Vec::Zero();
    for (int j = 0; j < dim; ++j) out[j] = v[j];
    return out;
}

/// Right-handed rotation by `angle` about coordinate axis `axis` (0, 1 or 2).
inline Mat axis_rotation(int axis, double angle) {
    require(axis >= 0 && axis < 3, "axis_rotation: axis must be 0, 1 or 2");
    return Eigen::AngleAxisd(angle, Vec::Unit(axis)).toRotationMatrix();
}

/// Rotation in the (q1, q2) plane, embedded in a 3x3 matrix.
inline Mat plane_rotation(double angle) { return axis_rotation(2, angle); }

/// True when the leading dim x dim block of `m` is orthogonal with det +1 and
/// the remaining block is the identity, all within `tol`.
inline bool is_rotation(const Mat& m, int dim, double tol = 1e-12) {
    Mat padded = Mat::Identity();
    padded.topLeftCorner(dim, dim) = m.topLeftCorner(dim, dim);
    if (!(padded - m).isZero(tol)) return false;
    if (!(m.transpose() * m - Mat::Identity()).isZero(tol)) return false;
    return std::abs(m.determinant() - 1.0) <= tol;
}

inline void require_rotation(const Mat& m, int dim, const std::string& where) {
    require(is_rotation(m, dim), where + ": matrix is not a rotation of the grid dimension");
}

}  // namespace qcov
