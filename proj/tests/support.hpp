#pragma once

#include "qcov/qcov.hpp"

#include <random>

namespace qcov::test {

/// Seeded source of test parameters; every test owns one so results do not depend on ordering.
class Draws {
public:
    explicit Draws(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

    Vec vec(int dim, double r) {
        Vec v = Vec::Zero();
        for (int j = 0; j < dim; ++j) v[j] = uniform(-r, r);
        return v;
    }

    Mat rotation() {
        return Eigen::AngleAxisd(uniform(0.0, pi), vec(3, 1.0).normalized()).toRotationMatrix();
    }

    /// Quarter turn about axis 2, as used on 2D grids.
    Mat quarter_turn() { return axis_rotation(2, 0.5 * pi * integer(0, 3)).array().round().matrix(); }

    cplx complex() { return {uniform(-1.0, 1.0), uniform(-1.0, 1.0)}; }

private:
    std::mt19937_64 engine_;
};

/// Sum of a few lattice plane waves with random coefficients (band-limited, exactly periodic).
inline GridFunction trig_function(Draws& draws, const GridSpec& grid, int terms, int max_mode) {
    GridFunction f(grid);
    for (int t = 0; t < terms; ++t) {
        Vec k = Vec::Zero();
        for (int j = 0; j < grid.dim(); ++j) k[j] = draws.integer(-max_mode, max_mode) * grid.dk();
        f += draws.complex() * plane_wave(grid, k);
    }
    return f;
}

}  // namespace qcov::test
