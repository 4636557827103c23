// Free flight of a boosted Gaussian: prints <Q>(t) and the position variance
// next to their closed forms, then checks that the boosted frame sees the
// packet displaced by -t v.

#include "qcov/qcov.hpp"

#include <cstdio>

int main() {
    using namespace qcov;
    const GridSpec grid = make_grid(1, 512, 48.0);
    const FreeDynamics dyn{1.0, 1.0, 0.0, Vec::Zero()};
    const double lambda = 1.0;
    const Wavefunction psi = sample_gaussian(grid, lambda, Vec(-4.0, 0, 0), Vec(2.0, 0, 0));

    std::printf("%6s %14s %14s %14s %14s\n", "t", "<Q>", "<Q> exact", "var", "var exact");
    for (int i = 0; i <= 8; ++i) {
        const double t = 0.5 * i;
        const Wavefunction psi_t = evolve(t, psi, dyn);
        const double q = mean_position(psi_t)[0];
        const double var = position_variance(psi_t)[0];
        const double q_exact = -4.0 + 2.0 * t * dyn.c / dyn.kappa;
        const double var_exact = lambda * lambda + t * t * dyn.c * dyn.c / (4.0 * lambda * lambda * dyn.kappa * dyn.kappa);
        std::printf("%6.2f %14.10f %14.10f %14.10f %14.10f\n", t, q, q_exact, var, var_exact);
    }

    const FramePositions fp = boosted_frame_position(psi, Vec(0.3, 0, 0), 1.0, dyn);
    std::printf("\nframe moving at v = 0.3, t = 1: <Q> = %.10f, lab <Q> - t v = %.10f\n", fp.moving[0],
                fp.lab[0] - 0.3);
    return 0;
}
