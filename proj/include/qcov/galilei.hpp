#pragma once

#include "qcov/states.hpp"

#include <optional>
#include <vector>

namespace qcov {

/// Galilei transformation (a, L, t, v): q -> L q + a + tau v, tau -> tau + t.
struct GalileiElement {
    Vec a = Vec::Zero();
    Mat rot = Mat::Identity();
    double t = 0.0;
    Vec v = Vec::Zero();

    static GalileiElement identity() { return {}; }
    static GalileiElement shift(const Vec& a) { return {a, Mat::Identity(), 0.0, Vec::Zero()}; }
    static GalileiElement rotation(const Mat& r) { return {Vec::Zero(), r, 0.0, Vec::Zero()}; }
    static GalileiElement time(double t) { return {Vec::Zero(), Mat::Identity(), t, Vec::Zero()}; }
    static GalileiElement boost(const Vec& v) { return {Vec::Zero(), Mat::Identity(), 0.0, v}; }
};

/// (b, M, s, w)(a, L, t, v) = (b + M a + t w, M L, s + t, w + M v).
inline GalileiElement compose(const GalileiElement& g2, const GalileiElement& g1) {
    return {g2.a + g2.rot * g1.a + g1.t * g2.v, g2.rot * g1.rot, g2.t + g1.t, g2.v + g2.rot * g1.v};
}

/// (a, L, t, v)^{-1} = (-L^{-1}(a - t v), L^{-1}, -t, -L^{-1} v).
inline GalileiElement inverse_element(const GalileiElement& g) {
    const Mat rt = g.rot.transpose();
    return {-(rt * (g.a - g.t * g.v)), rt, -g.t, -(rt * g.v)};
}

/// Largest componentwise difference between two group elements.
inline double element_distance(const GalileiElement& x, const GalileiElement& y) {
    return std::max({(x.a - y.a).cwiseAbs().maxCoeff(), (x.rot - y.rot).cwiseAbs().maxCoeff(),
                     std::abs(x.t - y.t), (x.v - y.v).cwiseAbs().maxCoeff()});
}

/**
 * Free dynamics Omega = (c / 2 kappa) K^2 + d.
 *
 * kappa may be negative (the time-reversed flow of a particle with kappa > 0)
 * but not zero. beta adds a linear term beta.K and exists only to show that
 * it breaks the projective Galilei law; physical dynamics keep beta = 0.
 */
struct FreeDynamics {
    double kappa = 1.0;
    double c = 1.0;
    double d = 0.0;
    Vec beta = Vec::Zero();

    void validate() const {
        require(std::isfinite(kappa) && kappa != 0.0, "FreeDynamics: kappa must be nonzero");
        require(std::isfinite(c) && c > 0.0, "FreeDynamics: c must be positive");
        require(std::isfinite(d), "FreeDynamics: d must be finite");
    }

    double frequency(const Vec& k) const { return c * k.squaredNorm() / (2.0 * kappa) + beta.dot(k) + d; }
};

/// Omega psi, the generator of the free flow.
inline Wavefunction omega_apply(const Wavefunction& psi, const FreeDynamics& dyn) {
    dyn.validate();
    return apply_fourier_multiplier(psi, [&](const Vec& k) { return cplx(dyn.frequency(k)); });
}

/// R(v) psi = exp(i kappa (v/c).Q) psi.
inline Wavefunction boost(const Vec& v, const Wavefunction& psi, const FreeDynamics& dyn) {
    dyn.validate();
    const Vec kick = truncate(v, psi.grid().dim()) * (dyn.kappa / dyn.c);
    if (kick.isZero(0.0)) return psi;
    require(kick.norm() <= 0.5 * psi.grid().k_max(),
            "boost: kappa |v| / c exceeds half the Nyquist wavenumber");
    return multiply(plane_wave(psi.grid(), kick), psi);
}

/// Schroedinger flow psi_t = V(t)* psi: the spectrum picks up exp(-i Omega(k) t).
inline Wavefunction evolve(double t, const Wavefunction& psi, const FreeDynamics& dyn) {
    dyn.validate();
    if (t == 0.0) return psi;
    return apply_fourier_multiplier(psi, [&](const Vec& k) { return std::exp(-I * dyn.frequency(k) * t); });
}

/// The flow as an Evolution callable for the operators module.
inline Evolution free_evolution(const FreeDynamics& dyn) {
    return [dyn](double t, const Wavefunction& psi) { return evolve(t, psi, dyn); };
}

/**
 * U(a, L, t, v) = U(a - t v, L) R(L^{-1} v) V(t) with V(t) = exp(i Omega t).
 *
 * V(t) is the Heisenberg-picture propagator, i.e. evolve(-t); this is the
 * ordering for which the multiplier takes the closed form of
 * galilei_multiplier. The adjoint below therefore contains evolve(+t).
 */
inline Wavefunction galilei_apply(const GalileiElement& g, const Wavefunction& psi,
                                  const FreeDynamics& dyn) {
    Wavefunction out = evolve(-g.t, psi, dyn);
    out = boost(g.rot.transpose() * g.v, out, dyn);
    return euclid({g.a - g.t * g.v, g.rot}, out);
}

/// U(g)* psi = V(t)* R(L^{-1} v)* U(a - t v, L)* psi.
inline Wavefunction galilei_apply_adjoint(const GalileiElement& g, const Wavefunction& psi,
                                          const FreeDynamics& dyn) {
    Wavefunction out = euclid_adjoint({g.a - g.t * g.v, g.rot}, psi);
    out = boost(-(g.rot.transpose() * g.v), out, dyn);
    return evolve(g.t, out, dyn);
}

/// Exponent (kappa/c)[w.Ma - s|v|^2/2 - (s+t) w.Mv] of the multiplier for g2 = (b,M,s,w), g1 = (a,L,t,v).
inline double galilei_multiplier_phase(const GalileiElement& g2, const GalileiElement& g1,
                                       const FreeDynamics& dyn) {
    const Vec ma = g2.rot * g1.a;
    const Vec mv = g2.rot * g1.v;
    return (dyn.kappa / dyn.c) *
           (g2.v.dot(ma) - 0.5 * g2.t * g1.v.squaredNorm() - (g2.t + g1.t) * g2.v.dot(mv));
}

/// xi(g2, g1) with U(g2) U(g1) = xi U(g2 g1).
inline cplx galilei_multiplier(const GalileiElement& g2, const GalileiElement& g1,
                               const FreeDynamics& dyn) {
    return std::exp(I * galilei_multiplier_phase(g2, g1, dyn));
}

/// ||U(g2) U(g1) psi - xi(g2, g1) U(g2 g1) psi||.
inline double multiplier_residual(const GalileiElement& g2, const GalileiElement& g1,
                                  const Wavefunction& psi, const FreeDynamics& dyn) {
    const Wavefunction lhs = galilei_apply(g2, galilei_apply(g1, psi, dyn), dyn);
    const Wavefunction rhs = galilei_multiplier(g2, g1, dyn) * galilei_apply(compose(g2, g1), psi, dyn);
    return distance(lhs, rhs);
}

/// 1 - |<U(g2 g1) psi | U(g2) U(g1) psi>| / ||psi||^2: zero iff the two sides agree up to a constant phase.
inline double proportionality_defect(const GalileiElement& g2, const GalileiElement& g1,
                                     const Wavefunction& psi, const FreeDynamics& dyn) {
    const Wavefunction lhs = galilei_apply(g2, galilei_apply(g1, psi, dyn), dyn);
    const Wavefunction rhs = galilei_apply(compose(g2, g1), psi, dyn);
    return 1.0 - std::abs(inner(rhs, lhs)) / std::pow(norm(psi), 2);
}

/// Largest |psi| on the outer band |q_j| >= 0.4 L of the box.
inline double edge_amplitude(const Wavefunction& psi) {
    const GridSpec& grid = psi.grid();
    double m = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Vec q = grid.position(i);
        bool edge = false;
        for (int j = 0; j < grid.dim(); ++j) edge = edge || std::abs(q[j]) >= 0.4 * grid.box_length();
        if (edge) m = std::max(m, std::abs(psi[i]));
    }
    return m;
}

inline constexpr double edge_amplitude_limit = 1e-12;

struct MassFit {
    std::optional<double> kappa;  ///< empty when <K> vanishes
    Vec slope = Vec::Zero();      ///< d<Q_j>/dt per axis
    Vec mean_wavevector = Vec::Zero();
    double fit_residual = 0.0;    ///< largest deviation of <Q>(t) from the fitted lines
};

/**
 * Fits <Q_j>_t = <Q_j>_0 + (c t / kappa) <K_j> over the sample times and
 * returns the kappa that explains the slopes. The mass is m = hbar kappa / c
 * in physical units; no hbar enters the computation.
 */
inline MassFit mass_extraction(const Wavefunction& psi, const FreeDynamics& dyn,
                               const std::vector<double>& t_samples) {
    require(t_samples.size() >= 2, "mass_extraction: need at least two sample times");
    const int dim = psi.grid().dim();
    std::vector<Vec> means;
    for (double t : t_samples) {
        const Wavefunction psi_t = evolve(t, psi, dyn);
        if (edge_amplitude(psi_t) >= edge_amplitude_limit)
            throw precondition_error("mass_extraction: packet reaches the box edge at t = " +
                                     std::to_string(t));
        means.push_back(mean_position(psi_t));
    }
    const double n = static_cast<double>(t_samples.size());
    double tm = 0.0;
    for (double t : t_samples) tm += t / n;
    double stt = 0.0;
    for (double t : t_samples) stt += (t - tm) * (t - tm);
    require(stt > 0.0, "mass_extraction: sample times must not all coincide");

    MassFit fit;
    fit.mean_wavevector = mean_wavevector(psi);
    for (int j = 0; j < dim; ++j) {
        double qm = 0.0;
        for (const Vec& m : means) qm += m[j] / n;
        double stq = 0.0;
        for (std::size_t i = 0; i < means.size(); ++i) stq += (t_samples[i] - tm) * (means[i][j] - qm);
        fit.slope[j] = stq / stt;
        for (std::size_t i = 0; i < means.size(); ++i) {
            const double model = qm + fit.slope[j] * (t_samples[i] - tm);
            fit.fit_residual = std::max(fit.fit_residual, std::abs(means[i][j] - model));
        }
    }
    const double kk = fit.mean_wavevector.squaredNorm();
    const double ks = fit.mean_wavevector.dot(fit.slope);
    if (kk > 1e-20 && std::abs(ks) > 0.0) fit.kappa = dyn.c * kk / ks;
    return fit;
}

/**
 * State seen from a frame moving with velocity v at time t: lab evolution
 * followed by the change of frame, V(t)* R(v)* psi. As a group element this
 * is [U(0,I,0,v) U(0,I,t,0)]*, i.e. (t v, I, t, v) up to a phase.
 */
inline Wavefunction moving_frame_state(const Wavefunction& psi, const Vec& v, double t,
                                       const FreeDynamics& dyn) {
    return evolve(t, boost(-v, psi, dyn), dyn);
}

struct FramePositions {
    Vec moving;       ///< <Q> in the moving frame
    Vec lab;          ///< <Q>_{0,t} of the lab-evolved state
    double discrepancy;  ///< max_j |moving - (lab - t v)|
};

inline FramePositions boosted_frame_position(const Wavefunction& psi, const Vec& v, double t,
                                             const FreeDynamics& dyn) {
    const Vec vv = truncate(v, psi.grid().dim());
    FramePositions out;
    out.moving = mean_position(moving_frame_state(psi, vv, t, dyn));
    out.lab = mean_position(evolve(t, psi, dyn));
    out.discrepancy = (out.moving - (out.lab - t * vv)).cwiseAbs().maxCoeff();
    return out;
}

/// theta psi = conj(psi), the anti-unitary time reversal.
inline Wavefunction time_reverse(const Wavefunction& psi) { return conj(psi); }

/// evolve(t, theta psi, kappa) against theta evolve(t, psi, -kappa).
inline double time_reversal_residual(const Wavefunction& psi, double t, const FreeDynamics& dyn) {
    FreeDynamics flipped = dyn;
    flipped.kappa = -dyn.kappa;
    flipped.d = -dyn.d;
    flipped.beta = -dyn.beta;
    return distance(evolve(t, time_reverse(psi), dyn), time_reverse(evolve(t, psi, flipped)));
}

/// Coefficients of X_t = q_coeff Q + k_coeff K for X in {Q, K}.
struct LinearCombination {
    double q_coeff;
    double k_coeff;
};

struct HeisenbergSolution {
    LinearCombination position;  ///< Q_t = Q + (t c / kappa) K
    LinearCombination wavevector;  ///< K_t = K
};

inline HeisenbergSolution heisenberg_free_solution(double t, const FreeDynamics& dyn) {
    dyn.validate();
    return {{1.0, t * dyn.c / dyn.kappa}, {0.0, 1.0}};
}

/// max_j |<Q_j>_t predicted from the static state - <Q_j> on evolve(t, psi)|, plus the same for K.
inline double heisenberg_verifier(const Wavefunction& psi, double t, const FreeDynamics& dyn) {
    const HeisenbergSolution sol = heisenberg_free_solution(t, dyn);
    const Vec q0 = mean_position(psi);
    const Vec k0 = mean_wavevector(psi);
    const Wavefunction psi_t = evolve(t, psi, dyn);
    const Vec qt = mean_position(psi_t);
    const Vec kt = mean_wavevector(psi_t);
    const Vec q_pred = sol.position.q_coeff * q0 + sol.position.k_coeff * k0;
    const Vec k_pred = sol.wavevector.q_coeff * q0 + sol.wavevector.k_coeff * k0;
    return std::max((q_pred - qt).cwiseAbs().maxCoeff(), (k_pred - kt).cwiseAbs().maxCoeff());
}

/// ||([Q_j, Omega] - (i c / kappa) K_j) psi|| and ||[K_j, Omega] psi||, maximized over axes.
inline std::pair<double, double> heisenberg_commutator_residuals(const Wavefunction& psi,
                                                                 const FreeDynamics& dyn) {
    double rq = 0.0, rk = 0.0;
    const Wavefunction om = omega_apply(psi, dyn);
    for (int j = 0; j < psi.grid().dim(); ++j) {
        const Wavefunction qo = position_apply(j, om) - omega_apply(position_apply(j, psi), dyn);
        const Wavefunction expected = (I * dyn.c / dyn.kappa) * wavevector_apply(j, psi);
        rq = std::max(rq, distance(qo, expected));
        const Wavefunction ko = wavevector_apply(j, om) - omega_apply(wavevector_apply(j, psi), dyn);
        rk = std::max(rk, norm(ko));
    }
    return {rq, rk};
}

/// ||i d psi_t/dt - Omega psi_t|| with a centered difference of step h.
inline double schrodinger_residual(const Wavefunction& psi, double t, const FreeDynamics& dyn,
                                   double h = 1e-3) {
    const Wavefunction dt = (evolve(t + h, psi, dyn) - evolve(t - h, psi, dyn)) * cplx(0.5 / h);
    return distance(I * dt, omega_apply(evolve(t, psi, dyn), dyn));
}

}  // namespace qcov
