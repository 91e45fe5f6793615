#pragma once

// Second-order phonon frequency shifts and phonon-phonon couplings mediated
// by the modulated qubit.

#include <cmath>
#include <string>

#include "cqad/core/error.hpp"
#include "cqad/core/types.hpp"
#include "cqad/driven_qubit/sidebands.hpp"

namespace cqad {

enum class CouplingForm {
    Symmetrized,  ///< average of the two energy denominators
    MainText,     ///< single denominator of the lower mode
};

struct SidebandSumOptions {
    int n_max = -1;                 ///< -1 uses the spectrum's table
    CouplingForm form = CouplingForm::Symmetrized;
    double collision_ratio = 0.5;   ///< max |g J_n / denominator| before SidebandCollision
};

namespace detail {

inline int sum_cutoff(const SidebandSpectrum& s, int n_max) {
    return n_max >= 0 ? std::min(n_max, s.amplitudes.n_max) : s.amplitudes.n_max;
}

inline double guarded_inverse(double den, double g, double amplitude, double ratio, const std::string& what) {
    require(den != 0.0, ErrorCode::SidebandCollision, what + ": mode sits exactly on a sideband");
    require(std::fabs(g * amplitude / den) <= ratio, ErrorCode::SidebandCollision,
            what + ": sideband too close to the mode for perturbation theory");
    return 1.0 / den;
}

}  // namespace detail

/// Detuning of a mode from the Stark-shifted qubit.
inline double detuning_tilde(const ModeSpec& m, const QubitParams& q, const SidebandSpectrum& s) {
    return m.omega_m - (q.omega_q + s.delta_q_ss);
}

/// delta_m = g_m^2 sum_n J_n^2 / (Dt_m - n Delta_21)
inline double phonon_shift(double g_m, double dt_m, double delta_21, const SidebandSpectrum& s,
                           const SidebandSumOptions& o = {}) {
    if (g_m == 0.0) return 0.0;
    const int nm = detail::sum_cutoff(s, o.n_max);
    double sum = 0.0;
    for (int n = -nm; n <= nm; ++n) {
        const double j = s.J(n);
        if (j == 0.0) continue;
        sum += j * j * detail::guarded_inverse(dt_m - n * delta_21, g_m, j, o.collision_ratio, "phonon_shift");
    }
    return g_m * g_m * sum;
}

inline double phonon_shift(const ModeSpec& m, const QubitParams& q, const SidebandSpectrum& s,
                           const SidebandSumOptions& o = {}) {
    return phonon_shift(m.g_m, detuning_tilde(m, q, s), s.delta_21, s, o);
}

/// Coupling between mode m and the mode `step` ladder positions above it
/// (below it for negative step). Real for phi = 0; the phase factor
/// exp(i step phi) is applied by the caller.
inline double coupling(double g_m, double dt_m, double g_k, double dt_k, int step, double delta_21,
                       const SidebandSpectrum& s, const SidebandSumOptions& o = {}) {
    require(step != 0, ErrorCode::InvalidArgument, "coupling step must be nonzero");
    if (g_m == 0.0 || g_k == 0.0) return 0.0;
    const int nm = detail::sum_cutoff(s, o.n_max);
    double sum = 0.0;
    const int reach = nm + std::abs(step);
    for (int n = -reach; n <= reach; ++n) {
        const double jj = s.J(n) * s.J(n + step);
        if (jj == 0.0) continue;
        const double amp = std::max(std::fabs(s.J(n)), std::fabs(s.J(n + step)));
        const double im = detail::guarded_inverse(dt_m - n * delta_21, std::max(std::fabs(g_m), std::fabs(g_k)), amp,
                                                  o.collision_ratio, "coupling");
        if (o.form == CouplingForm::MainText) {
            sum += jj * im;
        } else {
            const double ik = detail::guarded_inverse(dt_k - (n + step) * delta_21,
                                                      std::max(std::fabs(g_m), std::fabs(g_k)), amp,
                                                      o.collision_ratio, "coupling");
            sum += 0.5 * jj * (im + ik);
        }
    }
    return g_m * g_k * sum;
}

inline double coupling(const ModeSpec& lower, const ModeSpec& upper, int step, const QubitParams& q,
                       const SidebandSpectrum& s, const SidebandSumOptions& o = {}) {
    return coupling(lower.g_m, detuning_tilde(lower, q, s), upper.g_m, detuning_tilde(upper, q, s), step,
                    s.delta_21, s, o);
}

}  // namespace cqad
