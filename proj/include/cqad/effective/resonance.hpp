#pragma once

// Self-consistent resonance condition, regime selection and design of a
// drive configuration for a target operating point.

#include <cmath>
#include <string>

#include "cqad/core/error.hpp"
#include "cqad/core/types.hpp"
#include "cqad/core/units.hpp"
#include "cqad/driven_qubit/sidebands.hpp"
#include "cqad/effective/coupling.hpp"
#include "cqad/numeric/optimize.hpp"
#include "cqad/specfun/bessel.hpp"

namespace cqad {

struct ResonanceSolution {
    double delta_21_star = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

inline constexpr double default_resonance_tolerance = khz_to_angular(0.01);

/// Finds Delta_21 with step * Delta_21 = (w_k - w_m) + delta_k - delta_m,
/// holding the modulation depth and static Stark shift of `s` fixed.
inline ResonanceSolution resonance_solver(const DeviceParameters& dev, const SidebandSpectrum& s,
                                          const std::string& mode_m, const std::string& mode_k, int step,
                                          double tolerance = default_resonance_tolerance,
                                          const SidebandSumOptions& o = {}) {
    require(step >= 1, ErrorCode::InvalidArgument, "resonance step must be >= 1");
    const auto& m = dev.ladder.at(mode_m);
    const auto& k = dev.ladder.at(mode_k);
    const double bare = k.omega_m - m.omega_m;
    const double dt_m = detuning_tilde(m, dev.qubit, s), dt_k = detuning_tilde(k, dev.qubit, s);
    auto rhs = [&](double d21) {
        return (bare + phonon_shift(k.g_m, dt_k, d21, s, o) - phonon_shift(m.g_m, dt_m, d21, s, o)) / step;
    };
    double d21 = bare / step;
    for (int it = 1; it <= 100; ++it) {
        const double next = rhs(d21);
        const double update = next - d21;
        d21 = next;
        if (std::fabs(update) < tolerance) return {d21, step * (rhs(d21) - d21), it};
    }
    fail(ErrorCode::NoConvergence, "resonance_solver did not converge in 100 iterations");
}

enum class Regime { TwoModeDominant, ThreeModeEqual };

inline constexpr double two_mode_default_depth = 0.61;

inline double regime_finder(Regime target) {
    if (target == Regime::TwoModeDominant) return two_mode_default_depth;
    return opt::brent_root([](double x) { return bessel_j(0, x) - bessel_j(1, x); }, 1.0, 2.0, 1e-14).x;
}

struct OperatingPoint {
    DeviceParameters device;  ///< qubit frequency adjusted to give the requested detuning
    DriveConfiguration drive;
    SidebandSpectrum spectrum;
    ResonanceSolution resonance;
};

struct OperatingPointRequest {
    double modulation_depth = two_mode_default_depth;  ///< |Lambda'/Delta_21|
    std::string reference_mode = "b";
    double detuning_tilde = to_angular(1.0);  ///< Dt of the reference mode
    std::string mode_m = "b";                 ///< lower mode of the resonant pair
    std::string mode_k = "c";
    int step = 1;
    double delta_1 = to_angular(492.552);
};

/// Chooses equal drive amplitudes giving the requested modulation depth and
/// places the Stark-shifted qubit at the requested detuning below the
/// reference mode, then tunes Delta_21 onto the shifted resonance of the pair.
inline OperatingPoint design_operating_point(DeviceParameters dev, const OperatingPointRequest& r,
                                             const SidebandSumOptions& o = {}) {
    validate(dev);
    const double alpha = dev.qubit.alpha;
    const double w_ref = dev.ladder.at(r.reference_mode).omega_m;
    double d21 = (dev.ladder.at(r.mode_k).omega_m - dev.ladder.at(r.mode_m).omega_m) / r.step;
    OperatingPoint p;
    for (int outer = 0; outer < 50; ++outer) {
        const double d2 = r.delta_1 + d21;
        const double per = std::fabs(lambda_corrected_per_amplitude2(r.delta_1, d2, alpha));
        const double amp = std::sqrt(r.modulation_depth * d21 / per);
        const double ss = stark_shift_single_drive(amp, r.delta_1, alpha) + stark_shift_single_drive(amp, d2, alpha);
        dev.qubit.omega_q = w_ref - r.detuning_tilde - ss;
        p.drive = {dev.qubit.omega_q + r.delta_1, dev.qubit.omega_q + d2, amp, amp, 0.0};
        p.spectrum = modulation_depth(p.drive, dev.qubit, o.n_max);
        p.resonance = resonance_solver(dev, p.spectrum, r.mode_m, r.mode_k, r.step, default_resonance_tolerance * 1e-3, o);
        const double change = p.resonance.delta_21_star - d21;
        d21 = p.resonance.delta_21_star;
        if (std::fabs(change) < 1e-9) break;
    }
    // final drive sits exactly on the solved resonance
    const double d2 = r.delta_1 + d21;
    const double per = std::fabs(lambda_corrected_per_amplitude2(r.delta_1, d2, alpha));
    const double amp = std::sqrt(r.modulation_depth * d21 / per);
    const double ss = stark_shift_single_drive(amp, r.delta_1, alpha) + stark_shift_single_drive(amp, d2, alpha);
    dev.qubit.omega_q = w_ref - r.detuning_tilde - ss;
    p.drive = {dev.qubit.omega_q + r.delta_1, dev.qubit.omega_q + d2, amp, amp, 0.0};
    p.spectrum = modulation_depth(p.drive, dev.qubit, o.n_max);
    p.device = dev;
    return p;
}

}  // namespace cqad
