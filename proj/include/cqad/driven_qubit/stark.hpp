#pragma once

// Drive-induced shifts of the lowest qubit transition.

#include <cmath>

#include "cqad/core/error.hpp"
#include "cqad/core/types.hpp"

namespace cqad {

/// Static shift of the g-e transition from one off-resonant drive, including
/// the second excited level: -2 Omega^2 alpha / (Delta (alpha + Delta)).
inline double stark_shift_single_drive(double Omega, double Delta, double alpha) {
    require(Delta != 0.0 && Delta + alpha != 0.0, ErrorCode::SingularDetuning,
            "stark shift is singular at Delta = 0 and Delta = -alpha");
    return -2.0 * Omega * Omega * alpha / (Delta * (alpha + Delta));
}

/// Corrected static shift summed over both drives.
inline double static_stark_shift(const QubitParams& q, const DriveConfiguration& d, const DriveFrame& f) {
    return stark_shift_single_drive(d.Omega_1, f.delta_1, q.alpha) +
           stark_shift_single_drive(d.Omega_2, f.delta_2, q.alpha);
}

/// Bare modulation amplitude -4 alpha Omega_1 Omega_2 / (Delta_1 Delta_2).
inline double lambda_raw(double Omega_1, double Omega_2, double Delta_1, double Delta_2, double alpha) {
    require(Delta_1 != 0.0 && Delta_2 != 0.0, ErrorCode::ZeroDetuning, "drive detuning is zero");
    return -4.0 * alpha * Omega_1 * Omega_2 / (Delta_1 * Delta_2);
}

/// Modulation amplitude corrected for the second excited level.
inline double lambda_corrected(double Omega_1, double Omega_2, double Delta_1, double Delta_2, double alpha) {
    require(Delta_1 != 0.0 && Delta_2 != 0.0 && Delta_1 + alpha != 0.0 && Delta_2 + alpha != 0.0,
            ErrorCode::SingularDetuning, "modulation amplitude is singular at Delta = 0 or Delta = -alpha");
    return -2.0 * alpha * Omega_1 * Omega_2 * (1.0 / (Delta_1 * (Delta_1 + alpha)) + 1.0 / (Delta_2 * (Delta_2 + alpha)));
}

/// Ratio Lambda'/Omega_1 Omega_2, handy for choosing amplitudes.
inline double lambda_corrected_per_amplitude2(double Delta_1, double Delta_2, double alpha) {
    return lambda_corrected(1.0, 1.0, Delta_1, Delta_2, alpha);
}

}  // namespace cqad
