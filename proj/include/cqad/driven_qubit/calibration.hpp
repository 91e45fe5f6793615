#pragma once

// Conversion factor between DAC amplitude and drive strength, from the qubit
// frequency shift of a single drive.

#include <algorithm>
#include <cmath>
#include <vector>

#include "cqad/core/error.hpp"
#include "cqad/driven_qubit/stark.hpp"
#include "cqad/numeric/optimize.hpp"

namespace cqad {

struct CalibrationPoint {
    double dac_amplitude = 0.0;
    double qubit_frequency = 0.0;  ///< measured, rad/us
};

struct CalibrationResult {
    double eta = 0.0;
    double fit_residual = 0.0;  ///< sum of squared frequency residuals
};

/// Fits omega(A) = omega_q - 2 (eta A)^2 alpha / (Delta (alpha + Delta)) for eta.
inline CalibrationResult calibrate_eta(const std::vector<CalibrationPoint>& data, double Delta, double alpha,
                                       double omega_q) {
    require(data.size() >= 3, ErrorCode::InvalidArgument, "calibration needs at least 3 points");
    require(std::any_of(data.begin(), data.end(), [](const auto& p) { return p.dac_amplitude != 0.0; }),
            ErrorCode::FitError, "all DAC amplitudes are zero");
    for (std::size_t i = 0; i < data.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            require(data[i].dac_amplitude != data[j].dac_amplitude, ErrorCode::InvalidArgument,
                    "calibration DAC amplitudes must be distinct");
    const double unit = stark_shift_single_drive(1.0, Delta, alpha);  // shift per unit Omega^2
    auto residual = [&](double eta) {
        double r = 0.0;
        for (const auto& p : data) {
            const double model = omega_q + unit * std::pow(eta * p.dac_amplitude, 2);
            r += std::pow(model - p.qubit_frequency, 2);
        }
        return r;
    };
    // linear least squares in eta^2 only brackets the search
    double num = 0.0, den = 0.0;
    for (const auto& p : data) {
        const double k = unit * std::pow(p.dac_amplitude, 2);
        num += k * (p.qubit_frequency - omega_q);
        den += k * k;
    }
    require(den > 0.0, ErrorCode::FitError, "all DAC amplitudes are zero");
    const double u = num / den;
    require(u > 0.0 && std::isfinite(u), ErrorCode::FitError, "measured shifts have the wrong sign for any eta");
    const double guess = std::sqrt(u);
    const auto r = opt::brent_minimize(residual, 0.0, 3.0 * guess, 1e-12);
    require(r.converged, ErrorCode::FitError, "calibration fit did not converge");
    return {r.x, r.fx};
}

}  // namespace cqad
