#pragma once

#include <cmath>

#include "cqad/core/error.hpp"
#include "cqad/modeswap/eom.hpp"
#include "cqad/numeric/spectral.hpp"

namespace cqad {

/// Dominant angular frequency of a mode's population oscillation.
inline double exchange_frequency(const AmplitudeTrajectory& traj, const std::string& mode) {
    return spectral::dominant_frequency(traj.times, traj.population(mode)).omega;
}

struct BrightDarkAnalysis {
    double g_bs = 0.0;
    double g_bright = 0.0;
    double bright_shift = 0.0;
    double dark_shift = 0.0;
    double resonance_offset_bc = 0.0;
    double resonance_offset_ab = 0.0;
    double predicted_exchange_freq = 0.0;
    double predicted_min_b_population = 0.0;
};

/// Hybridizes a and c into bright and dark modes; b couples only to the
/// bright one, detuned from it by g_ac.
inline BrightDarkAnalysis bright_dark(double g_ab, double g_bc, double g_ac, double tolerance = 0.2) {
    const double big = std::max(std::fabs(g_ab), std::fabs(g_bc));
    require(big > 0.0, ErrorCode::AssumptionViolated, "bright/dark analysis needs nonzero g_ab, g_bc");
    require(std::fabs(std::fabs(g_ab) - std::fabs(g_bc)) <= tolerance * big, ErrorCode::AssumptionViolated,
            "|g_ab| and |g_bc| differ by more than the tolerance");
    BrightDarkAnalysis r;
    r.g_bs = 0.5 * (std::fabs(g_ab) + std::fabs(g_bc));
    r.g_bright = std::sqrt(2.0) * r.g_bs;
    r.bright_shift = g_ac;
    r.dark_shift = -g_ac;
    r.resonance_offset_bc = -g_ac;
    r.resonance_offset_ab = g_ac;
    const double rabi2 = 8.0 * r.g_bs * r.g_bs + g_ac * g_ac;
    r.predicted_exchange_freq = std::sqrt(rabi2);
    r.predicted_min_b_population = g_ac * g_ac / rabi2;
    return r;
}

}  // namespace cqad
