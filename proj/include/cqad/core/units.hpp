#pragma once

// Frequencies are angular (rad/us) everywhere inside the library. Config files
// and CSV output use ordinary frequency in MHz; these helpers are the only
// place the factor 2*pi appears.

#include <cmath>
#include <numbers>

namespace cqad {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// MHz (cycles per microsecond) to rad/us.
constexpr double to_angular(double frequency_mhz) { return two_pi * frequency_mhz; }

/// kHz to rad/us.
constexpr double khz_to_angular(double frequency_khz) { return two_pi * frequency_khz * 1e-3; }

/// rad/us to MHz.
constexpr double to_mhz(double angular) { return angular / two_pi; }

/// rad/us to kHz.
constexpr double to_khz(double angular) { return angular / two_pi * 1e3; }

}  // namespace cqad
