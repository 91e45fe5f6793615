#pragma once

// Built-in device profile with the measured parameters of the reference
// HBAR device. Modes d and e flank a, b, c on the FSR ladder; their decay
// rates were not measured, so they take the mean of the measured ones.

#include "cqad/core/types.hpp"
#include "cqad/core/units.hpp"

namespace cqad {

namespace table_s1 {
inline constexpr double omega_q_mhz = 5971.323;
inline constexpr double t1_us = 9.5;
inline constexpr double t2_star_us = 7.2;
inline constexpr double t2_echo_us = 10.3;
inline constexpr double alpha_mhz = 218.0;
inline constexpr double omega_b_mhz = 5948.8;
inline constexpr double gamma_a_khz = 4.7;
inline constexpr double gamma_b_khz = 3.1;
inline constexpr double gamma_c_khz = 2.2;
inline constexpr double g_khz = 257.0;
inline constexpr double fsr_mhz = 12.62955;
inline constexpr double delta_1_mhz = 492.552;  ///< omega_1 - omega_q used throughout
inline constexpr double delta_2_mhz = 505.182;
}  // namespace table_s1

inline DeviceParameters table_s1_device() {
    using namespace table_s1;
    DeviceParameters dev;
    dev.qubit = {to_angular(omega_q_mhz), to_angular(alpha_mhz), t1_us, t2_star_us, t2_echo_us};
    dev.ladder.fsr = to_angular(fsr_mhz);
    const double gamma_mean = (gamma_a_khz + gamma_b_khz + gamma_c_khz) / 3.0;
    const double g = khz_to_angular(g_khz);
    const double wb = to_angular(omega_b_mhz);
    const double fsr = dev.ladder.fsr;
    dev.ladder.modes = {
        {"d", wb - 2.0 * fsr, g, khz_to_angular(gamma_mean)},
        {"a", wb - fsr, g, khz_to_angular(gamma_a_khz)},
        {"b", wb, g, khz_to_angular(gamma_b_khz)},
        {"c", wb + fsr, g, khz_to_angular(gamma_c_khz)},
        {"e", wb + 2.0 * fsr, g, khz_to_angular(gamma_mean)},
    };
    return dev;
}

}  // namespace cqad
