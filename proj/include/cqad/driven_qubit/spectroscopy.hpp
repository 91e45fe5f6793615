#pragma once

// Steady-state probe spectroscopy of the modulated qubit.

#include <cmath>
#include <vector>

#include "cqad/core/error.hpp"
#include "cqad/core/types.hpp"
#include "cqad/driven_qubit/sidebands.hpp"

namespace cqad {

struct ProbeConfig {
    std::vector<double> omega_p_list;
    double Omega_p = 0.0;
};

struct SpectroscopyCurve {
    std::vector<double> frequencies;
    std::vector<double> p_e;
};

/// Excited-state population of a weakly probed qubit whose line is split into
/// sidebands n with Rabi rates J_n Omega_p.
inline SpectroscopyCurve spectroscopy_response(const DeviceParameters& dev, const DriveConfiguration& drive,
                                               const ProbeConfig& probe, int n_max = -1) {
    validate(dev.qubit);
    require(probe.Omega_p >= 0.0 && std::isfinite(probe.Omega_p), ErrorCode::NegativeProbeStrength,
            "Omega_p >= 0");
    const SidebandSpectrum s = modulation_depth(drive, dev.qubit, n_max);
    const double t1 = dev.qubit.t1, t2 = dev.qubit.t2_star;
    const double center = dev.qubit.omega_q + s.delta_q_ss;
    SpectroscopyCurve c;
    c.frequencies = probe.omega_p_list;
    c.p_e.reserve(probe.omega_p_list.size());
    const int nm = s.amplitudes.n_max;
    for (double w : probe.omega_p_list) {
        double pe = 0.0;
        for (int n = -nm; n <= nm; ++n) {
            const double rabi2 = std::pow(s.J(n) * probe.Omega_p, 2) * t1 * t2;
            const double det = t2 * (w - center - n * s.delta_21);
            pe += 0.5 * rabi2 / (1.0 + det * det + rabi2);
        }
        c.p_e.push_back(pe);
    }
    return c;
}

}  // namespace cqad
