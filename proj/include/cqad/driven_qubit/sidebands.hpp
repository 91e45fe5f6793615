#pragma once

#include <cmath>

#include "cqad/core/types.hpp"
#include "cqad/driven_qubit/stark.hpp"
#include "cqad/specfun/bessel.hpp"

namespace cqad {

struct SidebandSpectrum {
    double lambda_raw = 0.0;
    double lambda_corrected = 0.0;
    double modulation_depth = 0.0;  ///< lambda_corrected / delta_21, signed
    BesselTable amplitudes;         ///< J_n(modulation_depth)
    double delta_q_ss = 0.0;        ///< corrected static shift over both drives
    double delta_q_ss_bare = 0.0;   ///< -2 alpha (xi_1^2 + xi_2^2)
    double delta_21 = 0.0;
    double phi = 0.0;

    double J(int n) const { return amplitudes(n); }
};

/// Default sideband truncation: ceil(|x|) + 15.
inline int default_sideband_cutoff(double modulation_depth) {
    return static_cast<int>(std::ceil(std::fabs(modulation_depth))) + 15;
}

inline SidebandSpectrum modulation_depth(const DriveConfiguration& drive, const QubitParams& qubit, int n_max = -1) {
    validate(qubit);
    DeviceParameters dev;
    dev.qubit = qubit;
    const DriveFrame f = derive_frame(dev, drive);
    SidebandSpectrum s;
    s.lambda_raw = lambda_raw(drive.Omega_1, drive.Omega_2, f.delta_1, f.delta_2, qubit.alpha);
    s.lambda_corrected = lambda_corrected(drive.Omega_1, drive.Omega_2, f.delta_1, f.delta_2, qubit.alpha);
    s.delta_21 = f.delta_21;
    s.modulation_depth = s.lambda_corrected / f.delta_21;
    s.amplitudes = bessel_table(s.modulation_depth, n_max >= 0 ? n_max : default_sideband_cutoff(s.modulation_depth));
    s.delta_q_ss = static_stark_shift(qubit, drive, f);
    s.delta_q_ss_bare = f.delta_q_ss;
    s.phi = drive.phi;
    return s;
}

}  // namespace cqad
