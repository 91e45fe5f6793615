#pragma once

// Shared domain types: qubit, phonon ladder, drives and the derived drive
// frame. All frequencies in rad/us, all times in us.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cqad/core/error.hpp"
#include "cqad/core/units.hpp"

namespace cqad {

struct QubitParams {
    double omega_q = 0.0;  ///< bare g-e frequency
    double alpha = 0.0;    ///< anharmonicity, positive; the Hamiltonian carries -alpha/2 q^dag^2 q^2
    double t1 = 0.0;
    double t2_star = 0.0;
    double t2_echo = 0.0;  ///< stored for completeness, not used by any model
};

struct ModeSpec {
    std::string label;
    double omega_m = 0.0;
    double g_m = 0.0;      ///< real qubit-phonon coupling
    double gamma_m = 0.0;  ///< energy decay rate
};

struct ModeLadder {
    std::vector<ModeSpec> modes;  ///< ascending in omega_m
    double fsr = 0.0;

    std::size_t size() const { return modes.size(); }

    std::optional<std::size_t> find(const std::string& label) const {
        for (std::size_t i = 0; i < modes.size(); ++i)
            if (modes[i].label == label) return i;
        return std::nullopt;
    }

    std::size_t index_of(const std::string& label) const {
        auto idx = find(label);
        require(idx.has_value(), ErrorCode::UnknownMode, "no mode labelled '" + label + "'");
        return *idx;
    }

    const ModeSpec& at(const std::string& label) const { return modes[index_of(label)]; }
};

struct DriveConfiguration {
    double omega_1 = 0.0;
    double omega_2 = 0.0;
    double Omega_1 = 0.0;
    double Omega_2 = 0.0;
    double phi = 0.0;
};

struct DeviceParameters {
    QubitParams qubit;
    ModeLadder ladder;
};

/// Quantities derived once from a device and a drive configuration.
struct DriveFrame {
    double delta_1 = 0.0;   ///< omega_1 - omega_q
    double delta_2 = 0.0;   ///< omega_2 - omega_q
    double delta_21 = 0.0;  ///< delta_2 - delta_1
    double sigma_21 = 0.0;  ///< delta_1 + delta_2
    double xi_1 = 0.0;
    double xi_2 = 0.0;
    double delta_q_ss = 0.0;  ///< -2 alpha (xi_1^2 + xi_2^2)
    double phi = 0.0;
};

namespace detail {
inline void require_finite(double v, const std::string& name) {
    require(std::isfinite(v), ErrorCode::NonFiniteValue, name + " must be finite");
}
}  // namespace detail

inline void validate(const QubitParams& q) {
    detail::require_finite(q.omega_q, "omega_q");
    detail::require_finite(q.alpha, "alpha");
    detail::require_finite(q.t1, "t1");
    detail::require_finite(q.t2_star, "t2_star");
    require(q.omega_q > 0.0, ErrorCode::NonPositiveQubitFrequency, "omega_q > 0");
    require(q.alpha > 0.0, ErrorCode::NonPositiveAnharmonicity, "alpha > 0");
    require(q.t1 > 0.0, ErrorCode::NonPositiveT1, "t1 > 0");
    require(q.t2_star > 0.0, ErrorCode::NonPositiveT2, "t2_star > 0");
    require(q.t2_star <= 2.0 * q.t1, ErrorCode::UnphysicalT2, "t2_star <= 2*t1");
}

inline void validate(const ModeSpec& m) {
    detail::require_finite(m.omega_m, "omega_m of " + m.label);
    detail::require_finite(m.g_m, "g_m of " + m.label);
    detail::require_finite(m.gamma_m, "gamma_m of " + m.label);
    require(m.gamma_m >= 0.0, ErrorCode::NegativeDecayRate, "gamma_m >= 0 for mode " + m.label);
}

/// Validates the ladder. Spacing that deviates from the FSR by more than 5%
/// is reported as a warning, not an error.
inline std::vector<std::string> validate(const ModeLadder& ladder) {
    require(!ladder.modes.empty(), ErrorCode::EmptyLadder, "ladder needs at least one mode");
    detail::require_finite(ladder.fsr, "fsr");
    require(ladder.fsr > 0.0, ErrorCode::NonPositiveFsr, "fsr > 0");
    std::vector<std::string> warnings;
    for (std::size_t i = 0; i < ladder.modes.size(); ++i) {
        validate(ladder.modes[i]);
        for (std::size_t j = 0; j < i; ++j)
            require(ladder.modes[j].label != ladder.modes[i].label, ErrorCode::DuplicateModeLabel,
                    "duplicate mode label " + ladder.modes[i].label);
        if (i == 0) continue;
        const double gap = ladder.modes[i].omega_m - ladder.modes[i - 1].omega_m;
        require(gap > 0.0, ErrorCode::NonAscendingLadder, "mode frequencies must be strictly ascending");
        if (std::abs(gap - ladder.fsr) >= 0.05 * ladder.fsr)
            warnings.push_back("spacing between " + ladder.modes[i - 1].label + " and " + ladder.modes[i].label +
                               " deviates from the FSR by more than 5%");
    }
    return warnings;
}

inline std::vector<std::string> validate(const DeviceParameters& dev) {
    validate(dev.qubit);
    return validate(dev.ladder);
}

inline void validate(const DriveConfiguration& d) {
    detail::require_finite(d.omega_1, "omega_1");
    detail::require_finite(d.omega_2, "omega_2");
    detail::require_finite(d.Omega_1, "Omega_1");
    detail::require_finite(d.Omega_2, "Omega_2");
    detail::require_finite(d.phi, "phi");
    require(d.omega_2 > d.omega_1, ErrorCode::DriveOrder, "omega_2 > omega_1");
    require(d.Omega_1 >= 0.0 && d.Omega_2 >= 0.0, ErrorCode::NegativeDriveAmplitude, "drive amplitudes >= 0");
}

inline DriveFrame derive_frame(const DeviceParameters& dev, const DriveConfiguration& drive) {
    validate(drive);
    DriveFrame f;
    f.delta_1 = drive.omega_1 - dev.qubit.omega_q;
    f.delta_2 = drive.omega_2 - dev.qubit.omega_q;
    require(f.delta_1 != 0.0 && f.delta_2 != 0.0, ErrorCode::ZeroDetuning, "drive detuning from the qubit is zero");
    f.delta_21 = f.delta_2 - f.delta_1;
    f.sigma_21 = f.delta_1 + f.delta_2;
    f.xi_1 = drive.Omega_1 / f.delta_1;
    f.xi_2 = drive.Omega_2 / f.delta_2;
    f.delta_q_ss = -2.0 * dev.qubit.alpha * (f.xi_1 * f.xi_1 + f.xi_2 * f.xi_2);
    f.phi = drive.phi;
    return f;
}

}  // namespace cqad
