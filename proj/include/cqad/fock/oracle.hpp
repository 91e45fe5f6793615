#pragma once

// Single-phonon trajectories from the full displaced-frame Hamiltonian, for
// comparison with the effective equations of motion.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "cqad/core/error.hpp"
#include "cqad/fock/evolve.hpp"
#include "cqad/fock/hamiltonian.hpp"
#include "cqad/modeswap/eom.hpp"
#include "cqad/numeric/parallel.hpp"

namespace cqad {

struct OracleOptions {
    int qubit_levels = 3;
    /// Length of the sin^2 switch-on/off of the qubit-phonon coupling. With a
    /// nonzero ramp every sample is a separate run that dresses the bare
    /// phonon adiabatically and undresses it before readout; zero reads the
    /// bare populations of a single sudden run.
    double ramp_time = 0.0;
    unsigned threads = 1;
    EvolveOptions evolve;
};

/// sin^2 ramps at both ends of [0, total]; the plateau is reached only if total >= 2 ramp.
inline double ramp_envelope(double t, double ramp, double total) {
    auto rise = [&](double s) { return s >= ramp ? 1.0 : std::pow(std::sin(0.5 * std::numbers::pi * s / ramp), 2); };
    return std::min(rise(std::max(t, 0.0)), rise(std::max(total - t, 0.0)));
}

/// Phonon populations of the listed modes after exciting `initial_mode`.
/// Ramped runs last t + 5/4 ramp so that the integral of the squared envelope
/// (which sets the accumulated second-order coupling) equals t.
inline AmplitudeTrajectory oracle_trajectory(const DeviceParameters& dev, const DriveConfiguration& drive,
                                             const std::vector<std::string>& modes, const std::string& initial_mode,
                                             const std::vector<double>& times, const OracleOptions& o = {}) {
    const HilbertLayout layout = HilbertLayout::for_modes(dev.ladder, modes, o.qubit_levels, 2);
    std::vector<int> occ(layout.mode_count() + 1, 0);
    occ[layout.factor_of(initial_mode)] = 1;
    const QuantumState psi0 = basis_state(layout, occ);
    std::vector<std::string> labels;
    for (const auto& [l, c] : layout.modes()) labels.push_back(l);

    AmplitudeTrajectory tr;
    tr.times = times;
    tr.modes = labels;
    tr.populations.assign(labels.size(), std::vector<double>(times.size()));
    auto record = [&](std::size_t i, const QuantumState& s) {
        for (std::size_t m = 0; m < labels.size(); ++m) tr.populations[m][i] = fock_populations(layout, s, labels[m])[1];
    };
    if (o.ramp_time <= 0.0) {
        const auto states = evolve_schrodinger(build_hamiltonian(dev, drive, layout, Frame::Displaced), psi0, times, o.evolve);
        for (std::size_t i = 0; i < times.size(); ++i) record(i, states[i]);
        return tr;
    }
    for (double t : times) require(t >= 0.0, ErrorCode::InvalidArgument, "times must be >= 0");
    const double ramp = o.ramp_time;
    const auto finals = parallel_map(
        times.size(),
        [&](std::size_t i) {
            const double total = times[i] + 1.25 * ramp;
            HamiltonianOptions ho;
            ho.jc_envelope = [=](double t) { return ramp_envelope(t, ramp, total); };
            return evolve_schrodinger(build_hamiltonian(dev, drive, layout, Frame::Displaced, ho), psi0, {0.0, total},
                                      o.evolve)
                .back();
        },
        o.threads);
    for (std::size_t i = 0; i < times.size(); ++i) record(i, finals[i]);
    return tr;
}

/// Root-mean-square population difference over the common modes and times.
inline double population_rms(const AmplitudeTrajectory& a, const AmplitudeTrajectory& b) {
    require(a.times.size() == b.times.size(), ErrorCode::InvalidArgument, "trajectories have different time grids");
    double s = 0.0;
    std::size_t n = 0;
    for (std::size_t m = 0; m < a.modes.size(); ++m) {
        const auto it = std::find(b.modes.begin(), b.modes.end(), a.modes[m]);
        if (it == b.modes.end()) continue;
        const auto& pb = b.populations[static_cast<std::size_t>(it - b.modes.begin())];
        for (std::size_t t = 0; t < a.times.size(); ++t, ++n) s += std::pow(a.populations[m][t] - pb[t], 2);
    }
    require(n > 0, ErrorCode::InvalidArgument, "trajectories share no modes");
    return std::sqrt(s / static_cast<double>(n));
}

}  // namespace cqad
