#pragma once

// N-mode effective beam-splitter model.

#include <algorithm>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cqad/core/error.hpp"
#include "cqad/core/types.hpp"
#include "cqad/driven_qubit/sidebands.hpp"
#include "cqad/effective/coupling.hpp"

namespace cqad {

struct EffectiveModel {
    std::vector<std::string> modes;      ///< ascending in frequency
    std::vector<int> positions;          ///< ladder index of each mode
    std::vector<double> omega;           ///< bare mode frequencies
    std::vector<double> detunings_tilde;
    std::vector<double> shifts;
    Eigen::MatrixXd couplings;           ///< symmetric, zero diagonal
    std::vector<double> decay;
    double delta_21 = 0.0;
    double fsr = 0.0;
    double phi = 0.0;

    std::size_t size() const { return modes.size(); }

    std::size_t index_of(const std::string& label) const {
        const auto it = std::find(modes.begin(), modes.end(), label);
        require(it != modes.end(), ErrorCode::UnknownMode, "mode '" + label + "' not in the model");
        return static_cast<std::size_t>(it - modes.begin());
    }

    double g(const std::string& a, const std::string& b) const { return couplings(index_of(a), index_of(b)); }
    double shift(const std::string& a) const { return shifts[index_of(a)]; }

    /// Hermitian coupling matrix with the drive-phase factors exp(i step phi).
    Eigen::MatrixXcd coupling_matrix() const {
        const auto n = static_cast<Eigen::Index>(size());
        Eigen::MatrixXcd m = couplings.cast<std::complex<double>>();
        if (phi != 0.0)
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j < n; ++j)
                    m(i, j) *= std::polar(1.0, (positions[j] - positions[i]) * phi);
        return m;
    }
};

struct ModelOptions {
    SidebandSumOptions sums;
    double delta_21_override = 0.0;  ///< nonzero replaces the drive difference frequency in the sums
};

/// Builds the effective model for the labelled subset (all modes if empty)
/// from a precomputed sideband spectrum.
inline EffectiveModel build_effective_model(const DeviceParameters& dev, const SidebandSpectrum& s,
                                            std::vector<std::string> subset = {}, const ModelOptions& o = {}) {
    if (subset.empty())
        for (const auto& m : dev.ladder.modes) subset.push_back(m.label);
    require(subset.size() >= 2, ErrorCode::InvalidArgument, "effective model needs at least two modes");
    std::vector<std::size_t> idx;
    for (const auto& l : subset) idx.push_back(dev.ladder.index_of(l));
    std::sort(idx.begin(), idx.end());
    require(std::adjacent_find(idx.begin(), idx.end()) == idx.end(), ErrorCode::DuplicateModeLabel,
            "mode subset lists a mode twice");

    EffectiveModel m;
    m.delta_21 = o.delta_21_override != 0.0 ? o.delta_21_override : s.delta_21;
    m.phi = s.phi;
    m.fsr = dev.ladder.fsr;
    const auto n = idx.size();
    m.couplings = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (auto i : idx) {
        const auto& spec = dev.ladder.modes[i];
        m.modes.push_back(spec.label);
        m.positions.push_back(static_cast<int>(i));
        m.omega.push_back(spec.omega_m);
        const double dt = detuning_tilde(spec, dev.qubit, s);
        m.detunings_tilde.push_back(dt);
        m.shifts.push_back(phonon_shift(spec.g_m, dt, m.delta_21, s, o.sums));
        m.decay.push_back(spec.gamma_m);
    }
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) {
            const auto& lo = dev.ladder.modes[idx[a]];
            const auto& hi = dev.ladder.modes[idx[b]];
            const int step = static_cast<int>(idx[b] - idx[a]);
            const double g = coupling(lo.g_m, m.detunings_tilde[a], hi.g_m, m.detunings_tilde[b], step, m.delta_21, s,
                                      o.sums);
            m.couplings(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = g;
            m.couplings(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = g;
        }
    return m;
}

inline EffectiveModel build_effective_model(const DeviceParameters& dev, const DriveConfiguration& drive,
                                            std::vector<std::string> subset = {}, const ModelOptions& o = {}) {
    validate(dev);
    const SidebandSpectrum s = modulation_depth(drive, dev.qubit, o.sums.n_max);
    return build_effective_model(dev, s, std::move(subset), o);
}

}  // namespace cqad
