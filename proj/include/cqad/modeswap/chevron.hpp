#pragma once

// Population maps versus drive detuning and interaction time.

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cqad/core/error.hpp"
#include "cqad/effective/model.hpp"
#include "cqad/modeswap/eom.hpp"
#include "cqad/numeric/parallel.hpp"

namespace cqad {

struct ChevronMap {
    std::vector<double> delta_grid;  ///< Delta_21 - Delta
    std::vector<double> tau_grid;
    double reference_delta = 0.0;    ///< Delta - FSR, the EOM detuning at delta_grid = 0
    std::map<std::string, std::vector<std::vector<double>>> population;  ///< [delta][tau]
};

struct ChevronOptions {
    /// Pair whose shifted resonance defines delta = 0; empty references the FSR.
    std::optional<std::pair<std::string, std::string>> resonance_pair;
    EomOptions eom;
    unsigned threads = 1;
};

/// Scans the drive detuning with the model (couplings and shifts) held fixed.
inline ChevronMap chevron_scan(const EffectiveModel& model, const std::vector<double>& delta_grid,
                               const std::vector<double>& tau_grid, const std::string& initial_mode,
                               const std::vector<std::string>& readout_modes, const ChevronOptions& o = {}) {
    require(!delta_grid.empty() && !tau_grid.empty(), ErrorCode::InvalidArgument, "chevron grids must be non-empty");
    ChevronMap map;
    map.delta_grid = delta_grid;
    map.tau_grid = tau_grid;
    if (o.resonance_pair) map.reference_delta = pair_resonance_delta(model, o.resonance_pair->first, o.resonance_pair->second);
    const Eigen::VectorXcd v0 = initial_vector(model, {{initial_mode, 1.0}});
    std::vector<std::size_t> readout;
    for (const auto& r : readout_modes) readout.push_back(model.index_of(r));
    auto columns = parallel_map(
        delta_grid.size(),
        [&](std::size_t i) {
            const auto M = eom_matrix(model, map.reference_delta + delta_grid[i], o.eom.damping);
            const auto tr = integrate_eom(M, model.modes, v0, tau_grid, o.eom);
            std::vector<std::vector<double>> col;
            for (auto r : readout) col.push_back(tr.populations[r]);
            return col;
        },
        o.threads);
    for (std::size_t r = 0; r < readout.size(); ++r) {
        auto& grid = map.population[readout_modes[r]];
        grid.resize(delta_grid.size());
        for (std::size_t i = 0; i < delta_grid.size(); ++i) grid[i] = std::move(columns[i][r]);
    }
    return map;
}

/// Moving average along tau with an odd window; window 1 is the identity.
inline ChevronMap boxcar_smooth(ChevronMap map, std::size_t window) {
    require(window % 2 == 1, ErrorCode::InvalidArgument, "boxcar window must be odd");
    if (window == 1) return map;
    const std::size_t half = window / 2;
    for (auto& [mode, grid] : map.population)
        for (auto& row : grid) {
            std::vector<double> out(row.size());
            for (std::size_t t = 0; t < row.size(); ++t) {
                const std::size_t lo = t >= half ? t - half : 0, hi = std::min(row.size() - 1, t + half);
                double s = 0.0;
                for (std::size_t k = lo; k <= hi; ++k) s += row[k];
                out[t] = s / static_cast<double>(hi - lo + 1);
            }
            row = std::move(out);
        }
    return map;
}

/// RMS difference between map(mode_a)(delta, tau) and map(mode_b)(-delta, tau).
/// The delta grid must be symmetric about zero.
inline double mirror_rms(const ChevronMap& map, const std::string& mode_a, const std::string& mode_b) {
    const auto& A = map.population.at(mode_a);
    const auto& B = map.population.at(mode_b);
    const std::size_t n = map.delta_grid.size();
    for (std::size_t i = 0; i < n; ++i)
        require(std::fabs(map.delta_grid[i] + map.delta_grid[n - 1 - i]) <=
                    1e-9 * std::max(1.0, std::fabs(map.delta_grid[i])),
                ErrorCode::InvalidArgument, "mirror comparison needs a delta grid symmetric about zero");
    double s = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t t = 0; t < map.tau_grid.size(); ++t) {
            const double d = A[i][t] - B[n - 1 - i][t];
            s += d * d;
            ++count;
        }
    return std::sqrt(s / static_cast<double>(count));
}

}  // namespace cqad
