#pragma once

// Least-squares fit of chevron population maps to the five-mode equations of
// motion. Modes d, a, b, c, e sit on consecutive ladder positions 0..4 and
// are referenced to d:
//   M_kk = delta_dk - k delta - i Gamma_k / 2,  M_mk = g_mk
// with delta = Delta_21 - FSR, matching integrate_eom.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cqad/core/error.hpp"
#include "cqad/core/units.hpp"
#include "cqad/effective/model.hpp"
#include "cqad/modeswap/chevron.hpp"
#include "cqad/modeswap/eom.hpp"
#include "cqad/numeric/optimize.hpp"
#include "cqad/numeric/parallel.hpp"

namespace cqad {

using ParamMap = std::map<std::string, double>;

inline const std::array<std::string, 5> fit_modes{"d", "a", "b", "c", "e"};

inline std::string coupling_name(std::size_t i, std::size_t k) {
    if (i > k) std::swap(i, k);
    return "g_" + fit_modes[i] + fit_modes[k];
}

/// Every parameter of the five-mode model.
inline std::vector<std::string> fit_parameter_names() {
    std::vector<std::string> names;
    for (std::size_t k = 1; k < 5; ++k) names.push_back("delta_d" + fit_modes[k]);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t k = i + 1; k < 5; ++k) names.push_back(coupling_name(i, k));
    for (const auto& m : fit_modes) names.push_back("gamma_" + m);
    return names;
}

inline std::vector<std::string> default_free_parameters() {
    return {"delta_da", "delta_db", "delta_dc", "delta_de", "g_ab", "g_bc", "g_ac"};
}

inline constexpr double coupling_bound = khz_to_angular(200.0);
inline constexpr double detuning_bound = khz_to_angular(500.0);

inline bool within_bounds(const std::string& name, double v) {
    if (!std::isfinite(v)) return false;
    if (name.starts_with("g_")) return std::fabs(v) < coupling_bound;
    if (name.starts_with("delta_")) return std::fabs(v) < detuning_bound;
    return v >= 0.0;
}

/// Couplings between modes an odd number of ladder steps apart. Flipping all
/// of them is the gauge freedom of the populations.
inline std::vector<std::string> odd_distance_couplings() {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t k = i + 1; k < 5; ++k)
            if ((k - i) % 2 == 1) out.push_back(coupling_name(i, k));
    return out;
}

inline ParamMap gauge_flip(ParamMap p) {
    for (const auto& n : odd_distance_couplings()) p.at(n) = -p.at(n);
    return p;
}

inline void validate_params(const ParamMap& p) {
    for (const auto& n : fit_parameter_names()) {
        const auto it = p.find(n);
        require(it != p.end(), ErrorCode::InvalidArgument, "parameter '" + n + "' missing");
        require(within_bounds(n, it->second), ErrorCode::BoundsViolation, "parameter '" + n + "' out of bounds");
    }
    require(p.size() == 15 + 4, ErrorCode::InvalidArgument, "unknown fit parameter");
}

inline EffectiveModel fit_model(const ParamMap& p) {
    EffectiveModel m;
    m.modes.assign(fit_modes.begin(), fit_modes.end());
    m.positions = {0, 1, 2, 3, 4};
    m.omega.assign(5, 0.0);
    m.detunings_tilde.assign(5, 0.0);
    m.shifts = {0.0, p.at("delta_da"), p.at("delta_db"), p.at("delta_dc"), p.at("delta_de")};
    m.couplings = Eigen::MatrixXd::Zero(5, 5);
    for (Eigen::Index i = 0; i < 5; ++i)
        for (Eigen::Index k = i + 1; k < 5; ++k)
            m.couplings(i, k) = m.couplings(k, i) = p.at(coupling_name(static_cast<std::size_t>(i), static_cast<std::size_t>(k)));
    for (const auto& l : fit_modes) m.decay.push_back(p.at("gamma_" + l));
    return m;
}

/// Parameters predicted by an effective model of five consecutive modes.
/// Ladder non-uniformity is folded into the relative shifts.
inline ParamMap predicted_parameters(const EffectiveModel& m) {
    require(m.size() == 5, ErrorCode::InvalidArgument, "the fit model needs five modes");
    for (std::size_t i = 1; i < 5; ++i)
        require(m.positions[i] == m.positions[0] + static_cast<int>(i), ErrorCode::InvalidArgument,
                "fit modes must be consecutive on the ladder");
    ParamMap p;
    for (std::size_t k = 1; k < 5; ++k)
        p["delta_d" + fit_modes[k]] =
            (m.omega[k] - m.omega[0] - static_cast<double>(k) * m.fsr) + (m.shifts[k] - m.shifts[0]);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t k = i + 1; k < 5; ++k)
            p[coupling_name(i, k)] = m.couplings(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < 5; ++i) p["gamma_" + fit_modes[i]] = m.decay[i];
    return p;
}

struct ChevronDataset {
    std::vector<double> delta_grid;  ///< Delta_21 - FSR
    std::vector<double> tau_grid;
    std::map<std::string, std::vector<std::vector<double>>> population;  ///< [delta][tau]
    std::map<std::string, double> initial;  ///< populations at tau = 0
    double readout_g_infidelity = 0.0;
};

inline void validate(const ChevronDataset& d) {
    require(!d.delta_grid.empty() && !d.tau_grid.empty(), ErrorCode::InvalidArgument, "dataset grids are empty");
    for (std::size_t i = 1; i < d.delta_grid.size(); ++i)
        require(d.delta_grid[i] > d.delta_grid[i - 1], ErrorCode::InvalidArgument, "delta grid must ascend");
    for (std::size_t i = 1; i < d.tau_grid.size(); ++i)
        require(d.tau_grid[i] > d.tau_grid[i - 1], ErrorCode::InvalidArgument, "tau grid must ascend");
    require(d.tau_grid.front() >= 0.0, ErrorCode::InvalidArgument, "tau must be non-negative");
    require(!d.population.empty(), ErrorCode::InvalidArgument, "dataset has no modes");
    require(d.readout_g_infidelity >= 0.0 && d.readout_g_infidelity < 1.0, ErrorCode::InvalidArgument,
            "readout infidelity must lie in [0, 1)");
    for (const auto& [mode, grid] : d.population) {
        require(std::find(fit_modes.begin(), fit_modes.end(), mode) != fit_modes.end(), ErrorCode::UnknownMode,
                "mode '" + mode + "' is not a fit mode");
        require(grid.size() == d.delta_grid.size(), ErrorCode::InvalidArgument, "population shape mismatch");
        for (const auto& row : grid) {
            require(row.size() == d.tau_grid.size(), ErrorCode::InvalidArgument, "population shape mismatch");
            for (double p : row)
                require(p >= 0.0 && p <= 1.0, ErrorCode::InvalidState, "population outside [0, 1]");
        }
    }
    for (const auto& [mode, p] : d.initial) {
        require(std::find(fit_modes.begin(), fit_modes.end(), mode) != fit_modes.end(), ErrorCode::UnknownMode,
                "mode '" + mode + "' is not a fit mode");
        require(p >= 0.0 && p <= 1.0, ErrorCode::InvalidState, "initial population outside [0, 1]");
    }
}

/// Initial populations from the first tau column (averaged over delta).
inline std::map<std::string, double> initial_from_first_column(const ChevronDataset& d) {
    std::map<std::string, double> out;
    for (const auto& [mode, grid] : d.population) {
        double s = 0.0;
        for (const auto& row : grid) s += row.front();
        out[mode] = s / static_cast<double>(grid.size());
    }
    return out;
}

enum class InitialState {
    Mixed,     ///< incoherent populations, gauge invariant
    Coherent,  ///< real amplitudes sqrt(p) in one superposition
};

/// Initial columns after readout correction, renormalized if the corrected
/// populations exceed one. Mixed gives one weighted basis column per mode.
inline Eigen::MatrixXcd fit_initial_columns(const ChevronDataset& d, InitialState kind = InitialState::Mixed) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(5);
    for (const auto& [mode, pop] : d.initial) {
        const auto i = static_cast<Eigen::Index>(std::find(fit_modes.begin(), fit_modes.end(), mode) - fit_modes.begin());
        p(i) = std::max(0.0, pop - d.readout_g_infidelity);
    }
    if (p.sum() > 1.0) p /= p.sum();
    if (kind == InitialState::Coherent) return p.cwiseSqrt().cast<std::complex<double>>();
    std::vector<Eigen::Index> used;
    for (Eigen::Index i = 0; i < 5; ++i)
        if (p(i) > 0.0) used.push_back(i);
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(5, std::max<Eigen::Index>(1, static_cast<Eigen::Index>(used.size())));
    for (std::size_t c = 0; c < used.size(); ++c) v(used[c], static_cast<Eigen::Index>(c)) = std::sqrt(p(used[c]));
    return v;
}

struct FitOptions {
    opt::NelderMeadOptions simplex{6000, 1e-4, std::numeric_limits<double>::infinity(), {}};  // converge on parameter updates
    int restarts = 2;           ///< fresh simplices around the incumbent
    int random_starts = 0;      ///< extra starts scattered around init
    unsigned seed = 1;
    DampingConvention damping = DampingConvention::Half;
    InitialState initial = InitialState::Mixed;
    unsigned threads = 1;
};

/// Model populations for each dataset mode on the dataset grid.
inline std::map<std::string, std::vector<std::vector<double>>> simulate_chevron(const ParamMap& p,
                                                                              const ChevronDataset& d,
                                                                              const FitOptions& o = {}) {
    const EffectiveModel m = fit_model(p);
    const Eigen::MatrixXcd v0 = fit_initial_columns(d, o.initial);
    auto cols = parallel_map(
        d.delta_grid.size(),
        [&](std::size_t i) {
            const Eigen::MatrixXcd A = std::complex<double>(0.0, -1.0) * eom_matrix(m, d.delta_grid[i], o.damping);
            std::vector<std::vector<double>> pop(5, std::vector<double>(d.tau_grid.size()));
            Eigen::MatrixXcd v = (A * d.tau_grid.front()).exp() * v0, U;
            double last_dt = -1.0;
            for (std::size_t t = 0; t < d.tau_grid.size(); ++t) {
                if (t > 0) {
                    const double dt = d.tau_grid[t] - d.tau_grid[t - 1];
                    if (std::fabs(dt - last_dt) > 1e-12 * std::max(1.0, dt)) {
                        U = (A * dt).exp();
                        last_dt = dt;
                    }
                    v = U * v;
                }
                for (std::size_t k = 0; k < 5; ++k) pop[k][t] = v.row(static_cast<Eigen::Index>(k)).squaredNorm();
            }
            return pop;
        },
        o.threads);
    std::map<std::string, std::vector<std::vector<double>>> out;
    for (const auto& [mode, grid] : d.population) {
        const auto k = m.index_of(mode);
        auto& dst = out[mode];
        dst.resize(d.delta_grid.size());
        for (std::size_t i = 0; i < d.delta_grid.size(); ++i) dst[i] = std::move(cols[i][k]);
    }
    return out;
}

/// Sum of squared differences between model and readout-corrected data.
inline double chevron_residual(const ParamMap& p, const ChevronDataset& d, const FitOptions& o = {}) {
    const auto model = simulate_chevron(p, d, o);
    double r = 0.0;
    for (const auto& [mode, grid] : d.population) {
        const auto& mg = model.at(mode);
        for (std::size_t i = 0; i < grid.size(); ++i)
            for (std::size_t t = 0; t < grid[i].size(); ++t) {
                const double e = mg[i][t] - (grid[i][t] - d.readout_g_infidelity);
                r += e * e;
            }
    }
    return r;
}

struct FitResult {
    ParamMap params;                 ///< free and fixed together
    std::vector<std::string> free;
    double residual = 0.0;
    bool converged = false;
    int evaluations = 0;
    std::map<std::string, std::pair<double, double>> error_bars;
};

namespace detail {

/// Optimizer coordinates are in units of 2 pi kHz.
inline constexpr double fit_unit = khz_to_angular(1.0);

}  // namespace detail

inline FitResult fit_chevron(const ChevronDataset& data, const std::vector<std::string>& free, const ParamMap& fixed,
                             const ParamMap& init, const FitOptions& o = {}) {
    validate(data);
    require(!free.empty(), ErrorCode::InvalidArgument, "no free parameters");
    const auto all = fit_parameter_names();
    std::set<std::string> seen;
    for (const auto& n : free) {
        require(std::find(all.begin(), all.end(), n) != all.end(), ErrorCode::InvalidArgument, "unknown parameter '" + n + "'");
        require(!fixed.contains(n), ErrorCode::InvalidArgument, "parameter '" + n + "' is both free and fixed");
        require(seen.insert(n).second, ErrorCode::InvalidArgument, "parameter '" + n + "' listed twice");
        require(init.contains(n), ErrorCode::InvalidArgument, "no initial value for '" + n + "'");
        require(within_bounds(n, init.at(n)), ErrorCode::BoundsViolation, "initial '" + n + "' out of bounds");
    }
    ParamMap base;
    for (const auto& n : all) {
        if (seen.contains(n)) {
            base[n] = init.at(n);
            continue;
        }
        require(fixed.contains(n), ErrorCode::InvalidArgument, "parameter '" + n + "' neither free nor fixed");
        base[n] = fixed.at(n);
    }
    require(fixed.size() + free.size() == all.size(), ErrorCode::InvalidArgument, "unknown fixed parameter");
    validate_params(base);

    int evals = 0;
    auto objective = [&](const std::vector<double>& x) {
        ParamMap p = base;
        for (std::size_t i = 0; i < free.size(); ++i) {
            const double v = x[i] * detail::fit_unit;
            if (!within_bounds(free[i], v)) return std::numeric_limits<double>::infinity();
            p[free[i]] = v;
        }
        ++evals;
        return chevron_residual(p, data, o);
    };
    std::vector<double> x0(free.size());
    for (std::size_t i = 0; i < free.size(); ++i) x0[i] = base[free[i]] / detail::fit_unit;

    opt::NelderMeadOptions nm = o.simplex;
    if (nm.initial_step.empty()) {
        nm.initial_step.resize(free.size());
        for (std::size_t i = 0; i < free.size(); ++i) nm.initial_step[i] = std::max(2.0, 0.1 * std::fabs(x0[i]));
    }
    std::vector<std::vector<double>> starts{x0};
    std::mt19937_64 rng(o.seed);
    std::normal_distribution<double> nd;
    for (int s = 0; s < o.random_starts; ++s) {
        auto x = x0;
        for (auto& v : x) v += nd(rng) * std::max(5.0, 0.2 * std::fabs(v));
        starts.push_back(std::move(x));
    }
    opt::VectorResult best;
    best.fx = std::numeric_limits<double>::infinity();
    for (const auto& s : starts) {
        auto r = opt::nelder_mead(objective, s, nm);
        for (int k = 0; k < o.restarts; ++k) {
            opt::NelderMeadOptions again = nm;
            for (std::size_t i = 0; i < free.size(); ++i)
                again.initial_step[i] = std::max(0.2, 0.02 * std::fabs(r.x[i]));
            auto r2 = opt::nelder_mead(objective, r.x, again);
            const bool stalled = r2.fx >= r.fx * (1.0 - 1e-9);
            if (r2.fx <= r.fx) r = std::move(r2);
            if (stalled) break;
        }
        if (r.fx < best.fx) best = std::move(r);
    }
    require(best.converged, ErrorCode::NoConvergence, "chevron fit did not converge");

    FitResult res;
    res.free = free;
    res.params = base;
    for (std::size_t i = 0; i < free.size(); ++i) res.params[free[i]] = best.x[i] * detail::fit_unit;
    // canonical gauge g_ab > 0 when every odd-distance coupling is free or zero
    const auto odd = odd_distance_couplings();
    const bool gauge_free = std::all_of(odd.begin(), odd.end(), [&](const std::string& n) {
        return seen.contains(n) || res.params.at(n) == 0.0;
    });
    if (gauge_free && res.params.at("g_ab") < 0.0) res.params = gauge_flip(res.params);
    res.residual = best.fx;
    res.converged = true;
    res.evaluations = evals;
    return res;
}

/// Per-parameter intervals where the residual stays below
/// (1 + threshold) times the optimum, other parameters held fixed.
template <class Residual>
std::map<std::string, std::pair<double, double>> residual_intervals(const ParamMap& optimum,
                                                                    const std::vector<std::string>& names,
                                                                    Residual&& residual, double r_min,
                                                                    double threshold = 0.05) {
    require(threshold > 0.0, ErrorCode::InvalidArgument, "threshold must be positive");
    const double target = (1.0 + threshold) * r_min;
    std::map<std::string, std::pair<double, double>> out;
    for (const auto& n : names) {
        const double p0 = optimum.at(n);
        const double scale = std::max(std::fabs(p0), detail::fit_unit);
        auto excess = [&](double h) {
            ParamMap p = optimum;
            p[n] = p0 + h;
            return residual(p) - target;
        };
        auto side = [&](double sign) {
            double lo = 0.0, hi = 1e-3 * scale;
            while (excess(sign * hi) < 0.0) {
                lo = hi;
                hi *= 2.0;
                require(hi <= 10.0 * scale, ErrorCode::Unbounded, "residual of '" + n + "' never crosses the threshold");
            }
            for (int it = 0; it < 200 && hi - lo > 1e-3 * hi; ++it) {
                const double mid = 0.5 * (lo + hi);
                (excess(sign * mid) < 0.0 ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
        };
        out[n] = {p0 - side(-1.0), p0 + side(1.0)};
    }
    return out;
}

inline std::map<std::string, std::pair<double, double>> residual_error_bars(const FitResult& fit,
                                                                            const ChevronDataset& data,
                                                                            double threshold = 0.05,
                                                                            const FitOptions& o = {}) {
    require(fit.converged, ErrorCode::NoConvergence, "error bars need a converged fit");
    return residual_intervals(
        fit.params, fit.free, [&](const ParamMap& p) { return chevron_residual(p, data, o); }, fit.residual,
        threshold);
}

/// Noise-free dataset from the model; tau = 0 populations are `initial`.
inline ChevronDataset synthetic_dataset(const ParamMap& p, const std::vector<double>& delta_grid,
                                        const std::vector<double>& tau_grid,
                                        const std::map<std::string, double>& initial,
                                        const std::vector<std::string>& readout = {"a", "b", "c"},
                                        const FitOptions& o = {}) {
    ChevronDataset d;
    d.delta_grid = delta_grid;
    d.tau_grid = tau_grid;
    d.initial = initial;
    for (const auto& m : readout) d.population[m];
    d.population = simulate_chevron(p, d, o);
    return d;
}

/// Adds Gaussian noise of width sigma, clipped to [0, 1] like measured
/// frequencies; initial populations are re-read from the noisy first column.
inline ChevronDataset add_noise(ChevronDataset d, double sigma, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, sigma);
    for (auto& [mode, grid] : d.population)
        for (auto& row : grid)
            for (auto& v : row) v = std::clamp(v + nd(rng), 0.0, 1.0);
    if (d.tau_grid.front() == 0.0) d.initial = initial_from_first_column(d);
    return d;
}

}  // namespace cqad
