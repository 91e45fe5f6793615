#pragma once

// Single-excitation equations of motion of the coupled phonon modes in the
// frame co-rotating with the drive comb. Mode m at ladder position p_m is
// referenced to the lowest model mode r:
//   M_mm = (w_m - w_r - (p_m - p_r) FSR) + (delta_m - delta_r) - (p_m - p_r) delta - i Gamma_m / 2
//   M_mk = g_mk
// with delta = Delta_21 - FSR, and i dv/dt = M v.

#include <complex>
#include <map>
#include <string>
#include <unsupported/Eigen/MatrixFunctions>
#include <vector>

#include <Eigen/Dense>

#include "cqad/core/error.hpp"
#include "cqad/effective/model.hpp"
#include "cqad/numeric/ode.hpp"

namespace cqad {

enum class DampingConvention {
    Half,  ///< -i Gamma/2 on amplitudes: populations decay at Gamma
    Full,  ///< -i Gamma on amplitudes
};

enum class Integrator { RungeKutta, MatrixExponential };

struct EomOptions {
    DampingConvention damping = DampingConvention::Half;
    Integrator integrator = Integrator::MatrixExponential;
    double rtol = 1e-9;
    double atol = 1e-12;
};

struct AmplitudeTrajectory {
    std::vector<double> times;
    std::vector<std::string> modes;
    std::vector<Eigen::VectorXcd> amplitudes;  ///< one vector per time
    std::vector<std::vector<double>> populations;  ///< populations[mode][time]

    const std::vector<double>& population(const std::string& mode) const {
        for (std::size_t i = 0; i < modes.size(); ++i)
            if (modes[i] == mode) return populations[i];
        fail(ErrorCode::UnknownMode, "mode '" + mode + "' not in trajectory");
    }

    double total(std::size_t t) const { return amplitudes[t].squaredNorm(); }
};

inline Eigen::MatrixXcd eom_matrix(const EffectiveModel& m, double delta, DampingConvention damping = DampingConvention::Half) {
    const auto n = static_cast<Eigen::Index>(m.size());
    Eigen::MatrixXcd M = m.coupling_matrix();
    const double damp = damping == DampingConvention::Half ? 0.5 : 1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const int rel = m.positions[i] - m.positions[0];
        const double eps = m.omega[i] - m.omega[0] - rel * m.fsr;
        const double diag = eps + (m.shifts[i] - m.shifts[0]) - rel * delta;
        M(i, i) = {diag, -damp * m.decay[i]};
    }
    return M;
}

inline Eigen::VectorXcd initial_vector(const EffectiveModel& m, const std::map<std::string, std::complex<double>>& init) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(m.size()));
    for (const auto& [label, amp] : init) v(static_cast<Eigen::Index>(m.index_of(label))) = amp;
    require(v.squaredNorm() <= 1.0 + 1e-12, ErrorCode::InvalidState, "initial amplitudes exceed unit norm");
    return v;
}

inline AmplitudeTrajectory integrate_eom(const Eigen::MatrixXcd& M, const std::vector<std::string>& labels,
                                         const Eigen::VectorXcd& v0, const std::vector<double>& times,
                                         const EomOptions& o = {}) {
    require(!times.empty(), ErrorCode::InvalidArgument, "time grid is empty");
    for (std::size_t i = 1; i < times.size(); ++i)
        require(times[i] > times[i - 1], ErrorCode::InvalidArgument, "times must be ascending");
    AmplitudeTrajectory tr;
    tr.times = times;
    tr.modes = labels;
    const Eigen::MatrixXcd A = std::complex<double>(0.0, -1.0) * M;
    if (o.integrator == Integrator::RungeKutta) {
        std::vector<double> grid = times;
        Eigen::VectorXcd start = v0;
        if (times.front() != 0.0) {
            grid.insert(grid.begin(), 0.0);
            require(times.front() > 0.0, ErrorCode::InvalidArgument, "times must be non-negative");
        }
        ode::Options oo;
        oo.rtol = o.rtol;
        oo.atol = o.atol;
        auto ys = ode::integrate([&](double, const Eigen::VectorXcd& y) -> Eigen::VectorXcd { return A * y; }, start,
                                 grid, oo);
        if (times.front() != 0.0) ys.erase(ys.begin());
        tr.amplitudes = std::move(ys);
    } else {
        tr.amplitudes.reserve(times.size());
        Eigen::VectorXcd v = (A * times.front()).exp() * v0;
        tr.amplitudes.push_back(v);
        Eigen::MatrixXcd U;
        double last_dt = -1.0;
        for (std::size_t i = 1; i < times.size(); ++i) {
            const double dt = times[i] - times[i - 1];
            if (std::fabs(dt - last_dt) > 1e-12 * std::max(1.0, dt)) {
                U = (A * dt).exp();
                last_dt = dt;
            }
            v = U * v;
            tr.amplitudes.push_back(v);
        }
    }
    tr.populations.assign(labels.size(), std::vector<double>(times.size()));
    for (std::size_t t = 0; t < times.size(); ++t)
        for (std::size_t m = 0; m < labels.size(); ++m)
            tr.populations[m][t] = std::norm(tr.amplitudes[t](static_cast<Eigen::Index>(m)));
    return tr;
}

/// Integrates the model at drive detuning delta = Delta_21 - FSR.
inline AmplitudeTrajectory integrate_eom(const EffectiveModel& m,
                                         const std::map<std::string, std::complex<double>>& initial, double delta,
                                         const std::vector<double>& times, const EomOptions& o = {}) {
    return integrate_eom(eom_matrix(m, delta, o.damping), m.modes, initial_vector(m, initial), times, o);
}

/// Value of delta = Delta_21 - FSR at which modes lo and hi of the model are
/// degenerate in the rotating frame.
inline double pair_resonance_delta(const EffectiveModel& m, const std::string& lo, const std::string& hi) {
    const auto i = m.index_of(lo), k = m.index_of(hi);
    const int rel = m.positions[k] - m.positions[i];
    require(rel != 0, ErrorCode::InvalidArgument, "pair must be two different modes");
    const double gap = (m.omega[k] - m.omega[i] - rel * m.fsr) + (m.shifts[k] - m.shifts[i]);
    return gap / rel;
}

inline std::vector<double> uniform_grid(double t0, double t1, std::size_t n) {
    require(n >= 2, ErrorCode::InvalidArgument, "grid needs two points");
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n - 1);
    return g;
}

}  // namespace cqad
