#pragma once

// Adaptive Dormand-Prince 5(4) integrator for complex-valued linear and
// nonlinear systems. The state is any Eigen dense object.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "cqad/core/error.hpp"

namespace cqad::ode {

struct Options {
    double rtol = 1e-9;
    double atol = 1e-12;
    double first_step = 0.0;  ///< 0 lets the integrator pick
    double max_step = 0.0;    ///< 0 means unbounded
    long max_steps = 50'000'000;
};

struct Stats {
    long accepted = 0;
    long rejected = 0;
};

template <class State>
double error_norm(const State& err, const State& y0, const State& y1, const Options& o) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double scale = o.atol + o.rtol * std::max(std::abs(y0.data()[i]), std::abs(y1.data()[i]));
        worst = std::max(worst, std::abs(err.data()[i]) / scale);
    }
    return worst;
}

/// Integrates dy/dt = f(t, y) from times.front() and returns y at every entry
/// of `times` (ascending). The first entry is y0 itself.
template <class State, class Rhs>
std::vector<State> integrate(Rhs&& f, const State& y0, const std::vector<double>& times, const Options& o = {},
                             Stats* stats = nullptr) {
    require(!times.empty(), ErrorCode::InvalidArgument, "time grid is empty");
    for (std::size_t i = 1; i < times.size(); ++i)
        require(times[i] >= times[i - 1], ErrorCode::InvalidArgument, "time grid must be ascending");

    // Dormand-Prince tableau
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;

    std::vector<State> out;
    out.reserve(times.size());
    State y = y0;
    double t = times.front();
    out.push_back(y);
    State k1 = f(t, y);
    double h = o.first_step;
    if (h <= 0.0) {
        const double span = times.back() - times.front();
        const double ny = y.norm(), nf = k1.norm();
        h = (nf > 0.0) ? 0.01 * std::max(ny, 1e-3) / nf : 1e-3 * std::max(span, 1e-6);
        if (span > 0.0) h = std::min(h, span);
        h = std::max(h, 1e-12);
    }
    if (o.max_step > 0.0) h = std::min(h, o.max_step);
    long steps = 0;
    Stats local;

    for (std::size_t idx = 1; idx < times.size(); ++idx) {
        const double target = times[idx];
        while (t < target) {
            require(++steps <= o.max_steps, ErrorCode::NoConvergence, "ODE step budget exhausted");
            bool land = false;
            double hs = h;
            if (t + hs >= target) {
                hs = target - t;
                land = true;
            }
            const State k2 = f(t + c2 * hs, (y + hs * (a21 * k1)).eval());
            const State k3 = f(t + c3 * hs, (y + hs * (a31 * k1 + a32 * k2)).eval());
            const State k4 = f(t + c4 * hs, (y + hs * (a41 * k1 + a42 * k2 + a43 * k3)).eval());
            const State k5 = f(t + c5 * hs, (y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)).eval());
            const State k6 = f(t + hs, (y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)).eval());
            State y1 = (y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6)).eval();
            const State k7 = f(t + hs, y1);
            const State err = (hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7)).eval();
            const double en = error_norm(err, y, y1, o);
            if (en <= 1.0 || hs < 1e-14) {
                t = land ? target : t + hs;
                y = std::move(y1);
                k1 = k7;
                ++local.accepted;
                const double fac = en > 0.0 ? std::min(5.0, std::max(0.2, 0.9 * std::pow(en, -0.2))) : 5.0;
                // a truncated landing step should not shrink the regular step
                h = land ? std::max(h, hs * fac) : hs * fac;
            } else {
                ++local.rejected;
                h = hs * std::max(0.1, 0.9 * std::pow(en, -0.2));
            }
            if (o.max_step > 0.0) h = std::min(h, o.max_step);
        }
        out.push_back(y);
    }
    if (stats) *stats = local;
    return out;
}

}  // namespace cqad::ode
