#pragma once

// Dominant-frequency estimation for uniformly sampled real signals.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "cqad/core/error.hpp"
#include "cqad/core/units.hpp"
#include "cqad/numeric/optimize.hpp"

namespace cqad::spectral {

struct PeakEstimate {
    double omega = 0.0;       ///< angular frequency
    double peak_power = 0.0;
    double background = 0.0;  ///< median periodogram power
};

/// Fraction of variance explained by the best fit a cos(wt) + b sin(wt) + c.
inline double explained_variance(const std::vector<double>& t, const std::vector<double>& y, double omega) {
    const Eigen::Index n = static_cast<Eigen::Index>(t.size());
    Eigen::MatrixXd A(n, 3);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        A(i, 0) = std::cos(omega * t[i]);
        A(i, 1) = std::sin(omega * t[i]);
        A(i, 2) = 1.0;
        b(i) = y[i];
    }
    const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(b);
    const double mean = b.mean();
    const double total = (b.array() - mean).square().sum();
    if (total <= 0.0) return 0.0;
    return 1.0 - (A * coef - b).squaredNorm() / total;
}

/// Periodogram peak over (0, Nyquist] refined by maximizing the explained
/// variance of a single-sinusoid fit around the peak.
inline PeakEstimate dominant_frequency(const std::vector<double>& t, const std::vector<double>& y,
                                       int oversample = 8, double min_contrast = 3.0) {
    require(t.size() == y.size() && t.size() >= 8, ErrorCode::InvalidArgument,
            "dominant_frequency needs >= 8 matching samples");
    const std::size_t n = t.size();
    const double dt = (t.back() - t.front()) / static_cast<double>(n - 1);
    require(dt > 0.0, ErrorCode::InvalidArgument, "time grid must be increasing");
    const double span = dt * static_cast<double>(n);
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(n);
    double spread = 0.0;
    for (double v : y) spread = std::max(spread, std::fabs(v - mean));
    require(spread > 1e-12 * std::max(1.0, std::fabs(mean)), ErrorCode::NoOscillation, "signal is constant");

    const double d_omega = two_pi / (span * oversample);
    const double nyquist = std::numbers::pi / dt;
    const int bins = static_cast<int>(nyquist / d_omega);
    require(bins >= 2, ErrorCode::InvalidArgument, "time grid too short");
    std::vector<double> power(static_cast<std::size_t>(bins));
    for (int k = 1; k <= bins; ++k) {
        const double w = k * d_omega;
        double re = 0.0, im = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = y[i] - mean;
            re += v * std::cos(w * t[i]);
            im += v * std::sin(w * t[i]);
        }
        power[static_cast<std::size_t>(k - 1)] = (re * re + im * im) / static_cast<double>(n);
    }
    // skip the lowest bins: a slow drift is not an oscillation
    const std::size_t first = static_cast<std::size_t>(oversample);
    require(power.size() > first + 1, ErrorCode::NoOscillation, "trajectory shorter than two periods");
    const auto peak_it = std::max_element(power.begin() + static_cast<long>(first), power.end());
    const std::size_t kp = static_cast<std::size_t>(peak_it - power.begin());
    std::vector<double> sorted(power.begin() + static_cast<long>(first), power.end());
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(sorted.size() / 2), sorted.end());
    const double background = sorted[sorted.size() / 2];
    require(*peak_it >= min_contrast * background && *peak_it > 0.0, ErrorCode::NoOscillation,
            "no spectral peak above background");
    require(power[kp - 1] < power[kp], ErrorCode::NoOscillation, "spectrum falls monotonically from zero frequency");

    double w0 = static_cast<double>(kp + 1) * d_omega;
    if (kp > 0 && kp + 1 < power.size()) {
        const double a = power[kp - 1], b = power[kp], c = power[kp + 1];
        const double den = a - 2.0 * b + c;
        if (den != 0.0) w0 += 0.5 * (a - c) / den * d_omega;
    }
    const double lo = std::max(w0 - d_omega, 0.5 * d_omega), hi = w0 + d_omega;
    const auto r = opt::brent_minimize([&](double w) { return -explained_variance(t, y, w); }, lo, hi, 1e-12);
    return {r.x, *peak_it, background};
}

}  // namespace cqad::spectral
