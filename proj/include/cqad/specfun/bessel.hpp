#pragma once

// Integer-order Bessel functions of the first kind.

#include <cmath>
#include <cstddef>
#include <vector>

#include "cqad/core/error.hpp"

namespace cqad {

inline constexpr double bessel_domain_limit = 50.0;

namespace detail {

inline long double bessel_series(int n, long double x) {
    const long double half = x / 2.0L;
    long double term = 1.0L;
    for (int k = 1; k <= n; ++k) term *= half / k;
    long double sum = term;
    const long double h2 = half * half;
    for (int k = 1; k < 200; ++k) {
        term *= -h2 / (static_cast<long double>(k) * (n + k));
        sum += term;
        if (std::fabs(term) <= 1e-21L * std::fabs(sum)) break;
    }
    return sum;
}

/// J_0..J_n_max at x > 0 by Miller's downward recurrence, normalized with
/// J_0 + 2 sum_k J_2k = 1.
inline std::vector<long double> bessel_miller(int n_max, long double x) {
    const double top = std::max<double>(n_max, static_cast<double>(x));
    int start = static_cast<int>(top + 20.0 + std::sqrt(60.0 * std::max(top, 1.0)));
    start += start % 2;
    std::vector<long double> out(static_cast<std::size_t>(n_max) + 1, 0.0L);
    long double next = 0.0L, cur = 1e-30L, norm = 0.0L;
    for (int k = start; k >= 1; --k) {
        const long double prev = (2.0L * k / x) * cur - next;
        next = cur;
        cur = prev;  // cur now holds J_{k-1}
        const int idx = k - 1;
        if (idx <= n_max) out[idx] = cur;
        if (idx % 2 == 0) norm += (idx == 0 ? 1.0L : 2.0L) * cur;
        if (std::fabs(cur) > 1e1000L) {
            const long double s = 1e-1000L;
            cur *= s;
            next *= s;
            norm *= s;
            for (auto& v : out) v *= s;
        }
    }
    for (auto& v : out) v /= norm;
    return out;
}

inline std::vector<long double> bessel_nonneg(int n_max, double x) {
    require(std::isfinite(x), ErrorCode::NonFiniteValue, "bessel argument must be finite");
    require(std::fabs(x) < bessel_domain_limit, ErrorCode::DomainError, "bessel_j requires |x| < 50");
    std::vector<long double> out(static_cast<std::size_t>(n_max) + 1, 0.0L);
    if (x == 0.0) {
        out[0] = 1.0L;
        return out;
    }
    const long double ax = std::fabs(static_cast<long double>(x));
    if (ax < 1.0L) {
        for (int n = 0; n <= n_max; ++n) out[n] = bessel_series(n, ax);
    } else {
        out = bessel_miller(n_max, ax);
    }
    if (x < 0.0)
        for (int n = 1; n <= n_max; n += 2) out[n] = -out[n];
    return out;
}

}  // namespace detail

/// J_n(x) for integer n and |x| < 50. Negative orders use J_{-n} = (-1)^n J_n.
inline double bessel_j(int n, double x) {
    const int an = n < 0 ? -n : n;
    const double v = static_cast<double>(detail::bessel_nonneg(an, x)[an]);
    return (n < 0 && (an % 2 == 1)) ? -v : v;
}

/// J_n(x) for n in [-n_max, n_max].
struct BesselTable {
    double argument = 0.0;
    int n_max = 0;
    std::vector<double> values;  ///< values[n + n_max]

    double operator()(int n) const {
        if (n < -n_max || n > n_max) return 0.0;
        return values[static_cast<std::size_t>(n + n_max)];
    }

    double completeness() const {
        double s = 0.0;
        for (double v : values) s += v * v;
        return s;
    }
};

inline BesselTable bessel_table(double x, int n_max) {
    require(n_max >= 0, ErrorCode::InvalidArgument, "n_max >= 0");
    const auto pos = detail::bessel_nonneg(n_max, x);
    BesselTable t;
    t.argument = x;
    t.n_max = n_max;
    t.values.resize(2 * static_cast<std::size_t>(n_max) + 1);
    for (int n = 0; n <= n_max; ++n) {
        const double v = static_cast<double>(pos[n]);
        t.values[n_max + n] = v;
        t.values[n_max - n] = (n % 2 == 1) ? -v : v;
    }
    return t;
}

}  // namespace cqad
