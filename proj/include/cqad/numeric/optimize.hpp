#pragma once

// Scalar and multivariate minimizers and a bracketed root finder.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "cqad/core/error.hpp"

namespace cqad::opt {

struct ScalarResult {
    double x = 0.0;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Brent's bracketed root finder on [a, b] with f(a), f(b) of opposite sign.
template <class F>
ScalarResult brent_root(F&& f, double a, double b, double xtol = 1e-14, int max_iter = 200) {
    double fa = f(a), fb = f(b);
    require(fa == 0.0 || fb == 0.0 || std::signbit(fa) != std::signbit(fb), ErrorCode::InvalidArgument,
            "brent_root: root not bracketed");
    if (fa == 0.0) return {a, 0.0, 0, true};
    if (fb == 0.0) return {b, 0.0, 0, true};
    double c = a, fc = fa, d = b - a, e = d;
    for (int it = 1; it <= max_iter; ++it) {
        if (std::signbit(fb) == std::signbit(fc)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::fabs(b) + 0.5 * xtol;
        const double m = 0.5 * (c - b);
        if (std::fabs(m) <= tol || fb == 0.0) return {b, fb, it, true};
        if (std::fabs(e) >= tol && std::fabs(fa) > std::fabs(fb)) {
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                const double qa = fa / fc, r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q; else p = -p;
            if (2.0 * p < std::min(3.0 * m * q - std::fabs(tol * q), std::fabs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += (std::fabs(d) > tol) ? d : (m > 0 ? tol : -tol);
        fb = f(b);
    }
    return {b, fb, max_iter, false};
}

/// Brent's minimizer (golden section with parabolic steps) on [a, b].
template <class F>
ScalarResult brent_minimize(F&& f, double a, double b, double xtol = 1e-10, int max_iter = 500) {
    constexpr double cgold = 0.3819660112501051;
    double x = a + cgold * (b - a), w = x, v = x;
    double fx = f(x), fw = fx, fv = fx;
    double d = 0.0, e = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        const double xm = 0.5 * (a + b);
        const double tol1 = xtol * std::fabs(x) + 1e-300 + xtol, tol2 = 2.0 * tol1;
        if (std::fabs(x - xm) <= tol2 - 0.5 * (b - a)) return {x, fx, it, true};
        bool golden = true;
        if (std::fabs(e) > tol1) {
            const double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) p = -p;
            q = std::fabs(q);
            const double etemp = e;
            e = d;
            if (!(std::fabs(p) >= std::fabs(0.5 * q * etemp) || p <= q * (a - x) || p >= q * (b - x))) {
                d = p / q;
                const double u = x + d;
                if (u - a < tol2 || b - u < tol2) d = xm - x >= 0 ? tol1 : -tol1;
                golden = false;
            }
        }
        if (golden) {
            e = (x >= xm) ? a - x : b - x;
            d = cgold * e;
        }
        const double u = std::fabs(d) >= tol1 ? x + d : x + (d >= 0 ? tol1 : -tol1);
        const double fu = f(u);
        if (fu <= fx) {
            if (u >= x) a = x; else b = x;
            v = w; fv = fw;
            w = x; fw = fx;
            x = u; fx = fu;
        } else {
            if (u < x) a = u; else b = u;
            if (fu <= fw || w == x) {
                v = w; fv = fw;
                w = u; fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u; fv = fu;
            }
        }
    }
    return {x, fx, max_iter, false};
}

struct VectorResult {
    std::vector<double> x;
    double fx = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

struct NelderMeadOptions {
    int max_iter = 5000;
    double xtol = 1e-8;  ///< relative simplex size
    double ftol = 1e-12;
    std::vector<double> initial_step;  ///< per-coordinate; empty uses 5% of |x| or 1e-3
};

/// Nelder-Mead downhill simplex with the adaptive coefficients of Gao and Han.
template <class F>
VectorResult nelder_mead(F&& f, std::vector<double> x0, const NelderMeadOptions& o = {}) {
    const std::size_t n = x0.size();
    require(n > 0, ErrorCode::InvalidArgument, "nelder_mead needs at least one parameter");
    const double nd = static_cast<double>(n);
    const double alpha = 1.0, beta = 1.0 + 2.0 / nd, gamma = 0.75 - 1.0 / (2.0 * nd), delta = 1.0 - 1.0 / nd;
    std::vector<std::vector<double>> s(n + 1, x0);
    std::vector<double> fs(n + 1);
    int evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::max();
    };
    for (std::size_t i = 0; i < n; ++i) {
        double step = o.initial_step.empty() ? (x0[i] != 0.0 ? 0.05 * std::fabs(x0[i]) : 1e-3) : o.initial_step[i];
        s[i + 1][i] += step;
    }
    for (std::size_t i = 0; i <= n; ++i) fs[i] = eval(s[i]);
    std::vector<std::size_t> order(n + 1);
    int it = 0;
    bool converged = false;
    for (; it < o.max_iter; ++it) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return fs[a] < fs[b]; });
        const auto best = order.front(), worst = order.back(), second = order[n - 1];
        double size = 0.0, scale = 0.0;
        for (std::size_t i = 0; i <= n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                size = std::max(size, std::fabs(s[i][j] - s[best][j]));
                scale = std::max(scale, std::fabs(s[best][j]));
            }
        if (size <= o.xtol * std::max(scale, 1e-300) &&
            std::fabs(fs[worst] - fs[best]) <= o.ftol * (std::fabs(fs[best]) + 1e-300)) {
            converged = true;
            break;
        }
        if (size == 0.0) {
            converged = true;
            break;
        }
        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i)
            if (i != worst)
                for (std::size_t j = 0; j < n; ++j) centroid[j] += s[i][j] / nd;
        auto along = [&](double t) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j) p[j] = centroid[j] + t * (s[worst][j] - centroid[j]);
            return p;
        };
        auto xr = along(-alpha);
        const double fr = eval(xr);
        if (fr < fs[best]) {
            auto xe = along(-alpha * beta);
            const double fe = eval(xe);
            if (fe < fr) { s[worst] = xe; fs[worst] = fe; }
            else { s[worst] = xr; fs[worst] = fr; }
            continue;
        }
        if (fr < fs[second]) {
            s[worst] = xr;
            fs[worst] = fr;
            continue;
        }
        const bool outside = fr < fs[worst];
        auto xc = along(outside ? -alpha * gamma : gamma);
        const double fc = eval(xc);
        if (fc < (outside ? fr : fs[worst])) {
            s[worst] = xc;
            fs[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t j = 0; j < n; ++j) s[i][j] = s[best][j] + delta * (s[i][j] - s[best][j]);
            fs[i] = eval(s[i]);
        }
    }
    const auto best = static_cast<std::size_t>(std::min_element(fs.begin(), fs.end()) - fs.begin());
    return {s[best], fs[best], it, evals, converged};
}

/// Central-difference gradient.
template <class F>
std::vector<double> numerical_gradient(F&& f, const std::vector<double>& x, double rel_step = 1e-6) {
    std::vector<double> g(x.size());
    std::vector<double> xp = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double h = rel_step * std::max(1.0, std::fabs(x[i]));
        xp[i] = x[i] + h;
        const double fp = f(xp);
        xp[i] = x[i] - h;
        const double fm = f(xp);
        xp[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

struct BfgsOptions {
    int max_iter = 500;
    double gtol = 1e-10;
    double rel_step = 1e-6;
};

/// Quasi-Newton BFGS with numerical gradients and backtracking line search.
template <class F>
VectorResult bfgs(F&& f, std::vector<double> x, const BfgsOptions& o = {}) {
    const std::size_t n = x.size();
    std::vector<double> H(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) H[i * n + i] = 1.0;
    double fx = f(x);
    auto g = numerical_gradient(f, x, o.rel_step);
    int evals = 1 + 2 * static_cast<int>(n);
    int it = 0;
    bool converged = false;
    for (; it < o.max_iter; ++it) {
        double gn = 0.0;
        for (double v : g) gn = std::max(gn, std::fabs(v));
        if (gn <= o.gtol) {
            converged = true;
            break;
        }
        std::vector<double> p(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) p[i] -= H[i * n + j] * g[j];
        double slope = 0.0;
        for (std::size_t i = 0; i < n; ++i) slope += p[i] * g[i];
        if (slope >= 0.0) {
            for (std::size_t i = 0; i < n; ++i) {
                p[i] = -g[i];
                for (std::size_t j = 0; j < n; ++j) H[i * n + j] = (i == j) ? 1.0 : 0.0;
            }
            slope = 0.0;
            for (std::size_t i = 0; i < n; ++i) slope += p[i] * g[i];
        }
        double t = 1.0;
        std::vector<double> xn(n);
        double fn = fx;
        bool moved = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t i = 0; i < n; ++i) xn[i] = x[i] + t * p[i];
            fn = f(xn);
            ++evals;
            if (std::isfinite(fn) && fn <= fx + 1e-4 * t * slope) {
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if (!moved) {
            converged = true;
            break;
        }
        auto gnew = numerical_gradient(f, xn, o.rel_step);
        evals += 2 * static_cast<int>(n);
        std::vector<double> sv(n), yv(n);
        double sy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sv[i] = xn[i] - x[i];
            yv[i] = gnew[i] - g[i];
            sy += sv[i] * yv[i];
        }
        const double improvement = fx - fn;
        x = xn;
        g = gnew;
        fx = fn;
        if (sy > 1e-300) {
            std::vector<double> Hy(n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) Hy[i] += H[i * n + j] * yv[j];
            double yHy = 0.0;
            for (std::size_t i = 0; i < n; ++i) yHy += yv[i] * Hy[i];
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    H[i * n + j] += ((sy + yHy) * sv[i] * sv[j]) / (sy * sy) - (Hy[i] * sv[j] + sv[i] * Hy[j]) / sy;
        }
        if (improvement <= 1e-16 * std::fabs(fx)) {
            converged = true;
            break;
        }
    }
    return {x, fx, it, evals, converged};
}

}  // namespace cqad::opt
