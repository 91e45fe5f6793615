#pragma once

// Numerical second-order perturbation theory for the bichromatically driven
// transmon. The drives are quantized as two bosonic modes with large photon
// numbers L0 and M0 = L0; the qubit-drive couplings are Omega_j / sqrt(L0).
// A second-order Schrieffer-Wolff generator gives an effective Hamiltonian on
// each unperturbed manifold, from which the static shift of the g-e
// transition and its modulation amplitude are read off.

#include <array>
#include <cmath>
#include <vector>

#include "cqad/core/error.hpp"
#include "cqad/core/types.hpp"

namespace cqad {

struct PerturbationOptions {
    int qubit_levels = 3;
    double photon_number = 1e6;  ///< L0 = M0
    std::vector<double> samples = {0.5, 0.75, 1.0, 1.25, 1.5};  ///< drive-amplitude scale factors
    bool check_convergence = true;
    double convergence_tolerance = 1e-3;
};

struct PerturbationResult {
    double delta_q_ss_corrected = 0.0;
    double lambda_corrected = 0.0;
};

namespace detail {

struct PtState {
    int n;       // qubit level
    double l;    // photons in drive 1
    double m;    // photons in drive 2
};

struct PtCoupling {
    PtState k;
    double v;
};

class PerturbationLadder {
public:
    PerturbationLadder(double alpha, double d1, double d2, double g1, double g2, int levels)
        : alpha_(alpha), d1_(d1), d2_(d2), g1_(g1), g2_(g2), levels_(levels) {}

    double energy(const PtState& s) const {
        return s.l * d1_ + s.m * d2_ - 0.5 * alpha_ * s.n * (s.n - 1);
    }

    /// States reached from s by one application of g_j (a_j^dag q + a_j q^dag).
    std::vector<PtCoupling> neighbours(const PtState& s) const {
        std::vector<PtCoupling> out;
        const double up = std::sqrt(static_cast<double>(s.n + 1));
        const double down = std::sqrt(static_cast<double>(s.n));
        if (s.n + 1 < levels_) {
            out.push_back({{s.n + 1, s.l - 1, s.m}, g1_ * std::sqrt(s.l) * up});
            out.push_back({{s.n + 1, s.l, s.m - 1}, g2_ * std::sqrt(s.m) * up});
        }
        if (s.n > 0) {
            out.push_back({{s.n - 1, s.l + 1, s.m}, g1_ * std::sqrt(s.l + 1) * down});
            out.push_back({{s.n - 1, s.l, s.m + 1}, g2_ * std::sqrt(s.m + 1) * down});
        }
        return out;
    }

    /// Second-order effective matrix element between degenerate-manifold states.
    double effective(const PtState& a, const PtState& b) const {
        const double ea = energy(a), eb = energy(b);
        double sum = 0.0;
        for (const auto& ka : neighbours(a))
            for (const auto& kb : neighbours(b)) {
                if (ka.k.n != kb.k.n || ka.k.l != kb.k.l || ka.k.m != kb.k.m) continue;
                const double ek = energy(ka.k);
                require(ea != ek && eb != ek, ErrorCode::SingularDetuning, "degenerate intermediate state");
                sum += 0.5 * ka.v * kb.v * (1.0 / (ea - ek) + 1.0 / (eb - ek));
            }
        return sum;
    }

private:
    double alpha_, d1_, d2_, g1_, g2_;
    int levels_;
};

inline PerturbationResult perturbation_once(double alpha, double d1, double d2, double Omega_1, double Omega_2,
                                            int levels, double L0) {
    const PerturbationLadder ladder(alpha, d1, d2, Omega_1 / std::sqrt(L0), Omega_2 / std::sqrt(L0), levels);
    PerturbationResult r;
    const PtState g{0, L0, L0}, e{1, L0, L0};
    r.delta_q_ss_corrected = ladder.effective(e, e) - ladder.effective(g, g);
    // a_1 a_2^dag transition; normalize out its bosonic matrix element
    const double bose = std::sqrt(L0 * (L0 + 1.0)) / L0;
    const double c1 = ladder.effective({1, L0, L0}, {1, L0 - 1, L0 + 1}) / bose;
    const double c0 = ladder.effective({0, L0, L0}, {0, L0 - 1, L0 + 1}) / bose;
    r.lambda_corrected = 2.0 * (c1 - c0);
    return r;
}

inline PerturbationResult perturbation_fit(const QubitParams& q, const DriveFrame& f, double Omega_1, double Omega_2,
                                           int levels, double L0, const std::vector<double>& samples) {
    // both quantities are quadratic forms in the drive amplitudes; extract the
    // coefficient of s^2 by least squares over the amplitude samples
    double num_s = 0.0, num_l = 0.0, den = 0.0;
    for (double s : samples) {
        const auto r = perturbation_once(q.alpha, f.delta_1, f.delta_2, s * Omega_1, s * Omega_2, levels, L0);
        num_s += r.delta_q_ss_corrected * s * s;
        num_l += r.lambda_corrected * s * s;
        den += s * s * s * s;
    }
    return {num_s / den, num_l / den};
}

}  // namespace detail

inline PerturbationResult perturbation_oracle(const QubitParams& qubit, const DriveConfiguration& drive,
                                              const PerturbationOptions& o = {}) {
    require(o.qubit_levels >= 3, ErrorCode::InvalidArgument, "perturbation oracle needs >= 3 qubit levels");
    require(o.photon_number >= 100.0, ErrorCode::InvalidArgument, "photon number too small");
    require(!o.samples.empty(), ErrorCode::InvalidArgument, "no amplitude samples");
    validate(qubit);
    DeviceParameters dev;
    dev.qubit = qubit;
    const DriveFrame f = derive_frame(dev, drive);
    if (drive.Omega_1 == 0.0 && drive.Omega_2 == 0.0) return {};
    const auto r = detail::perturbation_fit(qubit, f, drive.Omega_1, drive.Omega_2, o.qubit_levels, o.photon_number,
                                            o.samples);
    if (o.check_convergence) {
        const auto big = detail::perturbation_fit(qubit, f, drive.Omega_1, drive.Omega_2, o.qubit_levels + 1,
                                                  4.0 * o.photon_number, o.samples);
        auto changed = [&](double a, double b, double scale) {
            return std::fabs(a - b) > o.convergence_tolerance * std::max(std::fabs(a), scale);
        };
        const double floor_scale = 1e-12 * (drive.Omega_1 * drive.Omega_1 + drive.Omega_2 * drive.Omega_2) / qubit.alpha;
        require(!changed(r.delta_q_ss_corrected, big.delta_q_ss_corrected, floor_scale) &&
                    !changed(r.lambda_corrected, big.lambda_corrected, floor_scale),
                ErrorCode::ConvergenceError, "perturbation oracle changed by more than 0.1% when the basis grew");
    }
    return r;
}

}  // namespace cqad
