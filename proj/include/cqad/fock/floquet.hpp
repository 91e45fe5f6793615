#pragma once

// Quasienergies of a periodic Hamiltonian restricted to an invariant subspace.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Eigenvalues>

#include "cqad/core/error.hpp"
#include "cqad/driven_qubit/stark.hpp"
#include "cqad/fock/evolve.hpp"

namespace cqad {

/// One-period propagator projected onto the given basis states. The basis
/// must span a subspace the Hamiltonian leaves invariant.
inline Eigen::MatrixXcd floquet_propagator(const HamiltonianSchedule& h, double period,
                                           const std::vector<std::size_t>& basis, const EvolveOptions& o = {}) {
    require(period > 0.0, ErrorCode::InvalidArgument, "period must be positive");
    require(!basis.empty(), ErrorCode::InvalidArgument, "basis is empty");
    const auto dim = h.h0.rows();
    const auto n = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXcd u(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
        v(static_cast<Eigen::Index>(basis[static_cast<std::size_t>(j)])) = 1.0;
        const auto out = evolve_schrodinger(h, QuantumState::pure(v), {0.0, period}, o);
        for (Eigen::Index i = 0; i < n; ++i) u(i, j) = out.back().psi(static_cast<Eigen::Index>(basis[static_cast<std::size_t>(i)]));
    }
    return u;
}

/// Quasienergies folded into (-pi/T, pi/T], ascending.
inline std::vector<double> quasienergies(const HamiltonianSchedule& h, double period,
                                         const std::vector<std::size_t>& basis, const EvolveOptions& o = {}) {
    const Eigen::MatrixXcd u = floquet_propagator(h, period, basis, o);
    const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(u);
    std::vector<double> e;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) e.push_back(-std::arg(es.eigenvalues()(i)) / period);
    std::sort(e.begin(), e.end());
    return e;
}

/// Smallest separation between quasienergies on the circle of width 2 pi / T.
inline double min_quasienergy_gap(const std::vector<double>& e, double period) {
    require(e.size() >= 2, ErrorCode::InvalidArgument, "need two quasienergies");
    const double width = 2.0 * std::numbers::pi / period;
    double gap = width - (e.back() - e.front());
    for (std::size_t i = 1; i < e.size(); ++i) gap = std::min(gap, e[i] - e[i - 1]);
    return gap;
}

}  // namespace cqad

namespace cqad {

/// Static Stark shift of the 0-1 transition to all orders in the drives: the
/// driven transmon alone, in the frame of drive 1, is periodic in Delta_21 and
/// its Floquet quasienergies give the dressed transition frequency.
inline double floquet_stark_shift(const QubitParams& q, const DriveConfiguration& drive, int levels = 8,
                                  const EvolveOptions& o = {}) {
    DeviceParameters dev;
    dev.qubit = q;
    const DriveFrame f = derive_frame(dev, drive);
    const HilbertLayout layout(levels, {});
    const SpMat a = layout.lowering(0);
    const SpMat n = layout.number(0);
    const SpMat id = layout.identity();
    HamiltonianSchedule h;
    h.h0 = -0.5 * q.alpha * SpMat(n * (n - id)) - f.delta_1 * n + drive.Omega_1 * SpMat(a + SpMat(a.adjoint()));
    const double O2 = drive.Omega_2, d21 = f.delta_21, phi = drive.phi;
    h.terms.push_back(detail::make_term(SpMat(a.adjoint()), [=](double t) { return O2 * std::polar(1.0, -d21 * t - phi); }));
    const double period = 2.0 * std::numbers::pi / std::fabs(d21);
    std::vector<std::size_t> basis(static_cast<std::size_t>(levels));
    for (std::size_t i = 0; i < basis.size(); ++i) basis[i] = i;
    const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(floquet_propagator(h, period, basis, o));
    auto quasi_of = [&](Eigen::Index level) {
        Eigen::Index best = 0;
        es.eigenvectors().row(level).cwiseAbs().maxCoeff(&best);
        return -std::arg(es.eigenvalues()(best)) / period;
    };
    const double width = 2.0 * std::numbers::pi / period;
    const double guess = -f.delta_1 + static_stark_shift(q, drive, f);
    double diff = quasi_of(1) - quasi_of(0);
    diff += width * std::round((guess - diff) / width);
    return diff + f.delta_1;
}

}  // namespace cqad
