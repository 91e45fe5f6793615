#pragma once

// Schrodinger and Lindblad evolution on truncated Fock spaces.

#include <cmath>
#include <string>
#include <vector>

#include "cqad/core/error.hpp"
#include "cqad/core/types.hpp"
#include "cqad/fock/hamiltonian.hpp"
#include "cqad/fock/space.hpp"
#include "cqad/numeric/ode.hpp"

namespace cqad {

struct EvolveOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double max_step = 0.0;
};

/// States at every entry of `times`; psi0 is the state at times.front().
inline std::vector<QuantumState> evolve_schrodinger(const HamiltonianSchedule& h, const QuantumState& psi0,
                                                    const std::vector<double>& times, const EvolveOptions& o = {}) {
    require(psi0.kind == StateKind::Pure, ErrorCode::InvalidState, "evolve_schrodinger needs a pure state");
    validate(psi0);
    require(psi0.psi.size() == h.h0.rows(), ErrorCode::InvalidState, "state dimension does not match the Hamiltonian");
    const cplx mi(0.0, -1.0);
    ode::Options oo;
    oo.rtol = o.rtol;
    oo.atol = o.atol;
    oo.max_step = o.max_step;
    auto ys = ode::integrate([&](double t, const Eigen::VectorXcd& y) -> Eigen::VectorXcd { return mi * h.apply(t, y); },
                             psi0.psi, times, oo);
    std::vector<QuantumState> out;
    out.reserve(ys.size());
    for (auto& y : ys) out.push_back(QuantumState::pure(std::move(y)));
    return out;
}

enum class CollapseRole { QubitRelaxation, QubitDephasing, PhononDecay };

struct CollapseChannel {
    CollapseRole role;
    std::string mode;  ///< phonon label for PhononDecay
    double rate;       ///< energy decay rate, or pure dephasing rate of the qubit coherence
};

/// Amplitude damping of the qubit at 1/T1, pure dephasing at 1/T2* - 1/(2 T1),
/// and amplitude damping of every phonon in the layout at Gamma_m.
inline std::vector<CollapseChannel> standard_collapses(const DeviceParameters& dev, const HilbertLayout& layout,
                                                       bool qubit_channels = true) {
    std::vector<CollapseChannel> c;
    if (qubit_channels) {
        const double gamma_phi = 1.0 / dev.qubit.t2_star - 0.5 / dev.qubit.t1;
        require(gamma_phi >= 0.0, ErrorCode::InvalidRates, "pure dephasing rate 1/T2* - 1/(2 T1) is negative");
        c.push_back({CollapseRole::QubitRelaxation, "", 1.0 / dev.qubit.t1});
        c.push_back({CollapseRole::QubitDephasing, "", gamma_phi});
    }
    for (const auto& [label, cut] : layout.modes()) c.push_back({CollapseRole::PhononDecay, label, dev.ladder.at(label).gamma_m});
    return c;
}

inline SpMat collapse_operator(const CollapseChannel& c, const HilbertLayout& layout) {
    require(c.rate >= 0.0 && std::isfinite(c.rate), ErrorCode::InvalidRates, "collapse rates must be finite and >= 0");
    switch (c.role) {
    case CollapseRole::QubitRelaxation: return std::sqrt(c.rate) * layout.lowering(0);
    // coherences decay at gamma_phi when L = sqrt(2 gamma_phi) q^dag q
    case CollapseRole::QubitDephasing: return std::sqrt(2.0 * c.rate) * layout.number(0);
    case CollapseRole::PhononDecay: return std::sqrt(c.rate) * layout.lowering(layout.factor_of(c.mode));
    }
    fail(ErrorCode::InvalidArgument, "unknown collapse role");
}

/// Dense density-matrix master equation
///   d rho/dt = -i[H, rho] + sum_k (L rho L^dag - {L^dag L, rho}/2).
inline std::vector<QuantumState> evolve_lindblad(const HamiltonianSchedule& h, const HilbertLayout& layout,
                                                 const QuantumState& rho0,
                                                 const std::vector<CollapseChannel>& collapses,
                                                 const std::vector<double>& times, const EvolveOptions& o = {}) {
    const QuantumState start = rho0.kind == StateKind::Pure ? QuantumState::density(rho0.density_matrix()) : rho0;
    validate(start);
    require(start.rho.rows() == h.h0.rows(), ErrorCode::InvalidState, "state dimension does not match the Hamiltonian");
    std::vector<SpMat> ls;
    const auto dim = h.h0.rows();
    SpMat k(dim, dim);
    for (const auto& c : collapses) {
        SpMat l = collapse_operator(c, layout);
        k += SpMat(SpMat(l.adjoint()) * l);
        ls.push_back(std::move(l));
    }
    const cplx mi(0.0, -1.0);
    auto rhs = [&](double t, const Eigen::MatrixXcd& rho) -> Eigen::MatrixXcd {
        // A = -i H rho - K rho / 2; then A + A^dag is the non-jump part
        Eigen::MatrixXcd a = mi * h.apply(t, rho) - 0.5 * (k * rho);
        Eigen::MatrixXcd out = a + a.adjoint();
        for (std::size_t i = 0; i < ls.size(); ++i) out += ls[i] * (ls[i] * rho.adjoint()).adjoint();  // L rho L^dag
        return out;
    };
    ode::Options oo;
    oo.rtol = o.rtol;
    oo.atol = o.atol;
    oo.max_step = o.max_step;
    auto ys = ode::integrate(rhs, Eigen::MatrixXcd(start.rho), times, oo);
    std::vector<QuantumState> out;
    out.reserve(ys.size());
    for (auto& y : ys) {
        Eigen::MatrixXcd r = 0.5 * (y + y.adjoint());
        out.push_back(QuantumState::density(std::move(r)));
    }
    return out;
}

}  // namespace cqad
