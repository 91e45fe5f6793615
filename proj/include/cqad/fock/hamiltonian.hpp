#pragma once

// Full qubit-phonon Hamiltonians as a static part plus time-dependent terms.

#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "cqad/core/error.hpp"
#include "cqad/core/types.hpp"
#include "cqad/driven_qubit/sidebands.hpp"
#include "cqad/fock/space.hpp"

namespace cqad {

enum class Frame {
    Lab,        ///< exact, co-rotating at omega_q; drives explicit
    Displaced,  ///< drives eliminated; phonons in their own rotating frames
    DisplacedQubitFrame,  ///< as Displaced, but phonons rotate with the shifted qubit: static JC, periodic in Delta_21
};

/// f(t) op + conj(f(t)) op^dag, or f(t) op for a Hermitian op with real f.
struct TimeTerm {
    SpMat op;
    SpMat op_dag;
    std::function<cplx(double)> f;
    bool add_conjugate = true;
};

struct HamiltonianSchedule {
    Frame frame = Frame::Displaced;
    SpMat h0;
    std::vector<TimeTerm> terms;

    /// H(t) v for a vector or a dense matrix v.
    template <class Dense>
    Dense apply(double t, const Dense& v) const {
        Dense out = h0 * v;
        for (const auto& term : terms) {
            const cplx c = term.f(t);
            out += c * (term.op * v);
            if (term.add_conjugate) out += std::conj(c) * (term.op_dag * v);
        }
        return out;
    }

    SpMat at(double t) const {
        SpMat h = h0;
        for (const auto& term : terms) {
            const cplx c = term.f(t);
            h += c * term.op;
            if (term.add_conjugate) h += std::conj(c) * term.op_dag;
        }
        return h;
    }
};

struct HamiltonianOptions {
    bool effective_drive = false;  ///< keep the qubit-mediated drive on the phonons (displaced frame only)
    double g_scale = 1.0;          ///< multiplies every g_m
    /// Optional envelope on the qubit-phonon terms (not in the qubit frame),
    /// e.g. to switch the dressing on adiabatically.
    std::function<double(double)> jc_envelope;
};

namespace detail {

inline SpMat hermitian_part(const SpMat& h) {
    SpMat adj = h.adjoint();
    return SpMat(0.5 * (h + adj));
}

inline TimeTerm make_term(SpMat op, std::function<cplx(double)> f, bool conj = true) {
    TimeTerm t;
    t.op_dag = op.adjoint();
    t.op = std::move(op);
    t.f = std::move(f);
    t.add_conjugate = conj;
    return t;
}

}  // namespace detail

inline HamiltonianSchedule build_hamiltonian(const DeviceParameters& dev, const DriveConfiguration& drive,
                                             const HilbertLayout& layout, Frame frame,
                                             const HamiltonianOptions& o = {}) {
    validate(dev);
    const DriveFrame df = derive_frame(dev, drive);
    const SpMat q = layout.lowering(0);
    const SpMat qd = q.adjoint();
    const SpMat nq = layout.number(0);
    const SpMat id = layout.identity();
    const double alpha = dev.qubit.alpha;
    HamiltonianSchedule h;
    h.frame = frame;
    // -alpha/2 q^dag^2 q^2 = -alpha/2 n (n - 1)
    SpMat kerr = -0.5 * alpha * SpMat(nq * (nq - id));

    if (frame == Frame::Lab) {
        h.h0 = kerr;
        for (const auto& [label, cut] : layout.modes()) {
            const auto& m = dev.ladder.at(label);
            const auto f = layout.factor_of(label);
            const SpMat a = layout.lowering(f);
            h.h0 += (m.omega_m - dev.qubit.omega_q) * layout.number(f);
            const double g = o.g_scale * m.g_m;
            if (o.jc_envelope) {
                const auto env = o.jc_envelope;
                h.terms.push_back(detail::make_term(SpMat(SpMat(a.adjoint()) * q), [=](double t) { return cplx(g * env(t), 0.0); }));
            } else {
                h.h0 += g * SpMat(SpMat(a.adjoint()) * q + SpMat(qd * a));
            }
        }
        const double O1 = drive.Omega_1, O2 = drive.Omega_2, d1 = df.delta_1, d2 = df.delta_2, phi = drive.phi;
        h.terms.push_back(detail::make_term(qd, [=](double t) {
            return O1 * std::polar(1.0, -d1 * t) + O2 * std::polar(1.0, -d2 * t - phi);
        }));
    } else {
        const SidebandSpectrum s = modulation_depth(drive, dev.qubit);
        h.h0 = kerr;
        const double lam = s.lambda_corrected, d21 = s.delta_21, phi = drive.phi;
        h.terms.push_back(detail::make_term(nq, [=](double t) { return cplx(lam * std::cos(d21 * t + phi), 0.0); }, false));
        for (const auto& [label, cut] : layout.modes()) {
            const auto& m = dev.ladder.at(label);
            const auto f = layout.factor_of(label);
            const SpMat a = layout.lowering(f);
            const SpMat adq = SpMat(a.adjoint()) * q;
            const double g = o.g_scale * m.g_m;
            const double dt = m.omega_m - (dev.qubit.omega_q + s.delta_q_ss);
            if (frame == Frame::DisplacedQubitFrame) {
                require(!o.jc_envelope, ErrorCode::InvalidArgument, "jc_envelope is not supported in the qubit frame");
                h.h0 += dt * layout.number(f);
                h.h0 += g * SpMat(adq + SpMat(adq.adjoint()));
            } else {
                const auto env = o.jc_envelope;
                if (env)
                    h.terms.push_back(detail::make_term(adq, [=](double t) { return g * env(t) * std::polar(1.0, dt * t); }));
                else
                    h.terms.push_back(detail::make_term(adq, [=](double t) { return g * std::polar(1.0, dt * t); }));
            }
            if (o.effective_drive) {
                const double dm = m.omega_m - dev.qubit.omega_q;
                const double x1 = df.xi_1, x2 = df.xi_2, d1 = df.delta_1, d2 = df.delta_2;
                const bool rotating = frame == Frame::DisplacedQubitFrame;
                const double shift = rotating ? dt : 0.0;  // extra phonon frame rotation of the qubit frame
                SpMat ad = a.adjoint();
                h.terms.push_back(detail::make_term(ad, [=](double t) {
                    const double base = (dm - shift) * t;
                    return g * (x1 * std::polar(1.0, base - d1 * t) + x2 * std::polar(1.0, base - d2 * t - phi));
                }));
            }
        }
    }
    h.h0 = detail::hermitian_part(h.h0);
    h.h0.prune(cplx(0.0, 0.0));
    return h;
}

/// Effective phonon-only Hamiltonian in the frame of the single-excitation
/// EOM matrix M: sum_mk M_mk m^dag k, with M Hermitian (decay removed).
inline HamiltonianSchedule bilinear_hamiltonian(const Eigen::MatrixXcd& M, const HilbertLayout& layout,
                                                const std::vector<std::string>& labels) {
    HamiltonianSchedule h;
    h.frame = Frame::Displaced;
    const auto dim = static_cast<Eigen::Index>(layout.dimension());
    h.h0 = SpMat(dim, dim);
    std::vector<SpMat> lower;
    for (const auto& l : labels) lower.push_back(layout.lowering(layout.factor_of(l)));
    for (std::size_t i = 0; i < labels.size(); ++i)
        for (std::size_t j = 0; j < labels.size(); ++j) {
            const cplx mij = i == j ? cplx(M(i, i).real(), 0.0) : M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            if (mij == cplx(0.0, 0.0)) continue;
            h.h0 += mij * SpMat(SpMat(lower[i].adjoint()) * lower[j]);
        }
    h.h0 = detail::hermitian_part(h.h0);
    return h;
}

}  // namespace cqad
