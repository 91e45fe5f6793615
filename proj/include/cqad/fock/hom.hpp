#pragma once

// Two-phonon interference at the beam splitter, starting from |11>.

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cqad/core/error.hpp"
#include "cqad/effective/model.hpp"
#include "cqad/fock/evolve.hpp"
#include "cqad/fock/hamiltonian.hpp"
#include "cqad/modeswap/eom.hpp"
#include "cqad/numeric/parallel.hpp"

namespace cqad {

struct HomResult {
    double tau = 0.0;
    double p20 = 0.0;
    double p02 = 0.0;
    double p11 = 0.0;      ///< joint, for reference
    double p11_bar = 0.0;  ///< min(P_1 of either mode)
    double p_sigma = 0.0;
    double ratio_bunched = 0.0;
};

struct HomOptions {
    std::string mode_b = "b";
    std::string mode_c = "c";
    int cutoff = 4;
    int qubit_levels = 3;
    double g_scale = 1.0;
    /// Probability that each preparation SWAP leaves one phonon in (mode_b, mode_c);
    /// the rest stays in vacuum. Unset means ideal |11>.
    std::optional<std::pair<double, double>> preparation;
    ModelOptions model;
    EvolveOptions evolve;                      ///< pure-state runs
    EvolveOptions lindblad{1e-8, 1e-10, 0.0};  ///< density-matrix runs
};

inline HomResult hom_statistics(const HilbertLayout& layout, const QuantumState& s, const std::string& b,
                                const std::string& c, double tau) {
    const Eigen::MatrixXd joint = joint_populations(layout, s, b, c);
    const auto pb = fock_populations(layout, s, b);
    const auto pc = fock_populations(layout, s, c);
    HomResult r;
    r.tau = tau;
    r.p20 = joint(2, 0);
    r.p02 = joint(0, 2);
    r.p11 = joint(1, 1);
    r.p11_bar = std::min(pb[1], pc[1]);
    r.p_sigma = r.p20 + r.p02 + r.p11_bar;
    r.ratio_bunched = r.p_sigma > 0.0 ? (r.p20 + r.p02) / r.p_sigma : 0.0;
    return r;
}

/// Single-mode preparation: p |1><1| + (1 - p) |0><0| per mode, qubit in g.
inline QuantumState hom_initial_state(const HilbertLayout& layout, const std::string& b, const std::string& c,
                                      const std::optional<std::pair<double, double>>& prep) {
    const auto fb = layout.factor_of(b), fc = layout.factor_of(c);
    std::vector<int> occ(layout.mode_count() + 1, 0);
    auto at = [&](int nb, int nc) {
        std::vector<int> o = occ;
        o[fb] = nb;
        o[fc] = nc;
        return static_cast<Eigen::Index>(layout.index(o));
    };
    if (!prep) return basis_state(layout, [&] { auto o = occ; o[fb] = 1; o[fc] = 1; return o; }());
    const auto [pb, pc] = *prep;
    require(pb >= 0.0 && pb <= 1.0 && pc >= 0.0 && pc <= 1.0, ErrorCode::InvalidArgument,
            "preparation probabilities must lie in [0, 1]");
    const auto dim = static_cast<Eigen::Index>(layout.dimension());
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    rho(at(1, 1), at(1, 1)) = pb * pc;
    rho(at(1, 0), at(1, 0)) = pb * (1.0 - pc);
    rho(at(0, 1), at(0, 1)) = (1.0 - pb) * pc;
    rho(at(0, 0), at(0, 0)) = (1.0 - pb) * (1.0 - pc);
    return QuantumState::density(std::move(rho));
}

/// Evolves |11> (or the imperfectly prepared mixture) for every gate time.
/// With residual_jc the qubit is kept in the displaced-frame Hamiltonian;
/// otherwise only the effective two-mode beam splitter acts.
inline std::vector<HomResult> hom_experiment(DeviceParameters dev, const DriveConfiguration& drive,
                                             std::vector<double> gate_times, bool decoherence, bool residual_jc,
                                             const HomOptions& o = {}) {
    require(o.cutoff >= 3, ErrorCode::InvalidArgument, "HOM needs Fock cutoff >= 3");
    require(!gate_times.empty(), ErrorCode::InvalidArgument, "no gate times");
    for (double t : gate_times) require(t >= 0.0, ErrorCode::InvalidArgument, "gate times must be >= 0");
    for (auto& m : dev.ladder.modes) m.g_m *= o.g_scale;

    const int qlevels = residual_jc ? o.qubit_levels : 2;
    const HilbertLayout layout = HilbertLayout::for_modes(dev.ladder, {o.mode_b, o.mode_c}, qlevels, o.cutoff);
    HamiltonianSchedule h;
    if (residual_jc) {
        h = build_hamiltonian(dev, drive, layout, Frame::Displaced);
    } else {
        const EffectiveModel model = build_effective_model(dev, drive, {o.mode_b, o.mode_c}, o.model);
        h = bilinear_hamiltonian(eom_matrix(model, model.delta_21 - model.fsr), layout, model.modes);
    }
    const QuantumState psi0 = hom_initial_state(layout, o.mode_b, o.mode_c, o.preparation);

    std::vector<std::size_t> order(gate_times.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return gate_times[a] < gate_times[b]; });
    std::vector<double> grid{0.0};
    for (auto i : order) grid.push_back(gate_times[i]);

    std::vector<QuantumState> states;
    const bool mixed = psi0.kind == StateKind::Density;
    if (decoherence || mixed) {
        const auto channels = decoherence ? standard_collapses(dev, layout, residual_jc) : std::vector<CollapseChannel>{};
        states = evolve_lindblad(h, layout, psi0, channels, grid, o.lindblad);
    } else {
        states = evolve_schrodinger(h, psi0, grid, o.evolve);
    }
    std::vector<HomResult> out(gate_times.size());
    for (std::size_t k = 0; k < order.size(); ++k)
        out[order[k]] = hom_statistics(layout, states[k + 1], o.mode_b, o.mode_c, gate_times[order[k]]);
    return out;
}

struct HomBand {
    std::vector<double> tau;
    std::vector<double> ratio_low;
    std::vector<double> ratio_nominal;
    std::vector<double> ratio_high;
};

/// Min/max of ratio_bunched over g_m scaled by (1 - spread, 1, 1 + spread).
inline HomBand hom_band(const DeviceParameters& dev, const DriveConfiguration& drive, const std::vector<double>& gate_times,
                        bool decoherence, bool residual_jc, double spread = 0.03, HomOptions o = {},
                        unsigned threads = 1) {
    const std::vector<double> scales{1.0 - spread, 1.0, 1.0 + spread};
    const auto runs = parallel_map(
        scales.size(),
        [&](std::size_t i) {
            HomOptions oi = o;
            oi.g_scale = o.g_scale * scales[i];
            return hom_experiment(dev, drive, gate_times, decoherence, residual_jc, oi);
        },
        threads);
    HomBand b;
    b.tau = gate_times;
    for (std::size_t t = 0; t < gate_times.size(); ++t) {
        const double r0 = runs[0][t].ratio_bunched, r1 = runs[1][t].ratio_bunched, r2 = runs[2][t].ratio_bunched;
        b.ratio_low.push_back(std::min({r0, r1, r2}));
        b.ratio_nominal.push_back(r1);
        b.ratio_high.push_back(std::max({r0, r1, r2}));
    }
    return b;
}

}  // namespace cqad
