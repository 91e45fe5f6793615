#pragma once

// Readout fidelity bookkeeping for two phonon modes read out through the
// qubit, and the probability <-> expectation maps built from it.

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cqad/core/error.hpp"

namespace cqad {

/// One step of a readout chain: probability that a phonon prepared in |0>
/// (g) or |1> (e) survives this step with the right answer.
struct StepFidelity {
    std::string name;
    double g = 1.0;
    double e = 1.0;
};

struct ModeFidelity {
    double g = 1.0;
    double e = 1.0;
};

struct FidelityModel {
    std::array<ModeFidelity, 2> modes{};

    static FidelityModel ideal() { return {}; }
};

inline ModeFidelity compose_chain(const std::vector<StepFidelity>& steps) {
    ModeFidelity f;
    for (const auto& s : steps) {
        require(s.g > 0.0 && s.g <= 1.0 && s.e > 0.0 && s.e <= 1.0, ErrorCode::InvalidArgument,
                "step fidelity '" + s.name + "' must lie in (0, 1]");
        f.g *= s.g;
        f.e *= s.e;
    }
    return f;
}

inline FidelityModel compose_fidelities(const std::vector<StepFidelity>& mode_a, const std::vector<StepFidelity>& mode_b) {
    return {{compose_chain(mode_a), compose_chain(mode_b)}};
}

/// Readout chains of the reference tomography: the first mode also idles
/// during the 6 us wait between the two measurements.
/// Mode a is read second and idles during mode b's readout.
inline std::vector<StepFidelity> reference_chain_a() {
    return {{"swap", 1.0, 0.904}, {"wait", 1.0, 0.921}, {"assignment", 0.934, 0.788}};
}

inline std::vector<StepFidelity> reference_chain_b() { return {{"swap", 1.0, 0.883}, {"assignment", 0.934, 0.788}}; }

inline FidelityModel reference_fidelity_model() { return compose_fidelities(reference_chain_a(), reference_chain_b()); }

/// Single-mode map (1, <A>) -> (P0, P1): assignment matrix times the ideal
/// expectation-to-probability map.
inline Eigen::Matrix2d beta_matrix(const ModeFidelity& f) {
    Eigen::Matrix2d c;
    c << f.g, 1.0 - f.e, 1.0 - f.g, f.e;
    Eigen::Matrix2d ideal;
    ideal << 0.5, 0.5, 0.5, -0.5;
    return c * ideal;
}

/// (<II>, <IB>, <AI>, <AB>) -> (P00, P01, P10, P11), first index mode a.
inline Eigen::Matrix4d beta_matrix(const FidelityModel& m) {
    const Eigen::Matrix2d a = beta_matrix(m.modes[0]), b = beta_matrix(m.modes[1]);
    Eigen::Matrix4d k;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) k.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return k;
}

inline Eigen::Vector4d invert_beta(const Eigen::Vector4d& probabilities, const FidelityModel& m) {
    const Eigen::Matrix4d beta = beta_matrix(m);
    const Eigen::JacobiSVD<Eigen::Matrix4d> svd(beta);
    const auto& s = svd.singularValues();
    require(s(3) > 0.0 && s(0) / s(3) <= 1e12, ErrorCode::SingularBeta, "fidelity matrix is singular");
    return beta.partialPivLu().solve(probabilities);
}

}  // namespace cqad
