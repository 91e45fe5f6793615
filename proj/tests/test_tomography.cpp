#include <gtest/gtest.h>

#include <cmath>
#include <algorithm>
#include <numbers>
#include <random>

#include "cqad/tomography/fidelity.hpp"
#include "cqad/tomography/reconstruct.hpp"

using namespace cqad;

namespace {

DensityMatrix2Q projector(const Eigen::Vector4cd& v) { return v * v.adjoint(); }

DensityMatrix2Q random_state(std::mt19937_64& rng, int rank = 4) {
    std::normal_distribution<double> nd;
    Eigen::Matrix4cd a = Eigen::Matrix4cd::Zero();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < rank; ++j) a(i, j) = {nd(rng), nd(rng)};
    DensityMatrix2Q r = a * a.adjoint();
    return r / r.trace().real();
}

/// Bell fidelity 0.69 with the remaining weight on |00>.
DensityMatrix2Q target_069() {
    DensityMatrix2Q r = 0.69 * projector(bell_state(std::numbers::pi));
    r(0, 0) += 0.31;
    return r;
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::IoError;
}

double min_eigenvalue(const DensityMatrix2Q& r) {
    return Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd>(r, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

}  // namespace

TEST(ComposeFidelities, IdealChain) {
    const auto m = compose_fidelities({{"s", 1.0, 1.0}}, {});
    for (const auto& f : m.modes) {
        EXPECT_DOUBLE_EQ(f.g, 1.0);
        EXPECT_DOUBLE_EQ(f.e, 1.0);
    }
}

TEST(ComposeFidelities, ReferenceChains) {
    const auto m = reference_fidelity_model();
    EXPECT_NEAR(m.modes[0].g, 0.934, 0.005);
    EXPECT_NEAR(m.modes[0].e, 0.656, 0.005);
    EXPECT_NEAR(m.modes[1].g, 0.934, 0.005);
    EXPECT_NEAR(m.modes[1].e, 0.695, 0.005);
    EXPECT_EQ(code_of([] { compose_chain({{"bad", 1.2, 0.9}}); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { compose_chain({{"bad", 0.9, 0.0}}); }), ErrorCode::InvalidArgument);
}

TEST(InvertBeta, IdealModel) {
    const auto id = FidelityModel::ideal();
    const Eigen::Vector4d m = invert_beta(Eigen::Vector4d(1, 0, 0, 0), id);
    EXPECT_LE((m - Eigen::Vector4d(1, 1, 1, 1)).cwiseAbs().maxCoeff(), 1e-15);
    const Eigen::Vector4d u = invert_beta(Eigen::Vector4d::Constant(0.25), id);
    EXPECT_LE((u - Eigen::Vector4d(1, 0, 0, 0)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(InvertBeta, RoundTripProperty) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0), uf(0.55, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        FidelityModel fm{{ModeFidelity{uf(rng), uf(rng)}, ModeFidelity{uf(rng), uf(rng)}}};
        const double a = u(rng), b = u(rng);
        const Eigen::Vector4d m(1.0, b, a, std::clamp(a * b + 0.3 * u(rng), -1.0, 1.0));
        EXPECT_LE((invert_beta(beta_matrix(fm) * m, fm) - m).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(InvertBeta, SingularModel) {
    FidelityModel fm{{ModeFidelity{0.5, 0.5}, ModeFidelity{0.9, 0.9}}};
    EXPECT_EQ(code_of([&] { invert_beta(Eigen::Vector4d::Constant(0.25), fm); }), ErrorCode::SingularBeta);
}

TEST(LinearInversion, MixedAndBell) {
    const auto id = FidelityModel::ideal();
    const DensityMatrix2Q mixed = DensityMatrix2Q::Identity() * 0.25;
    EXPECT_LE((linear_inversion(synthetic_records(mixed, id), id) - mixed).cwiseAbs().maxCoeff(), 1e-12);
    const DensityMatrix2Q bell = projector(bell_state(0.0));
    const auto r = linear_inversion(synthetic_records(bell, id), id);
    EXPECT_NEAR(bell_fidelity(r).fidelity, 1.0, 1e-12);
    EXPECT_NEAR(r.trace().real(), 1.0, 1e-12);
    EXPECT_LE((r - r.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(LinearInversion, PerturbedExpectationIsUnphysical) {
    const auto id = FidelityModel::ideal();
    auto recs = synthetic_records(projector(bell_state(0.0)), id);
    // <XX> = <YY> = <ZZ> = 1 has no physical state
    for (auto& r : recs)
        if (r.a == Pauli::Z && r.b == Pauli::Z) r.p = Eigen::Vector4d(0.5, 0.0, 0.0, 0.5);
    const auto rho = linear_inversion(recs, id);
    EXPECT_NEAR(min_eigenvalue(rho), -0.5, 1e-12);
    EXPECT_GE(min_eigenvalue(mle_reconstruct(recs, id).rho), -1e-10);
}

TEST(LinearInversion, MissingOperator) {
    const auto id = FidelityModel::ideal();
    auto recs = synthetic_records(DensityMatrix2Q::Identity() * 0.25, id);
    recs.erase(recs.begin() + 4);
    EXPECT_EQ(code_of([&] { linear_inversion(recs, id); }), ErrorCode::MissingOperator);
}

TEST(Mle, NoiselessBell) {
    const auto id = FidelityModel::ideal();
    const auto r = mle_reconstruct(synthetic_records(projector(bell_state(0.0)), id), id);
    EXPECT_GE(bell_fidelity(r.rho).fidelity, 0.999);
}

TEST(Mle, MaximallyMixedFromShots) {
    const auto id = FidelityModel::ideal();
    const DensityMatrix2Q mixed = DensityMatrix2Q::Identity() * 0.25;
    const auto r = mle_reconstruct(synthetic_records(mixed, id, 5000, 21), id);
    EXPECT_LE(trace_distance(r.rho, mixed), 0.01);
}

TEST(Mle, MaximallyMixedErrorShrinksWithShots) {
    const auto id = FidelityModel::ideal();
    const DensityMatrix2Q mixed = DensityMatrix2Q::Identity() * 0.25;
    auto median_distance = [&](long shots) {
        std::vector<double> d;
        for (int seed = 0; seed < 21; ++seed)
            d.push_back(trace_distance(mle_reconstruct(synthetic_records(mixed, id, shots, seed), id).rho, mixed));
        std::nth_element(d.begin(), d.begin() + 10, d.end());
        return d[10];
    };
    const double d5 = median_distance(5000), d45 = median_distance(45000);
    // sampling noise scales as 1/sqrt(shots)
    EXPECT_NEAR(d5 / d45, 3.0, 0.6);
    EXPECT_LE(d45, 0.01);
}

TEST(Mle, ForwardBackwardThroughReferenceModel) {
    const auto fm = reference_fidelity_model();
    const auto rho = target_069();
    EXPECT_NEAR(bell_fidelity(rho).fidelity, 0.69, 1e-12);
    const auto exact = mle_reconstruct(synthetic_records(rho, fm), fm);
    EXPECT_NEAR(bell_fidelity(exact.rho).fidelity, 0.69, 1e-4);
    const auto sampled = mle_reconstruct(synthetic_records(rho, fm, 5000, 3), fm);
    EXPECT_NEAR(bell_fidelity(sampled.rho).fidelity, 0.69, 0.03);
}

TEST(Mle, MultinomialLikelihoodOption) {
    const auto fm = reference_fidelity_model();
    MleOptions o;
    o.likelihood = Likelihood::Multinomial;
    const auto r = mle_reconstruct(synthetic_records(target_069(), fm, 5000, 9), fm, o);
    EXPECT_NEAR(bell_fidelity(r.rho).fidelity, 0.69, 0.03);
}

TEST(MleProperty, AgreesWithLinearInversionOnExactRecords) {
    std::mt19937_64 rng(3);
    const auto id = FidelityModel::ideal();
    for (int trial = 0; trial < 5; ++trial) {
        const auto rho = random_state(rng);
        const auto recs = synthetic_records(rho, id);
        EXPECT_LE(trace_distance(mle_reconstruct(recs, id).rho, linear_inversion(recs, id)), 1e-6);
    }
}

TEST(MleProperty, PhysicalOnAdversarialRecords) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto fm = reference_fidelity_model();
    MleOptions o;
    o.random_starts = 0;
    o.simplex.max_iter = 300;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<MeasurementRecord> recs;
        for (Pauli a : measured_paulis)
            for (Pauli b : measured_paulis) {
                Eigen::Vector4d p(u(rng), u(rng), u(rng), u(rng));
                if (trial % 3 == 0) p(trial % 4) = 0.0;
                recs.push_back({a, b, p / p.sum(), 5000});
            }
        const auto r = mle_reconstruct(recs, fm, o).rho;
        EXPECT_GE(min_eigenvalue(r), -1e-10);
        EXPECT_NEAR(r.trace().real(), 1.0, 1e-9);
        EXPECT_LE((r - r.adjoint()).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(BellFidelity, KnownStates) {
    const auto b0 = bell_fidelity(projector(bell_state(0.0)));
    EXPECT_NEAR(b0.fidelity, 1.0, 1e-12);
    EXPECT_NEAR(b0.phi, 0.0, 1e-6);
    const auto b3 = bell_fidelity(projector(bell_state(std::numbers::pi / 3)));
    EXPECT_NEAR(b3.fidelity, 1.0, 1e-12);
    EXPECT_NEAR(b3.phi, std::numbers::pi / 3, 1e-6);
    EXPECT_NEAR(bell_fidelity(DensityMatrix2Q::Identity() * 0.25).fidelity, 0.25, 1e-12);
}

TEST(BellFidelity, GridAndRefinementAgree) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const auto rho = random_state(rng, 2);
        const auto b = bell_fidelity(rho);
        double dense = 0.0;
        for (int i = 0; i < 20000; ++i) {
            const Eigen::Vector4cd v = bell_state(-std::numbers::pi + 2.0 * std::numbers::pi * i / 20000.0);
            dense = std::max(dense, (v.adjoint() * rho * v)(0).real());
        }
        EXPECT_NEAR(b.fidelity, dense, 1e-6);
        // pure-target shortcut equals the general Uhlmann formula, up to matrix sqrt noise
        const Eigen::Vector4cd v = bell_state(b.phi);
        EXPECT_NEAR(uhlmann_fidelity(rho, Eigen::MatrixXcd(v * v.adjoint())), b.fidelity, 1e-7);
        // closed form of the optimal phase
        EXPECT_NEAR(std::remainder(b.phi + std::arg(rho(1, 2)), 2 * std::numbers::pi), 0.0, 1e-5);
    }
}

TEST(UhlmannFidelity, MixedStates) {
    std::mt19937_64 rng(4);
    const auto a = random_state(rng), b = random_state(rng);
    EXPECT_NEAR(uhlmann_fidelity(a, a), 1.0, 1e-9);
    EXPECT_NEAR(uhlmann_fidelity(a, b), uhlmann_fidelity(b, a), 1e-9);
    const DensityMatrix2Q da = DensityMatrix2Q(Eigen::Vector4d(0.1, 0.2, 0.3, 0.4).cast<std::complex<double>>().asDiagonal());
    const DensityMatrix2Q db = DensityMatrix2Q(Eigen::Vector4d(0.4, 0.3, 0.2, 0.1).cast<std::complex<double>>().asDiagonal());
    const double classical = std::pow(std::sqrt(0.04) + std::sqrt(0.06) + std::sqrt(0.06) + std::sqrt(0.04), 2);
    EXPECT_NEAR(uhlmann_fidelity(da, db), classical, 1e-12);
}

TEST(Bootstrap, ErrorScalesWithShots) {
    const auto fm = reference_fidelity_model();
    const auto rho = target_069();
    auto recs = synthetic_records(rho, fm, 5000, 3);
    const auto e5 = bootstrap_errors(recs, fm, 200);
    EXPECT_GT(e5.std_error, 0.003);
    EXPECT_LT(e5.std_error, 0.03);
    for (auto& r : recs) r.shots *= 2;
    const auto e10 = bootstrap_errors(recs, fm, 200);
    EXPECT_NEAR(e5.std_error / e10.std_error, std::numbers::sqrt2, 0.3);
    for (auto& r : recs) r.shots = 5'000'000'000L;
    EXPECT_LT(bootstrap_errors(recs, fm, 100).std_error, 1e-3);
}

TEST(Bootstrap, DeterministicAcrossThreads) {
    const auto fm = reference_fidelity_model();
    const auto recs = synthetic_records(target_069(), fm, 5000, 3);
    BootstrapOptions a, b;
    b.threads = 3;
    const auto ra = bootstrap_errors(recs, fm, 100, a);
    const auto rb = bootstrap_errors(recs, fm, 100, b);
    EXPECT_EQ(ra.samples, rb.samples);
    EXPECT_THROW(bootstrap_errors(recs, fm, 50), Error);
}
