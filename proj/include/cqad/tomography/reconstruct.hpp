#pragma once

// Two-mode state reconstruction from joint Pauli measurement records.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "cqad/core/error.hpp"
#include "cqad/numeric/optimize.hpp"
#include "cqad/numeric/parallel.hpp"
#include "cqad/tomography/fidelity.hpp"

namespace cqad {

using DensityMatrix2Q = Eigen::Matrix4cd;

enum class Pauli { I = 0, X = 1, Y = 2, Z = 3 };

inline constexpr std::array<Pauli, 3> measured_paulis{Pauli::X, Pauli::Y, Pauli::Z};

inline char pauli_name(Pauli p) { return "IXYZ"[static_cast<int>(p)]; }

inline Pauli pauli_from_name(char c) {
    switch (c) {
    case 'I': return Pauli::I;
    case 'X': return Pauli::X;
    case 'Y': return Pauli::Y;
    case 'Z': return Pauli::Z;
    default: fail(ErrorCode::ParseError, std::string("unknown Pauli operator '") + c + "'");
    }
}

inline Eigen::Matrix2cd pauli_matrix(Pauli p) {
    using c = std::complex<double>;
    Eigen::Matrix2cd m;
    switch (p) {
    case Pauli::I: m << 1, 0, 0, 1; break;
    case Pauli::X: m << 0, 1, 1, 0; break;
    case Pauli::Y: m << 0, c(0, -1), c(0, 1), 0; break;
    case Pauli::Z: m << 1, 0, 0, -1; break;
    }
    return m;
}

/// A (x) B with mode a as the most significant index.
inline Eigen::Matrix4cd pauli_product(Pauli a, Pauli b) {
    const Eigen::Matrix2cd ma = pauli_matrix(a), mb = pauli_matrix(b);
    Eigen::Matrix4cd k;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) k.block<2, 2>(2 * i, 2 * j) = ma(i, j) * mb;
    return k;
}

struct MeasurementRecord {
    Pauli a = Pauli::Z;
    Pauli b = Pauli::Z;
    Eigen::Vector4d p = Eigen::Vector4d::Zero();  ///< P00, P01, P10, P11
    long shots = 0;                               ///< 0 for exact probabilities
};

inline void validate(const MeasurementRecord& r) {
    require(std::fabs(r.p.sum() - 1.0) <= 1e-9, ErrorCode::InvalidArgument, "record probabilities must sum to 1");
    require(r.p.allFinite(), ErrorCode::NonFiniteValue, "record probabilities must be finite");
    require(r.shots >= 0, ErrorCode::InvalidArgument, "shots must be >= 0");
}

/// All 16 Pauli expectations, index 4 a + b.
inline std::array<double, 16> pauli_expectations(const DensityMatrix2Q& rho) {
    std::array<double, 16> e{};
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            e[static_cast<std::size_t>(4 * a + b)] = (rho * pauli_product(Pauli(a), Pauli(b))).trace().real();
    return e;
}

inline DensityMatrix2Q density_from_expectations(const std::array<double, 16>& e) {
    DensityMatrix2Q rho = DensityMatrix2Q::Zero();
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) rho += 0.25 * e[static_cast<std::size_t>(4 * a + b)] * pauli_product(Pauli(a), Pauli(b));
    return rho;
}

/// Outcome probabilities of measuring A on mode a and B on mode b through the fidelity model.
inline Eigen::Vector4d predicted_probabilities(const std::array<double, 16>& e, Pauli a, Pauli b, const Eigen::Matrix4d& beta) {
    const int ia = static_cast<int>(a), ib = static_cast<int>(b);
    const Eigen::Vector4d m(1.0, e[static_cast<std::size_t>(ib)], e[static_cast<std::size_t>(4 * ia)],
                            e[static_cast<std::size_t>(4 * ia + ib)]);
    return beta * m;
}

/// Records for the nine XYZ pairs; exact when shots == 0, multinomially sampled otherwise.
inline std::vector<MeasurementRecord> synthetic_records(const DensityMatrix2Q& rho, const FidelityModel& model, long shots = 0,
                                                        std::uint64_t seed = 1) {
    std::mt19937_64 rng(seed);
    const auto e = pauli_expectations(rho);
    const Eigen::Matrix4d beta = beta_matrix(model);
    std::vector<MeasurementRecord> out;
    for (Pauli a : measured_paulis)
        for (Pauli b : measured_paulis) {
            MeasurementRecord r{a, b, predicted_probabilities(e, a, b, beta).cwiseMax(0.0), shots};
            r.p /= r.p.sum();
            if (shots > 0) {
                // multinomial as a chain of binomials
                long left = shots;
                double mass = 1.0;
                Eigen::Vector4d counts = Eigen::Vector4d::Zero();
                for (int k = 0; k < 3 && left > 0; ++k) {
                    const double q = mass > 0.0 ? std::clamp(r.p(k) / mass, 0.0, 1.0) : 0.0;
                    const long n = std::binomial_distribution<long>(left, q)(rng);
                    counts(k) = static_cast<double>(n);
                    left -= n;
                    mass -= r.p(k);
                }
                counts(3) = static_cast<double>(left);
                r.p = counts / static_cast<double>(shots);
            }
            out.push_back(r);
        }
    return out;
}

/// Fidelity-corrected expectations of every Pauli pair; single-mode terms
/// are averaged over all records that contain them.
inline std::array<double, 16> measured_expectations(const std::vector<MeasurementRecord>& records, const FidelityModel& model) {
    std::array<double, 16> sum{}, count{};
    std::array<bool, 16> seen{};
    for (const auto& r : records) {
        validate(r);
        if (r.a == Pauli::I || r.b == Pauli::I) continue;
        const Eigen::Vector4d m = invert_beta(r.p, model);
        const auto ia = static_cast<std::size_t>(r.a), ib = static_cast<std::size_t>(r.b);
        sum[4 * ia + ib] += m(3);
        count[4 * ia + ib] += 1;
        sum[ib] += m(1);
        count[ib] += 1;
        sum[4 * ia] += m(2);
        count[4 * ia] += 1;
        seen[4 * ia + ib] = true;
    }
    for (Pauli a : measured_paulis)
        for (Pauli b : measured_paulis)
            require(seen[static_cast<std::size_t>(4 * static_cast<int>(a) + static_cast<int>(b))], ErrorCode::MissingOperator,
                    std::string("no record for operator pair ") + pauli_name(a) + pauli_name(b));
    std::array<double, 16> e{};
    e[0] = 1.0;
    for (std::size_t i = 1; i < 16; ++i) e[i] = sum[i] / count[i];
    return e;
}

/// rho_M = sum_AB <AB> A B / 4; Hermitian with unit trace but not necessarily positive.
inline DensityMatrix2Q linear_inversion(const std::vector<MeasurementRecord>& records, const FidelityModel& model) {
    return density_from_expectations(measured_expectations(records, model));
}

enum class Likelihood { Gaussian, Multinomial };

struct MleOptions {
    Likelihood likelihood = Likelihood::Gaussian;
    int random_starts = 5;
    bool linear_start = true;  ///< also start from the PSD projection of rho_M
    std::uint64_t seed = 7;
    opt::NelderMeadOptions simplex{2000, 1e-10, 1e-14, {}};
    opt::BfgsOptions polish{300, 1e-12, 1e-7};
};

struct MleResult {
    DensityMatrix2Q rho;
    double cost = 0.0;
    bool converged = false;
};

namespace detail {

inline DensityMatrix2Q cholesky_density(const std::vector<double>& x) {
    Eigen::Matrix4cd t = Eigen::Matrix4cd::Zero();
    std::size_t k = 0;
    for (int i = 0; i < 4; ++i) t(i, i) = x[k++];
    for (int i = 1; i < 4; ++i)
        for (int j = 0; j < i; ++j, k += 2) t(i, j) = {x[k], x[k + 1]};
    DensityMatrix2Q rho = t.adjoint() * t;
    const double tr = rho.trace().real();
    return tr > 0.0 ? DensityMatrix2Q(rho / tr) : DensityMatrix2Q(DensityMatrix2Q::Identity() * 0.25);
}

/// Lower-triangular T with T^dag T proportional to the PSD part of rho.
inline std::vector<double> cholesky_parameters(const DensityMatrix2Q& rho) {
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho);
    const Eigen::Vector4d lam = es.eigenvalues().cwiseMax(1e-6);
    DensityMatrix2Q psd = es.eigenvectors() * lam.cast<std::complex<double>>().asDiagonal() * es.eigenvectors().adjoint();
    // reversal permutation turns Eigen's rho = L L^dag into T^dag T with T lower
    Eigen::Matrix4cd p = Eigen::Matrix4cd::Zero();
    for (int i = 0; i < 4; ++i) p(i, 3 - i) = 1.0;
    const Eigen::Matrix4cd l = Eigen::LLT<Eigen::Matrix4cd>(p * psd * p).matrixL();
    const Eigen::Matrix4cd t = (p * l * p).adjoint();
    std::vector<double> x;
    for (int i = 0; i < 4; ++i) x.push_back(t(i, i).real());
    for (int i = 1; i < 4; ++i)
        for (int j = 0; j < i; ++j) {
            x.push_back(t(i, j).real());
            x.push_back(t(i, j).imag());
        }
    return x;
}

}  // namespace detail

/// Physical state closest to the records through the forward fidelity map,
/// over rho = T^dag T / tr(T^dag T) with T lower triangular (16 reals).
inline MleResult mle_reconstruct(const std::vector<MeasurementRecord>& records, const FidelityModel& model,
                                 const MleOptions& o = {}) {
    for (const auto& r : records) validate(r);
    require(!records.empty(), ErrorCode::MissingOperator, "no measurement records");
    const Eigen::Matrix4d beta = beta_matrix(model);
    auto cost = [&](const std::vector<double>& x) {
        const auto e = pauli_expectations(detail::cholesky_density(x));
        double c = 0.0;
        for (const auto& r : records) {
            if (r.a == Pauli::I && r.b == Pauli::I) continue;
            const Eigen::Vector4d pred = predicted_probabilities(e, r.a, r.b, beta);
            if (o.likelihood == Likelihood::Gaussian) {
                c += (pred - r.p).squaredNorm();
            } else {
                for (int k = 0; k < 4; ++k) c -= r.p(k) * std::log(std::max(pred(k), 1e-12));
            }
        }
        return c;
    };
    std::vector<std::vector<double>> starts;
    if (o.linear_start) {
        bool complete = true;
        DensityMatrix2Q lin;
        try {
            lin = linear_inversion(records, model);
        } catch (const Error&) {
            complete = false;
        }
        if (complete) starts.push_back(detail::cholesky_parameters(lin));
    }
    std::mt19937_64 rng(o.seed);
    std::normal_distribution<double> nd;
    for (int s = 0; s < o.random_starts; ++s) {
        std::vector<double> x(16);
        for (auto& v : x) v = nd(rng);
        starts.push_back(std::move(x));
    }
    require(!starts.empty(), ErrorCode::InvalidArgument, "MLE needs at least one start");
    MleResult best;
    best.cost = std::numeric_limits<double>::infinity();
    std::vector<double> best_x;
    for (auto& x0 : starts) {
        auto nmo = o.simplex;
        if (nmo.initial_step.empty()) nmo.initial_step.assign(16, 0.1);
        const auto nm = opt::nelder_mead(cost, x0, nmo);
        const auto bf = opt::bfgs(cost, nm.x, o.polish);
        const auto& r = bf.fx <= nm.fx ? bf : nm;
        if (r.fx < best.cost) {
            best.cost = r.fx;
            best_x = r.x;
            best.converged = bf.converged;
        }
    }
    // a best start that ran out of iterations gets further polishing rounds
    for (int round = 0; round < 3 && !best.converged; ++round) {
        const auto bf = opt::bfgs(cost, best_x, o.polish);
        if (bf.fx <= best.cost) {
            best.cost = bf.fx;
            best_x = bf.x;
        }
        best.converged = bf.converged;
    }
    require(std::isfinite(best.cost) && best.converged, ErrorCode::OptimizationFailure, "MLE did not converge");
    best.rho = detail::cholesky_density(best_x);
    best.rho = 0.5 * (best.rho + best.rho.adjoint()).eval();
    best.rho /= best.rho.trace().real();
    return best;
}

/// Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
inline double uhlmann_fidelity(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
    const Eigen::VectorXd s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXcd root = es.eigenvectors() * s.cast<std::complex<double>>().asDiagonal() * es.eigenvectors().adjoint();
    const Eigen::MatrixXcd m = root * sigma * root;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> em(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    const double tr = em.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    return tr * tr;
}

inline double trace_distance(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma) {
    const Eigen::MatrixXcd d = rho - sigma;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

/// (|01> + e^{i phi} |10>) / sqrt 2
inline Eigen::Vector4cd bell_state(double phi) {
    Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
    v(1) = 1.0 / std::numbers::sqrt2;
    v(2) = std::polar(1.0 / std::numbers::sqrt2, phi);
    return v;
}

struct BellFidelity {
    double fidelity = 0.0;
    double phi = 0.0;  ///< in (-pi, pi]
};

/// Maximum fidelity to the single-excitation Bell family over the relative phase.
inline BellFidelity bell_fidelity(const DensityMatrix2Q& rho) {
    // the target is pure, so the Uhlmann fidelity is <psi|rho|psi>
    auto f = [&](double phi) {
        const Eigen::Vector4cd v = bell_state(phi);
        return (v.adjoint() * rho * v)(0).real();
    };
    constexpr int grid = 72;
    const double step = 2.0 * std::numbers::pi / grid;
    double best_phi = -std::numbers::pi, best = -1.0;
    for (int i = 0; i < grid; ++i) {
        const double phi = -std::numbers::pi + i * step;
        const double v = f(phi);
        if (v > best) {
            best = v;
            best_phi = phi;
        }
    }
    const auto r = opt::brent_minimize([&](double phi) { return -f(phi); }, best_phi - step, best_phi + step, 1e-12);
    BellFidelity out{-r.fx, std::remainder(r.x, 2.0 * std::numbers::pi)};
    if (out.phi <= -std::numbers::pi) out.phi += 2.0 * std::numbers::pi;
    if (best > out.fidelity) out = {best, best_phi};
    return out;
}

struct BootstrapOptions {
    std::uint64_t seed = 11;
    unsigned threads = 1;
    MleOptions mle{Likelihood::Gaussian, 0, true, 7, {1000, 1e-9, 1e-13, {}}, {300, 1e-11, 1e-7}};
};

struct BootstrapResult {
    double std_error = 0.0;
    double mean = 0.0;
    std::vector<double> samples;
};

/// Monte-Carlo propagation of the sampling error: every outcome probability
/// is redrawn from P +- sqrt(P (1 - P) / shots), renormalized, and the MLE
/// rerun. Resample i uses its own stream seeded from (seed, i).
inline BootstrapResult bootstrap_errors(const std::vector<MeasurementRecord>& records, const FidelityModel& model,
                                        int n_resamples, const BootstrapOptions& o = {}) {
    require(n_resamples >= 100, ErrorCode::InvalidArgument, "bootstrap needs at least 100 resamples");
    for (const auto& r : records) {
        validate(r);
        require(r.shots > 0, ErrorCode::InvalidArgument, "bootstrap needs shot counts on every record");
    }
    BootstrapResult out;
    out.samples = parallel_map(
        static_cast<std::size_t>(n_resamples),
        [&](std::size_t i) {
            std::seed_seq seq{static_cast<std::uint32_t>(o.seed), static_cast<std::uint32_t>(o.seed >> 32),
                              static_cast<std::uint32_t>(i)};
            std::mt19937_64 rng(seq);
            std::normal_distribution<double> nd;
            auto resampled = records;
            for (auto& r : resampled) {
                for (int k = 0; k < 4; ++k)
                    r.p(k) = std::max(0.0, r.p(k) + nd(rng) * std::sqrt(r.p(k) * (1.0 - r.p(k)) / static_cast<double>(r.shots)));
                r.p /= r.p.sum();
            }
            return bell_fidelity(mle_reconstruct(resampled, model, o.mle).rho).fidelity;
        },
        o.threads);
    double s = 0.0, s2 = 0.0;
    for (double v : out.samples) s += v;
    out.mean = s / n_resamples;
    for (double v : out.samples) s2 += (v - out.mean) * (v - out.mean);
    out.std_error = std::sqrt(s2 / (n_resamples - 1));
    return out;
}

}  // namespace cqad
