#pragma once

// Truncated qubit (x) phonon Fock spaces, states and ladder operators.

#include <algorithm>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>

#include "cqad/core/error.hpp"
#include "cqad/core/types.hpp"

namespace cqad {

using cplx = std::complex<double>;
using SpMat = Eigen::SparseMatrix<cplx>;

inline constexpr std::size_t default_dimension_cap = 20000;

/// Tensor layout: qubit factor first, then the phonon modes ascending in
/// frequency. The last factor varies fastest.
class HilbertLayout {
public:
    HilbertLayout(int qubit_levels, std::vector<std::pair<std::string, int>> modes,
                  std::size_t cap = default_dimension_cap)
        : qubit_levels_(qubit_levels), modes_(std::move(modes)) {
        require(qubit_levels_ >= 2, ErrorCode::InvalidArgument, "qubit_levels >= 2");
        std::size_t dim = static_cast<std::size_t>(qubit_levels_);
        for (const auto& [label, cut] : modes_) {
            require(cut >= 2, ErrorCode::InvalidArgument, "phonon cutoff >= 2 for mode " + label);
            dim *= static_cast<std::size_t>(cut);
            require(dim <= cap, ErrorCode::DimensionCap, "Hilbert space dimension exceeds the configured cap");
        }
        dim_ = dim;
        strides_.assign(modes_.size() + 1, 1);
        for (std::size_t k = modes_.size(); k-- > 0;) strides_[k] = strides_[k + 1] * static_cast<std::size_t>(modes_[k].second);
    }

    /// Layout for a subset of the ladder, ordered by frequency.
    static HilbertLayout for_modes(const ModeLadder& ladder, const std::vector<std::string>& labels, int qubit_levels,
                                   int cutoff, std::size_t cap = default_dimension_cap) {
        std::vector<std::size_t> idx;
        for (const auto& l : labels) idx.push_back(ladder.index_of(l));
        std::sort(idx.begin(), idx.end());
        std::vector<std::pair<std::string, int>> modes;
        for (auto i : idx) modes.emplace_back(ladder.modes[i].label, cutoff);
        return HilbertLayout(qubit_levels, std::move(modes), cap);
    }

    std::size_t dimension() const { return dim_; }
    int qubit_levels() const { return qubit_levels_; }
    std::size_t mode_count() const { return modes_.size(); }
    const std::vector<std::pair<std::string, int>>& modes() const { return modes_; }

    /// Factor index of a mode (0 is the qubit).
    std::size_t factor_of(const std::string& mode) const {
        for (std::size_t k = 0; k < modes_.size(); ++k)
            if (modes_[k].first == mode) return k + 1;
        fail(ErrorCode::UnknownMode, "mode '" + mode + "' not in layout");
    }

    int levels(std::size_t factor) const { return factor == 0 ? qubit_levels_ : modes_[factor - 1].second; }

    std::size_t stride(std::size_t factor) const { return factor == 0 ? strides_[0] : strides_[factor]; }

    int occupation(std::size_t index, std::size_t factor) const {
        return static_cast<int>((index / stride(factor)) % static_cast<std::size_t>(levels(factor)));
    }

    /// Index of the product state with the given occupations (qubit first).
    std::size_t index(const std::vector<int>& occ) const {
        require(occ.size() == modes_.size() + 1, ErrorCode::InvalidArgument, "occupation list has the wrong length");
        std::size_t i = 0;
        for (std::size_t f = 0; f < occ.size(); ++f) {
            require(occ[f] >= 0 && occ[f] < levels(f), ErrorCode::InvalidArgument, "occupation outside cutoff");
            i += static_cast<std::size_t>(occ[f]) * stride(f);
        }
        return i;
    }

    /// Lowering operator of one factor.
    SpMat lowering(std::size_t factor) const {
        std::vector<Eigen::Triplet<cplx>> t;
        for (std::size_t i = 0; i < dim_; ++i) {
            const int n = occupation(i, factor);
            if (n > 0) t.emplace_back(static_cast<int>(i - stride(factor)), static_cast<int>(i), std::sqrt(static_cast<double>(n)));
        }
        SpMat a(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
        a.setFromTriplets(t.begin(), t.end());
        return a;
    }

    SpMat number(std::size_t factor) const {
        std::vector<Eigen::Triplet<cplx>> t;
        for (std::size_t i = 0; i < dim_; ++i) {
            const int n = occupation(i, factor);
            if (n > 0) t.emplace_back(static_cast<int>(i), static_cast<int>(i), static_cast<double>(n));
        }
        SpMat a(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
        a.setFromTriplets(t.begin(), t.end());
        return a;
    }

    SpMat identity() const {
        SpMat id(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
        id.setIdentity();
        return id;
    }

private:
    int qubit_levels_;
    std::vector<std::pair<std::string, int>> modes_;
    std::size_t dim_ = 0;
    std::vector<std::size_t> strides_;
};

enum class StateKind { Pure, Density };

struct QuantumState {
    StateKind kind = StateKind::Pure;
    Eigen::VectorXcd psi;
    Eigen::MatrixXcd rho;

    static QuantumState pure(Eigen::VectorXcd v) { return {StateKind::Pure, std::move(v), {}}; }
    static QuantumState density(Eigen::MatrixXcd r) { return {StateKind::Density, {}, std::move(r)}; }

    Eigen::Index dimension() const { return kind == StateKind::Pure ? psi.size() : rho.rows(); }

    Eigen::MatrixXcd density_matrix() const { return kind == StateKind::Pure ? Eigen::MatrixXcd(psi * psi.adjoint()) : rho; }

    /// Diagonal of the density matrix in the product basis.
    Eigen::VectorXd probabilities() const {
        if (kind == StateKind::Pure) return psi.cwiseAbs2();
        return rho.diagonal().real();
    }
};

inline void validate(const QuantumState& s) {
    if (s.kind == StateKind::Pure) {
        require(std::fabs(s.psi.norm() - 1.0) <= 1e-9, ErrorCode::InvalidState, "pure state must have unit norm");
        return;
    }
    require(s.rho.rows() == s.rho.cols(), ErrorCode::InvalidState, "density matrix must be square");
    require((s.rho - s.rho.adjoint()).cwiseAbs().maxCoeff() <= 1e-10, ErrorCode::InvalidState,
            "density matrix must be Hermitian");
    require(std::fabs(s.rho.trace().real() - 1.0) <= 1e-9, ErrorCode::InvalidState, "density matrix must have unit trace");
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(s.rho, Eigen::EigenvaluesOnly);
    require(es.eigenvalues().minCoeff() >= -1e-9, ErrorCode::InvalidState, "density matrix must be positive");
}

/// Product basis state.
inline QuantumState basis_state(const HilbertLayout& layout, const std::vector<int>& occ) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(layout.dimension()));
    v(static_cast<Eigen::Index>(layout.index(occ))) = 1.0;
    return QuantumState::pure(std::move(v));
}

/// Marginal Fock distribution of one mode.
inline std::vector<double> fock_populations(const HilbertLayout& layout, const QuantumState& s, const std::string& mode) {
    const auto f = layout.factor_of(mode);
    std::vector<double> p(static_cast<std::size_t>(layout.levels(f)), 0.0);
    const Eigen::VectorXd diag = s.probabilities();
    for (std::size_t i = 0; i < layout.dimension(); ++i) p[static_cast<std::size_t>(layout.occupation(i, f))] += diag(static_cast<Eigen::Index>(i));
    return p;
}

/// Joint distribution P(n_a, n_b) of two modes.
inline Eigen::MatrixXd joint_populations(const HilbertLayout& layout, const QuantumState& s, const std::string& a,
                                         const std::string& b) {
    const auto fa = layout.factor_of(a), fb = layout.factor_of(b);
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(layout.levels(fa), layout.levels(fb));
    const Eigen::VectorXd diag = s.probabilities();
    for (std::size_t i = 0; i < layout.dimension(); ++i) p(layout.occupation(i, fa), layout.occupation(i, fb)) += diag(static_cast<Eigen::Index>(i));
    return p;
}

/// Qubit level populations.
inline std::vector<double> qubit_populations(const HilbertLayout& layout, const QuantumState& s) {
    std::vector<double> p(static_cast<std::size_t>(layout.qubit_levels()), 0.0);
    const Eigen::VectorXd diag = s.probabilities();
    for (std::size_t i = 0; i < layout.dimension(); ++i) p[static_cast<std::size_t>(layout.occupation(i, 0))] += diag(static_cast<Eigen::Index>(i));
    return p;
}

}  // namespace cqad
