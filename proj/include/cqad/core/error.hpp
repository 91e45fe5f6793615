#pragma once

// Error codes shared by every module. Each invariant violation has its own
// code; the category decides the CLI exit status.

#include <stdexcept>
#include <string>
#include <string_view>

namespace cqad {

enum class ErrorCode {
    // validation of domain types
    NonFiniteValue,
    NonPositiveQubitFrequency,
    NonPositiveAnharmonicity,
    NonPositiveT1,
    NonPositiveT2,
    UnphysicalT2,
    NegativeDecayRate,
    EmptyLadder,
    DuplicateModeLabel,
    NonAscendingLadder,
    NonPositiveFsr,
    DriveOrder,
    NegativeDriveAmplitude,
    NegativeProbeStrength,
    InvalidArgument,
    UnknownMode,
    // numerical
    ZeroDetuning,
    SingularDetuning,
    DomainError,
    SidebandCollision,
    NoConvergence,
    ConvergenceError,
    FitError,
    NoOscillation,
    AssumptionViolated,
    DimensionCap,
    InvalidRates,
    SingularBeta,
    MissingOperator,
    OptimizationFailure,
    BoundsViolation,
    Unbounded,
    // state invariants
    InvalidState,
    InvariantViolation,
    // configuration
    ParseError,
    ValidationError,
    IoError,
};

enum class ErrorCategory { Config, Numerical, Invariant };

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::NonPositiveQubitFrequency: return "NonPositiveQubitFrequency";
    case ErrorCode::NonPositiveAnharmonicity: return "NonPositiveAnharmonicity";
    case ErrorCode::NonPositiveT1: return "NonPositiveT1";
    case ErrorCode::NonPositiveT2: return "NonPositiveT2";
    case ErrorCode::UnphysicalT2: return "UnphysicalT2";
    case ErrorCode::NegativeDecayRate: return "NegativeDecayRate";
    case ErrorCode::EmptyLadder: return "EmptyLadder";
    case ErrorCode::DuplicateModeLabel: return "DuplicateModeLabel";
    case ErrorCode::NonAscendingLadder: return "NonAscendingLadder";
    case ErrorCode::NonPositiveFsr: return "NonPositiveFsr";
    case ErrorCode::DriveOrder: return "DriveOrder";
    case ErrorCode::NegativeDriveAmplitude: return "NegativeDriveAmplitude";
    case ErrorCode::NegativeProbeStrength: return "NegativeProbeStrength";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnknownMode: return "UnknownMode";
    case ErrorCode::ZeroDetuning: return "ZeroDetuning";
    case ErrorCode::SingularDetuning: return "SingularDetuning";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::SidebandCollision: return "SidebandCollision";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::ConvergenceError: return "ConvergenceError";
    case ErrorCode::FitError: return "FitError";
    case ErrorCode::NoOscillation: return "NoOscillation";
    case ErrorCode::AssumptionViolated: return "AssumptionViolated";
    case ErrorCode::DimensionCap: return "DimensionCap";
    case ErrorCode::InvalidRates: return "InvalidRates";
    case ErrorCode::SingularBeta: return "SingularBeta";
    case ErrorCode::MissingOperator: return "MissingOperator";
    case ErrorCode::OptimizationFailure: return "OptimizationFailure";
    case ErrorCode::BoundsViolation: return "BoundsViolation";
    case ErrorCode::Unbounded: return "Unbounded";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

constexpr ErrorCategory category(ErrorCode code) {
    switch (code) {
    case ErrorCode::ZeroDetuning:
    case ErrorCode::SingularDetuning:
    case ErrorCode::DomainError:
    case ErrorCode::SidebandCollision:
    case ErrorCode::NoConvergence:
    case ErrorCode::ConvergenceError:
    case ErrorCode::FitError:
    case ErrorCode::NoOscillation:
    case ErrorCode::SingularBeta:
    case ErrorCode::OptimizationFailure:
    case ErrorCode::Unbounded:
    case ErrorCode::DimensionCap:
        return ErrorCategory::Numerical;
    case ErrorCode::InvalidState:
    case ErrorCode::InvariantViolation:
    case ErrorCode::AssumptionViolated:
        return ErrorCategory::Invariant;
    default:
        return ErrorCategory::Config;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, ErrorCode code, const std::string& what) {
    if (!condition) fail(code, what);
}

}  // namespace cqad
