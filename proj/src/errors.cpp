#include "freeconv/errors.hpp"

namespace freeconv {

std::string_view error_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonUnitMass: return "NonUnitMass";
        case ErrorCode::DuplicateAtom: return "DuplicateAtom";
        case ErrorCode::NonMonotoneGrid: return "NonMonotoneGrid";
        case ErrorCode::InvalidParameter: return "InvalidParameter";
        case ErrorCode::SchemaError: return "SchemaError";
        case ErrorCode::EvaluationOnSingularity: return "EvaluationOnSingularity";
        case ErrorCode::ZeroCauchyTransform: return "ZeroCauchyTransform";
        case ErrorCode::HeavyTail: return "HeavyTail";
        case ErrorCode::NonConvergent: return "NonConvergent";
        case ErrorCode::ResidualTooLarge: return "ResidualTooLarge";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::WindowTooSmall: return "WindowTooSmall";
        case ErrorCode::RegimeError: return "RegimeError";
        case ErrorCode::NotDefined: return "NotDefined";
        case ErrorCode::NonCenteredInput: return "NonCenteredInput";
        case ErrorCode::ScanInconclusive: return "ScanInconclusive";
        case ErrorCode::MonotonicityViolation: return "MonotonicityViolation";
        case ErrorCode::DiagnosticFailure: return "DiagnosticFailure";
    }
    return "Unknown";
}

bool is_numerical_failure(ErrorCode code) {
    switch (code) {
        case ErrorCode::EvaluationOnSingularity:
        case ErrorCode::ZeroCauchyTransform:
        case ErrorCode::NonConvergent:
        case ErrorCode::ResidualTooLarge:
        case ErrorCode::NoConvergence:
        case ErrorCode::NotDefined:
        case ErrorCode::ScanInconclusive:
        case ErrorCode::MonotonicityViolation:
        case ErrorCode::DiagnosticFailure:
            return true;
        default:
            return false;
    }
}

}  // namespace freeconv
