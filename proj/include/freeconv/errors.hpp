#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace freeconv {

enum class ErrorCode {
    NonUnitMass,
    DuplicateAtom,
    NonMonotoneGrid,
    InvalidParameter,
    SchemaError,
    EvaluationOnSingularity,
    ZeroCauchyTransform,
    HeavyTail,
    NonConvergent,
    ResidualTooLarge,
    NoConvergence,
    WindowTooSmall,
    RegimeError,
    NotDefined,
    NonCenteredInput,
    ScanInconclusive,
    MonotonicityViolation,
    DiagnosticFailure,
};

std::string_view error_name(ErrorCode code);

// true for failures of the numerics (as opposed to bad input or parameters)
bool is_numerical_failure(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace freeconv
