#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dwellcert {

enum class ErrorCode {
    InvalidArgument,
    DimensionMismatch,
    NonFinite,
    NearDefective,
    SingularP,
    ReconstructionMismatch,
    InvalidGraph,
    InadmissibleSignal,
    MissingInterval,
    NotALoop,
    TooManyLoops,
    NotAnEdge,
    ConditionViolated,
    SignalOutsideClass,
    NotHurwitz,
    BadLambdaStar,
    InfeasibleAssignment,
    WrongDimension,
    DegenerateScaling,
    SignPatternUnsupported,
    NotPlanar,
    EmptyInterval,
    TooFewSamples,
    ZeroState,
    UnboundedInterval,
    ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (CLI, bindings) can map it without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace dwellcert
