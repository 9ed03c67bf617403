#include "dwellcert/error.hpp"

namespace dwellcert {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::NearDefective: return "NearDefective";
        case ErrorCode::SingularP: return "SingularP";
        case ErrorCode::ReconstructionMismatch: return "ReconstructionMismatch";
        case ErrorCode::InvalidGraph: return "InvalidGraph";
        case ErrorCode::InadmissibleSignal: return "InadmissibleSignal";
        case ErrorCode::MissingInterval: return "MissingInterval";
        case ErrorCode::NotALoop: return "NotALoop";
        case ErrorCode::TooManyLoops: return "TooManyLoops";
        case ErrorCode::NotAnEdge: return "NotAnEdge";
        case ErrorCode::ConditionViolated: return "ConditionViolated";
        case ErrorCode::SignalOutsideClass: return "SignalOutsideClass";
        case ErrorCode::NotHurwitz: return "NotHurwitz";
        case ErrorCode::BadLambdaStar: return "BadLambdaStar";
        case ErrorCode::InfeasibleAssignment: return "InfeasibleAssignment";
        case ErrorCode::WrongDimension: return "WrongDimension";
        case ErrorCode::DegenerateScaling: return "DegenerateScaling";
        case ErrorCode::SignPatternUnsupported: return "SignPatternUnsupported";
        case ErrorCode::NotPlanar: return "NotPlanar";
        case ErrorCode::EmptyInterval: return "EmptyInterval";
        case ErrorCode::TooFewSamples: return "TooFewSamples";
        case ErrorCode::ZeroState: return "ZeroState";
        case ErrorCode::UnboundedInterval: return "UnboundedInterval";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

}  // namespace dwellcert
