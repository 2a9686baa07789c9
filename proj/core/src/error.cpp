#include "sqsd/error.hpp"

#include <limits>

namespace sqsd {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotPsd: return "NotPsd";
    case ErrorCode::BadTrace: return "BadTrace";
    case ErrorCode::EffectNotPsd: return "EffectNotPsd";
    case ErrorCode::IncompleteSum: return "IncompleteSum";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::NotUnitary: return "NotUnitary";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::InvalidBelief: return "InvalidBelief";
    case ErrorCode::ZeroProbabilityOutcome: return "ZeroProbabilityOutcome";
    case ErrorCode::SizeOverflow: return "SizeOverflow";
    case ErrorCode::EmptyLibrary: return "EmptyLibrary";
    case ErrorCode::MissingParams: return "MissingParams";
    case ErrorCode::AllDegenerate: return "AllDegenerate";
    case ErrorCode::EtaNonPositive: return "EtaNonPositive";
    case ErrorCode::CountersEmpty: return "CountersEmpty";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message, double residual)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      residual_(residual) {}

Error::Error(ErrorCode code, const std::string& message)
    : Error(code, message, std::numeric_limits<double>::quiet_NaN()) {}

}  // namespace sqsd
