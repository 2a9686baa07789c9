#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sqsd {

enum class ErrorCode {
  NotSquare,
  NotHermitian,
  NotPsd,
  BadTrace,
  EffectNotPsd,
  IncompleteSum,
  DimMismatch,
  NotUnitary,
  OutOfRange,
  InvalidBelief,
  ZeroProbabilityOutcome,
  SizeOverflow,
  EmptyLibrary,
  MissingParams,
  AllDegenerate,
  EtaNonPositive,
  CountersEmpty,
  InvalidConfig,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library. `residual()` carries the measured
/// violation (trace error, norm of the completeness defect, ...) when the
/// error is a tolerance failure, and NaN otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, double residual);
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  double residual() const noexcept { return residual_; }

 private:
  ErrorCode code_;
  double residual_;
};

}  // namespace sqsd
