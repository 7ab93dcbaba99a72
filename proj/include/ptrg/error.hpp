#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ptrg {

/// Failure categories surfaced by the library. The CLI maps
/// `Validation` to exit code 2 and every numerical category to exit code 3.
enum class ErrorCode {
  Validation,
  DimensionMismatch,
  IndexOutOfRange,
  SingularDifference,
  NonPositiveRadicand,
  NearDefective,
  BrokenPTPhase,
  SignatureNotUnimodular,
  VanishingNorm,
  AllDenominatorsVanish,
  PoleAtEpsilon,
  NonHermitianHamiltonian,
  PositivityLost,
  WindowTooSmall,
  ZeroLongitudinalField,
  DefectiveH0,
  TrackingLost,
  NonConvergence,
  RootCollision,
  RootAtEpsilon,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  bool is_validation() const noexcept { return code_ == ErrorCode::Validation; }

private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace ptrg
