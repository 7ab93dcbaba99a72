#include "ptrg/error.hpp"

namespace ptrg {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Validation: return "Validation";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::SingularDifference: return "SingularDifference";
    case ErrorCode::NonPositiveRadicand: return "NonPositiveRadicand";
    case ErrorCode::NearDefective: return "NearDefective";
    case ErrorCode::BrokenPTPhase: return "BrokenPTPhase";
    case ErrorCode::SignatureNotUnimodular: return "SignatureNotUnimodular";
    case ErrorCode::VanishingNorm: return "VanishingNorm";
    case ErrorCode::AllDenominatorsVanish: return "AllDenominatorsVanish";
    case ErrorCode::PoleAtEpsilon: return "PoleAtEpsilon";
    case ErrorCode::NonHermitianHamiltonian: return "NonHermitianHamiltonian";
    case ErrorCode::PositivityLost: return "PositivityLost";
    case ErrorCode::WindowTooSmall: return "WindowTooSmall";
    case ErrorCode::ZeroLongitudinalField: return "ZeroLongitudinalField";
    case ErrorCode::DefectiveH0: return "DefectiveH0";
    case ErrorCode::TrackingLost: return "TrackingLost";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::RootCollision: return "RootCollision";
    case ErrorCode::RootAtEpsilon: return "RootAtEpsilon";
  }
  return "Unknown";
}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace ptrg
