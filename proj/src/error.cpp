#include "pdmp/error.hpp"

namespace pdmp {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::RowSumNonzero: return "RowSumNonzero";
    case Errc::NegativeOffDiagonal: return "NegativeOffDiagonal";
    case Errc::Reducible: return "Reducible";
    case Errc::NonpositiveSpeed: return "NonpositiveSpeed";
    case Errc::UnorderedSpeeds: return "UnorderedSpeeds";
    case Errc::SingularSystem: return "SingularSystem";
    case Errc::MissingKernel: return "MissingKernel";
    case Errc::NonpositiveDrift: return "NonpositiveDrift";
    case Errc::XiAboveBoundary: return "XiAboveBoundary";
    case Errc::InvalidKernel: return "InvalidKernel";
    case Errc::AbsorbingState: return "AbsorbingState";
    case Errc::OutOfHorizon: return "OutOfHorizon";
    case Errc::ConfigInvalid: return "ConfigInvalid";
    case Errc::NonfiniteTime: return "NonfiniteTime";
    case Errc::HorizonMismatch: return "HorizonMismatch";
    case Errc::NonIntegrableF: return "NonIntegrableF";
    case Errc::RoundTripFailure: return "RoundTripFailure";
    case Errc::KernelSupportViolation: return "KernelSupportViolation";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::WindowContainsHit: return "WindowContainsHit";
    case Errc::UnsupportedKernel: return "UnsupportedKernel";
    case Errc::ConfigError: return "ConfigError";
    case Errc::ValidationFailure: return "ValidationFailure";
    case Errc::InconsistentSummaries: return "InconsistentSummaries";
  }
  return "Unknown";
}

}  // namespace pdmp
