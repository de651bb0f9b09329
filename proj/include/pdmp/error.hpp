#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pdmp {

enum class Errc {
  // generator algebra
  RowSumNonzero,
  NegativeOffDiagonal,
  Reducible,
  NonpositiveSpeed,
  UnorderedSpeeds,
  SingularSystem,
  MissingKernel,
  NonpositiveDrift,
  XiAboveBoundary,
  InvalidKernel,
  // switching chain
  AbsorbingState,
  OutOfHorizon,
  // process simulation
  ConfigInvalid,
  NonfiniteTime,
  HorizonMismatch,
  // flows
  NonIntegrableF,
  RoundTripFailure,
  KernelSupportViolation,
  // validation
  EmptyInput,
  WindowContainsHit,
  UnsupportedKernel,
  // experiment driver
  ConfigError,
  ValidationFailure,
  InconsistentSummaries,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace pdmp
