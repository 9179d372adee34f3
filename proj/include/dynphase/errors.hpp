#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dynphase {

// One exception type for the whole library; the kind identifies the failed
// contract so callers (and the CLI exit-code mapping) can dispatch on it.
enum class ErrorKind {
  NonHermitianInput,
  NonUnitaryInput,
  ConvergenceFailure,
  DimensionMismatch,
  ToleranceNotMet,
  SymmetryViolation,
  GridTooCoarse,
  DegeneracyCrossing,
  SpectrumDrift,
  OverlapTooSmall,
  DegenerateEigenvalue,
  IncompleteRecord,
  NotCyclic,
  ConstraintViolation,
  DegenerateParameters,
  TruncationTooSmall,
  DomainError,
  InvalidArgument,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string& message);

}  // namespace dynphase
