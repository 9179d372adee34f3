#include "dynphase/errors.hpp"

namespace dynphase {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonHermitianInput: return "NonHermitianInput";
    case ErrorKind::NonUnitaryInput: return "NonUnitaryInput";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::ToleranceNotMet: return "ToleranceNotMet";
    case ErrorKind::SymmetryViolation: return "SymmetryViolation";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::DegeneracyCrossing: return "DegeneracyCrossing";
    case ErrorKind::SpectrumDrift: return "SpectrumDrift";
    case ErrorKind::OverlapTooSmall: return "OverlapTooSmall";
    case ErrorKind::DegenerateEigenvalue: return "DegenerateEigenvalue";
    case ErrorKind::IncompleteRecord: return "IncompleteRecord";
    case ErrorKind::NotCyclic: return "NotCyclic";
    case ErrorKind::ConstraintViolation: return "ConstraintViolation";
    case ErrorKind::DegenerateParameters: return "DegenerateParameters";
    case ErrorKind::TruncationTooSmall: return "TruncationTooSmall";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void raise(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace dynphase
