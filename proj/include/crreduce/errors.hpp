#pragma once

#include <stdexcept>
#include <string>

namespace crreduce {

enum class ErrorKind {
  InvalidInput,
  NumericalFailure,
  DegenerateForm,
  InternalInconsistency,
  SpectralInconsistency,
  SignatureMismatch,
  NotGeneric,
  UniquenessViolation,
  StructureProjectionFailure,
  GenerationFailure,
};

const char* to_string(ErrorKind kind);

/// Base exception for every failure raised by the library. The kind is
/// stable and is what the CLI maps onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::DegenerateForm: return "DegenerateForm";
    case ErrorKind::InternalInconsistency: return "InternalInconsistency";
    case ErrorKind::SpectralInconsistency: return "SpectralInconsistency";
    case ErrorKind::SignatureMismatch: return "SignatureMismatch";
    case ErrorKind::NotGeneric: return "NotGeneric";
    case ErrorKind::UniquenessViolation: return "UniquenessViolation";
    case ErrorKind::StructureProjectionFailure: return "StructureProjectionFailure";
    case ErrorKind::GenerationFailure: return "GenerationFailure";
  }
  return "Unknown";
}

}  // namespace crreduce
