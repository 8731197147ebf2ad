#include "seldet/error.hpp"

#include <sstream>

namespace seldet {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::AsymmetricInput: return "AsymmetricInput";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::SizeMismatch: return "SizeMismatch";
    case ErrorKind::NotAPermutation: return "NotAPermutation";
    case ErrorKind::CycleDetected: return "CycleDetected";
    case ErrorKind::NonPositivePivot: return "NonPositivePivot";
    case ErrorKind::PatternMismatch: return "PatternMismatch";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::RankDeficientX: return "RankDeficientX";
    case ErrorKind::EmptyFactor: return "EmptyFactor";
    case ErrorKind::TooLargeForDenseForm: return "TooLargeForDenseForm";
    case ErrorKind::PatternNotCovered: return "PatternNotCovered";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

namespace {

std::string pivot_message(Index index, Index original_index, double pivot) {
  std::ostringstream os;
  os.precision(17);
  os << "pivot " << index << " (original row " << original_index << ") is " << pivot
     << "; matrix is not positive definite";
  return os.str();
}

}  // namespace

NonPositivePivotError::NonPositivePivotError(Index index, Index original_index, double pivot)
    : Error(ErrorKind::NonPositivePivot, pivot_message(index, original_index, pivot)),
      index_(index),
      original_index_(original_index),
      pivot_(pivot) {}

}  // namespace seldet
