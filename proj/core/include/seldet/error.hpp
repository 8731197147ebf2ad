#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace seldet {

using Index = std::int64_t;

enum class ErrorKind {
  IndexOutOfRange,
  AsymmetricInput,
  ParseError,
  UnsupportedFormat,
  IoError,
  SizeMismatch,
  NotAPermutation,
  CycleDetected,
  NonPositivePivot,
  PatternMismatch,
  SingularMatrix,
  TooLarge,
  RankDeficientX,
  EmptyFactor,
  TooLargeForDenseForm,
  PatternNotCovered,
  ConfigInvalid,
};

std::string_view to_string(ErrorKind kind);

// All library failures are reported through this type; callers switch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised by the numeric factorization. `index` is the pivot position in the
// permuted ordering, `original_index` the row/column of the input matrix.
class NonPositivePivotError : public Error {
 public:
  NonPositivePivotError(Index index, Index original_index, double pivot);

  Index index() const noexcept { return index_; }
  Index original_index() const noexcept { return original_index_; }
  double pivot() const noexcept { return pivot_; }

 private:
  Index index_;
  Index original_index_;
  double pivot_;
};

}  // namespace seldet
