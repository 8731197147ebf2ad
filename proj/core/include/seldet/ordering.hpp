#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "seldet/sparse.hpp"

namespace seldet {

/// Approximate minimum degree ordering on the pattern of `a`.
///
/// Quotient-graph elimination with approximate external degrees, element
/// absorption (including aggressive absorption), mass elimination and
/// hash-based supervariable detection. Rows whose initial degree exceeds
/// 10*sqrt(n) are treated as dense and ordered last. Among candidates of equal
/// approximate degree the smallest original index is taken, so the result is a
/// deterministic function of the pattern.
Permutation amd_order(const SparseSymmetric& a);

Permutation natural_order(Index n);

/// Reads n whitespace-separated 0-based indices (new -> old).
/// Throws SizeMismatch on a count other than n, NotAPermutation otherwise.
Permutation load_order(std::istream& in, Index n);
Permutation load_order(const std::filesystem::path& path, Index n);

/// --ordering flag value: "natural", "amd" or "file:<path>".
struct OrderingSpec {
  enum class Kind { Natural, Amd, File };
  Kind kind = Kind::Amd;
  std::filesystem::path file;

  static OrderingSpec parse(const std::string& text);
  std::string name() const;
};

Permutation compute_ordering(const SparseSymmetric& a, const OrderingSpec& spec);

}  // namespace seldet
