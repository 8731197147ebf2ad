#pragma once

#include <optional>
#include <span>
#include <vector>

#include "seldet/error.hpp"

namespace seldet {

/// Symmetric sparse matrix holding the lower triangle (diagonal included) in
/// compressed-column form. Row indices are strictly increasing within each
/// column. Explicitly stored zeros are kept as structural entries.
class SparseSymmetric {
 public:
  SparseSymmetric() = default;

  /// Takes ownership of CSC arrays; throws IndexOutOfRange / SizeMismatch when
  /// the lower-triangle invariants do not hold.
  SparseSymmetric(Index n, std::vector<Index> col_ptr, std::vector<Index> row_idx,
                  std::vector<double> values);

  static SparseSymmetric identity(Index n);

  Index size() const noexcept { return n_; }
  Index nnz() const noexcept { return static_cast<Index>(row_idx_.size()); }
  Index off_diagonal_nnz() const;

  std::span<const Index> col_ptr() const noexcept { return col_ptr_; }
  std::span<const Index> row_idx() const noexcept { return row_idx_; }
  std::span<const double> values() const noexcept { return values_; }

  std::span<const Index> column_rows(Index j) const;
  std::span<const double> column_values(Index j) const;

  /// Position of (i, j) in values(), symmetric lookup; nullopt if not stored.
  std::optional<Index> find(Index i, Index j) const;
  /// Symmetric element access; 0 for entries off the pattern.
  double operator()(Index i, Index j) const;

  bool same_pattern(const SparseSymmetric& other) const;

  friend bool operator==(const SparseSymmetric&, const SparseSymmetric&) = default;

 private:
  Index n_ = 0;
  std::vector<Index> col_ptr_{0};
  std::vector<Index> row_idx_;
  std::vector<double> values_;
};

/// Row-wise view of the lower triangle: for row i, the columns j <= i with a
/// stored entry (ascending), and the matching position into values().
struct RowStructure {
  std::vector<Index> row_ptr;
  std::vector<Index> col_idx;
  std::vector<Index> value_pos;
};

RowStructure row_structure(const SparseSymmetric& a);

/// Symmetric permutation stored both ways: perm[new] = old, inverse[old] = new.
class Permutation {
 public:
  Permutation() = default;
  /// Throws NotAPermutation unless `new_to_old` is a bijection on 0..n-1.
  explicit Permutation(std::vector<Index> new_to_old);

  static Permutation identity(Index n);

  Index size() const noexcept { return static_cast<Index>(perm_.size()); }
  Index new_to_old(Index i) const { return perm_[static_cast<std::size_t>(i)]; }
  Index old_to_new(Index i) const { return inverse_[static_cast<std::size_t>(i)]; }
  std::span<const Index> perm() const noexcept { return perm_; }
  std::span<const Index> inverse() const noexcept { return inverse_; }

  Permutation inverted() const;
  bool is_identity() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<Index> perm_;
  std::vector<Index> inverse_;
};

struct Triplet {
  Index row;
  Index col;
  double value;
};

struct TripletList {
  Index n = 0;
  std::vector<Triplet> entries;

  TripletList() = default;
  explicit TripletList(Index dim) : n(dim) {}

  void add(Index row, Index col, double value) { entries.push_back({row, col, value}); }
};

/// Duplicates are summed. An entry given only above the diagonal is mirrored;
/// when both (i,j) and (j,i) are given their sums must agree to 1e-12 relative
/// or AsymmetricInput is thrown.
SparseSymmetric from_triplets(const TripletList& t);

/// P A P^T, lower triangle. Entry (i,j) of A lands at (inverse[i], inverse[j]).
SparseSymmetric permute_symmetric(const SparseSymmetric& a, const Permutation& p);

/// True iff every structural entry of `b` is a structural entry of `a`.
bool is_subpattern(const SparseSymmetric& b, const SparseSymmetric& a);

}  // namespace seldet
