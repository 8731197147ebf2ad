#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "seldet/ldlt.hpp"
#include "seldet/sparse.hpp"
#include "seldet/symbolic.hpp"

namespace seldet {

/// Entries of Z = A^{-1} on the pattern of L plus the diagonal, stored in the
/// permuted ordering and aligned with the symbolic pattern.
class SelectedInverse {
 public:
  SelectedInverse() = default;
  SelectedInverse(std::shared_ptr<const SymbolicFactor> sym, std::vector<double> z_values,
                  std::vector<double> z_diag, std::uint64_t flops);

  Index size() const noexcept { return sym_ ? sym_->n : 0; }
  const SymbolicFactor& symbolic() const { return *sym_; }
  const Permutation& perm() const { return sym_->perm; }
  const std::vector<double>& z_values() const noexcept { return z_values_; }
  const std::vector<double>& z_diag() const noexcept { return z_diag_; }
  /// Counted as in the factorization; equals 2(sum m_i^2 - n) - (sum m_i - n).
  std::uint64_t flops() const noexcept { return flops_; }

  /// Symmetric lookup on original indices. nullopt means "not computed",
  /// not zero. Throws IndexOutOfRange.
  std::optional<double> get_entry(Index i, Index j) const;

  /// The selected entries as a symmetric matrix in the original ordering.
  SparseSymmetric to_sparse() const;

 private:
  std::shared_ptr<const SymbolicFactor> sym_;
  std::vector<double> z_values_;
  std::vector<double> z_diag_;
  std::uint64_t flops_ = 0;
};

/// Takahashi recurrence swept from the last column to the first:
///   Z_ij = -sum_{k>j, L_kj != 0} Z_ik L_kj              (i > j, L_ij != 0)
///   Z_jj = 1/d_j - sum_{k>j, L_kj != 0} L_kj Z_kj
/// Every Z_ik needed is on the selected pattern of an earlier (higher) column.
SelectedInverse selected_inverse(const LdlFactor& f);

}  // namespace seldet
