#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "seldet/sparse.hpp"
#include "seldet/symbolic.hpp"

namespace seldet {

struct FactorOptions {
  /// Pivots d_k <= pivot_tol abort with NonPositivePivotError.
  double pivot_tol = 0.0;
  /// Pivots below near_singular_rel * max|A_ii| are recorded as near-singular
  /// but do not abort.
  double near_singular_rel = 1e-13;

  /// Defaults, with near_singular_rel taken from SELDET_PIVOT_TOL when set.
  static FactorOptions from_environment();
};

/// P A P^T = L D L^T with unit-lower L on the symbolic pattern.
struct LdlFactor {
  std::shared_ptr<const SymbolicFactor> sym;
  std::vector<double> l_values;  // aligned with sym->l_row_idx
  std::vector<double> d;
  /// Multiply-adds count 2, divisions 1. Equals sum m_i^2 - n when the matrix
  /// fills the whole symbolic pattern.
  std::uint64_t flops = 0;
  std::vector<Index> near_singular;  // permuted pivot indices

  Index size() const noexcept { return sym ? sym->n : 0; }
  const Permutation& perm() const { return sym->perm; }
};

/// Up-looking factorization: row k of L is the elimination-tree reach of the
/// k-th row of P A P^T, solved against the columns already computed.
/// Throws PatternMismatch when `a` is not covered by `sym`.
LdlFactor ldlt_factorize(const SparseSymmetric& a, std::shared_ptr<const SymbolicFactor> sym,
                         const FactorOptions& options = {});

/// Convenience: symbolic analysis under `p`, then numeric factorization.
LdlFactor ldlt_factorize(const SparseSymmetric& a, const Permutation& p, const FactorOptions& options = {});

/// sum ln d_i
double log_det(const LdlFactor& f);

/// x = P^T L^{-T} D^{-1} L^{-1} P b
std::vector<double> solve(const LdlFactor& f, std::span<const double> b);

}  // namespace seldet
