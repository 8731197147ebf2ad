#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "seldet/sparse.hpp"

namespace seldet {

inline constexpr Index kNoParent = -1;

/// Structure of L for P A P^T, assuming no numerical cancellation.
///
/// `l_col_ptr` / `l_row_idx` hold the strictly-lower pattern (rows ascending);
/// the unit diagonal is implicit but counted in `col_counts`, so
/// col_counts[j] = 1 + (l_col_ptr[j+1] - l_col_ptr[j]) and nnz_L = sum(col_counts).
struct SymbolicFactor {
  Index n = 0;
  Permutation perm;
  std::vector<Index> parent;
  std::vector<Index> col_counts;
  std::vector<Index> l_col_ptr;
  std::vector<Index> l_row_idx;
  Index nnz_L = 0;

  std::span<const Index> column_rows(Index j) const {
    const auto b = l_col_ptr[static_cast<std::size_t>(j)];
    return {l_row_idx.data() + b, static_cast<std::size_t>(l_col_ptr[static_cast<std::size_t>(j) + 1] - b)};
  }
};

/// parent[j] = min{ i > j : L_ij != 0 }, or kNoParent for roots. Uses the
/// ancestor-path-compression scan; L is not formed.
std::vector<Index> elimination_tree(const SparseSymmetric& a);

/// Children are visited in ascending order; throws CycleDetected when
/// `parent` is not a forest.
Permutation postorder(std::span<const Index> parent);

/// m_j, diagonal included, by walking each row subtree of the elimination tree.
std::vector<Index> column_counts(const SparseSymmetric& a, std::span<const Index> parent);

SymbolicFactor symbolic_factor(const SparseSymmetric& a, const Permutation& p);

struct FlopPrediction {
  std::int64_t ldlt = 0;    // sum m_i^2 - n
  std::int64_t selinv = 0;  // 2 (sum m_i^2 - n) - (sum m_i - n)
};

FlopPrediction predict_flops(const SymbolicFactor& sym);
FlopPrediction predict_flops(std::span<const Index> col_counts);

/// Selected-inversion count from the totals alone: 2*ldlt - (nnz_L - n).
std::int64_t selinv_flops_from_totals(std::int64_t n, std::int64_t nnz_L, std::int64_t ldlt_flops);

/// Informational shape of the elimination forest.
struct TreeShape {
  Index height = 0;     // longest leaf-to-root path, in nodes
  Index max_width = 0;  // largest number of nodes at one depth
  Index roots = 0;
};

TreeShape tree_shape(std::span<const Index> parent);

}  // namespace seldet
