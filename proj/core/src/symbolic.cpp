#include "seldet/symbolic.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace seldet {

namespace {

std::size_t uz(Index i) { return static_cast<std::size_t>(i); }

// head/next singly linked child lists, children ascending.
struct Children {
  std::vector<Index> head;
  std::vector<Index> next;

  explicit Children(std::span<const Index> parent)
      : head(parent.size(), -1), next(parent.size(), -1) {
    for (Index i = static_cast<Index>(parent.size()) - 1; i >= 0; --i) {
      const Index p = parent[uz(i)];
      if (p == kNoParent) continue;
      next[uz(i)] = head[uz(p)];
      head[uz(p)] = i;
    }
  }
};

}  // namespace

std::vector<Index> elimination_tree(const SparseSymmetric& a) {
  const Index n = a.size();
  const RowStructure rows = row_structure(a);
  std::vector<Index> parent(uz(n), kNoParent);
  std::vector<Index> ancestor(uz(n), kNoParent);
  for (Index k = 0; k < n; ++k) {
    for (Index p = rows.row_ptr[uz(k)]; p < rows.row_ptr[uz(k) + 1]; ++p) {
      Index i = rows.col_idx[uz(p)];
      while (i != kNoParent && i < k) {
        const Index next = ancestor[uz(i)];
        ancestor[uz(i)] = k;  // path compression
        if (next == kNoParent) parent[uz(i)] = k;
        i = next;
      }
    }
  }
  return parent;
}

Permutation postorder(std::span<const Index> parent) {
  const Index n = static_cast<Index>(parent.size());
  for (Index i = 0; i < n; ++i) {
    const Index p = parent[uz(i)];
    if (p != kNoParent && (p < 0 || p >= n)) {
      throw Error(ErrorKind::IndexOutOfRange, "parent of " + std::to_string(i) + " out of range");
    }
    if (p == i) throw Error(ErrorKind::CycleDetected, "node " + std::to_string(i) + " is its own parent");
  }
  const Children kids(parent);
  std::vector<Index> order;
  order.reserve(uz(n));
  std::vector<Index> stack;
  std::vector<Index> cursor(uz(n), -2);  // -2: not yet entered
  for (Index root = 0; root < n; ++root) {
    if (parent[uz(root)] != kNoParent) continue;
    stack.push_back(root);
    while (!stack.empty()) {
      const Index v = stack.back();
      Index& c = cursor[uz(v)];
      c = (c == -2) ? kids.head[uz(v)] : kids.next[uz(c)];
      if (c == -1) {
        order.push_back(v);
        stack.pop_back();
      } else {
        stack.push_back(c);
      }
    }
  }
  if (static_cast<Index>(order.size()) != n) {
    throw Error(ErrorKind::CycleDetected, "parent array contains a cycle");
  }
  return Permutation(std::move(order));
}

std::vector<Index> column_counts(const SparseSymmetric& a, std::span<const Index> parent) {
  const Index n = a.size();
  if (static_cast<Index>(parent.size()) != n) {
    throw Error(ErrorKind::SizeMismatch, "parent array does not match matrix");
  }
  const RowStructure rows = row_structure(a);
  std::vector<Index> counts(uz(n), 1);
  std::vector<Index> mark(uz(n), -1);
  for (Index k = 0; k < n; ++k) {
    mark[uz(k)] = k;
    for (Index p = rows.row_ptr[uz(k)]; p < rows.row_ptr[uz(k) + 1]; ++p) {
      // Walk the row subtree: every node on the path from j up to k gets L_kj.
      for (Index i = rows.col_idx[uz(p)]; i != kNoParent && mark[uz(i)] != k; i = parent[uz(i)]) {
        ++counts[uz(i)];
        mark[uz(i)] = k;
      }
    }
  }
  return counts;
}

SymbolicFactor symbolic_factor(const SparseSymmetric& a, const Permutation& p) {
  if (p.size() != a.size()) {
    throw Error(ErrorKind::SizeMismatch, "permutation size does not match matrix");
  }
  const SparseSymmetric pa = permute_symmetric(a, p);
  const Index n = pa.size();

  SymbolicFactor sym;
  sym.n = n;
  sym.perm = p;
  sym.parent = elimination_tree(pa);
  sym.col_counts = column_counts(pa, sym.parent);

  // Pre-allocate from the counts, then fill each column as the union of the
  // matrix column and the children's columns (rows above the diagonal removed).
  sym.l_col_ptr.assign(uz(n) + 1, 0);
  for (Index j = 0; j < n; ++j) sym.l_col_ptr[uz(j) + 1] = sym.l_col_ptr[uz(j)] + sym.col_counts[uz(j)] - 1;
  sym.l_row_idx.resize(uz(sym.l_col_ptr.back()));

  const Children kids(sym.parent);
  std::vector<Index> mark(uz(n), -1);
  for (Index j = 0; j < n; ++j) {
    Index pos = sym.l_col_ptr[uz(j)];
    const Index end = sym.l_col_ptr[uz(j) + 1];
    mark[uz(j)] = j;
    auto add = [&](Index i) {
      if (i <= j || mark[uz(i)] == j) return;
      if (pos == end) throw std::logic_error("symbolic column overflow at column " + std::to_string(j));
      mark[uz(i)] = j;
      sym.l_row_idx[uz(pos++)] = i;
    };
    for (Index i : pa.column_rows(j)) add(i);
    for (Index c = kids.head[uz(j)]; c != -1; c = kids.next[uz(c)]) {
      for (Index i : sym.column_rows(c)) add(i);
    }
    if (pos != end) throw std::logic_error("symbolic column underflow at column " + std::to_string(j));
    std::sort(sym.l_row_idx.begin() + sym.l_col_ptr[uz(j)], sym.l_row_idx.begin() + end);
  }
  sym.nnz_L = n + static_cast<Index>(sym.l_row_idx.size());
  return sym;
}

FlopPrediction predict_flops(std::span<const Index> col_counts) {
  std::int64_t sum_sq = 0;
  std::int64_t sum = 0;
  for (Index m : col_counts) {
    sum_sq += m * m;
    sum += m;
  }
  const auto n = static_cast<std::int64_t>(col_counts.size());
  FlopPrediction f;
  f.ldlt = sum_sq - n;
  f.selinv = 2 * f.ldlt - (sum - n);
  return f;
}

FlopPrediction predict_flops(const SymbolicFactor& sym) { return predict_flops(sym.col_counts); }

std::int64_t selinv_flops_from_totals(std::int64_t n, std::int64_t nnz_L, std::int64_t ldlt_flops) {
  return 2 * ldlt_flops - (nnz_L - n);
}

TreeShape tree_shape(std::span<const Index> parent) {
  TreeShape shape;
  const Index n = static_cast<Index>(parent.size());
  if (n == 0) return shape;
  const Permutation post = postorder(parent);
  std::vector<Index> depth(uz(n), 0);
  std::vector<Index> width;
  for (Index k = n - 1; k >= 0; --k) {  // ancestors before descendants
    const Index v = post.new_to_old(k);
    const Index p = parent[uz(v)];
    depth[uz(v)] = (p == kNoParent) ? 1 : depth[uz(p)] + 1;
    if (p == kNoParent) ++shape.roots;
    if (static_cast<Index>(width.size()) < depth[uz(v)]) width.resize(uz(depth[uz(v)]), 0);
    ++width[uz(depth[uz(v)]) - 1];
  }
  shape.height = static_cast<Index>(width.size());
  shape.max_width = *std::max_element(width.begin(), width.end());
  return shape;
}

}  // namespace seldet
