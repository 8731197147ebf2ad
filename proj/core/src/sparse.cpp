#include "seldet/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

namespace seldet {

namespace {

std::string at(Index i, Index j) {
  return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

std::size_t uz(Index i) { return static_cast<std::size_t>(i); }

}  // namespace

SparseSymmetric::SparseSymmetric(Index n, std::vector<Index> col_ptr, std::vector<Index> row_idx,
                                 std::vector<double> values)
    : n_(n), col_ptr_(std::move(col_ptr)), row_idx_(std::move(row_idx)), values_(std::move(values)) {
  if (n_ < 0) throw Error(ErrorKind::SizeMismatch, "negative dimension");
  if (col_ptr_.size() != uz(n_) + 1) {
    throw Error(ErrorKind::SizeMismatch, "col_ptr must have n+1 entries");
  }
  if (row_idx_.size() != values_.size()) {
    throw Error(ErrorKind::SizeMismatch, "row_idx and values differ in length");
  }
  if (col_ptr_.front() != 0 || col_ptr_.back() != static_cast<Index>(row_idx_.size())) {
    throw Error(ErrorKind::SizeMismatch, "col_ptr does not span the stored entries");
  }
  for (Index j = 0; j < n_; ++j) {
    const Index begin = col_ptr_[uz(j)];
    const Index end = col_ptr_[uz(j) + 1];
    if (end < begin) throw Error(ErrorKind::SizeMismatch, "col_ptr is decreasing");
    for (Index p = begin; p < end; ++p) {
      const Index i = row_idx_[uz(p)];
      if (i < j || i >= n_) {
        throw Error(ErrorKind::IndexOutOfRange, "entry " + at(i, j) + " outside lower triangle");
      }
      if (p > begin && row_idx_[uz(p) - 1] >= i) {
        throw Error(ErrorKind::IndexOutOfRange,
                    "row indices not strictly increasing in column " + std::to_string(j));
      }
    }
  }
}

SparseSymmetric SparseSymmetric::identity(Index n) {
  std::vector<Index> col_ptr(uz(n) + 1);
  std::iota(col_ptr.begin(), col_ptr.end(), Index{0});
  std::vector<Index> rows(uz(n));
  std::iota(rows.begin(), rows.end(), Index{0});
  return SparseSymmetric(n, std::move(col_ptr), std::move(rows), std::vector<double>(uz(n), 1.0));
}

Index SparseSymmetric::off_diagonal_nnz() const {
  Index count = 0;
  for (Index j = 0; j < n_; ++j) {
    for (Index i : column_rows(j)) count += (i != j);
  }
  return count;
}

std::span<const Index> SparseSymmetric::column_rows(Index j) const {
  const auto begin = col_ptr_[uz(j)];
  return {row_idx_.data() + begin, uz(col_ptr_[uz(j) + 1] - begin)};
}

std::span<const double> SparseSymmetric::column_values(Index j) const {
  const auto begin = col_ptr_[uz(j)];
  return {values_.data() + begin, uz(col_ptr_[uz(j) + 1] - begin)};
}

std::optional<Index> SparseSymmetric::find(Index i, Index j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_) {
    throw Error(ErrorKind::IndexOutOfRange, "lookup " + at(i, j));
  }
  if (i < j) std::swap(i, j);
  const auto rows = column_rows(j);
  const auto it = std::lower_bound(rows.begin(), rows.end(), i);
  if (it == rows.end() || *it != i) return std::nullopt;
  return col_ptr_[uz(j)] + static_cast<Index>(it - rows.begin());
}

double SparseSymmetric::operator()(Index i, Index j) const {
  const auto pos = find(i, j);
  return pos ? values_[uz(*pos)] : 0.0;
}

bool SparseSymmetric::same_pattern(const SparseSymmetric& other) const {
  return n_ == other.n_ && col_ptr_ == other.col_ptr_ && row_idx_ == other.row_idx_;
}

RowStructure row_structure(const SparseSymmetric& a) {
  const Index n = a.size();
  RowStructure rs;
  rs.row_ptr.assign(uz(n) + 1, 0);
  for (Index i : a.row_idx()) ++rs.row_ptr[uz(i) + 1];
  std::partial_sum(rs.row_ptr.begin(), rs.row_ptr.end(), rs.row_ptr.begin());
  rs.col_idx.resize(uz(a.nnz()));
  rs.value_pos.resize(uz(a.nnz()));
  std::vector<Index> next(rs.row_ptr.begin(), rs.row_ptr.end() - 1);
  const auto col_ptr = a.col_ptr();
  const auto row_idx = a.row_idx();
  // Columns are visited in ascending order, so each row's columns come out sorted.
  for (Index j = 0; j < n; ++j) {
    for (Index p = col_ptr[uz(j)]; p < col_ptr[uz(j) + 1]; ++p) {
      const Index q = next[uz(row_idx[uz(p)])]++;
      rs.col_idx[uz(q)] = j;
      rs.value_pos[uz(q)] = p;
    }
  }
  return rs;
}

Permutation::Permutation(std::vector<Index> new_to_old) : perm_(std::move(new_to_old)) {
  const Index n = static_cast<Index>(perm_.size());
  inverse_.assign(uz(n), -1);
  for (Index k = 0; k < n; ++k) {
    const Index old = perm_[uz(k)];
    if (old < 0 || old >= n) {
      throw Error(ErrorKind::NotAPermutation, "index " + std::to_string(old) + " out of range");
    }
    if (inverse_[uz(old)] != -1) {
      throw Error(ErrorKind::NotAPermutation, "index " + std::to_string(old) + " repeated");
    }
    inverse_[uz(old)] = k;
  }
}

Permutation Permutation::identity(Index n) {
  std::vector<Index> p(uz(n));
  std::iota(p.begin(), p.end(), Index{0});
  return Permutation(std::move(p));
}

Permutation Permutation::inverted() const { return Permutation(inverse_); }

bool Permutation::is_identity() const {
  for (std::size_t k = 0; k < perm_.size(); ++k) {
    if (perm_[k] != static_cast<Index>(k)) return false;
  }
  return true;
}

namespace {

struct Keyed {
  Index col;
  Index row;
  double value;
};

// Sorts by (col,row) and sums duplicates in place.
std::vector<Keyed> sum_duplicates(std::vector<Keyed> v) {
  std::stable_sort(v.begin(), v.end(), [](const Keyed& a, const Keyed& b) {
    return a.col != b.col ? a.col < b.col : a.row < b.row;
  });
  std::vector<Keyed> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!out.empty() && out.back().col == e.col && out.back().row == e.row) {
      out.back().value += e.value;
    } else {
      out.push_back(e);
    }
  }
  return out;
}

bool agree(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
}

}  // namespace

SparseSymmetric from_triplets(const TripletList& t) {
  const Index n = t.n;
  if (n < 0) throw Error(ErrorKind::SizeMismatch, "negative dimension");
  std::vector<Keyed> lower;
  std::vector<Keyed> upper;  // stored mirrored: (row,col) already swapped into the lower triangle
  for (const auto& e : t.entries) {
    if (e.row < 0 || e.col < 0 || e.row >= n || e.col >= n) {
      throw Error(ErrorKind::IndexOutOfRange, "triplet " + at(e.row, e.col) + " with n=" + std::to_string(n));
    }
    if (e.row >= e.col) {
      lower.push_back({e.col, e.row, e.value});
    } else {
      upper.push_back({e.row, e.col, e.value});
    }
  }
  lower = sum_duplicates(std::move(lower));
  upper = sum_duplicates(std::move(upper));

  std::vector<Keyed> merged;
  merged.reserve(lower.size() + upper.size());
  auto less = [](const Keyed& a, const Keyed& b) {
    return a.col != b.col ? a.col < b.col : a.row < b.row;
  };
  std::size_t a = 0, b = 0;
  while (a < lower.size() || b < upper.size()) {
    if (b == upper.size() || (a < lower.size() && less(lower[a], upper[b]))) {
      merged.push_back(lower[a++]);
    } else if (a == lower.size() || less(upper[b], lower[a])) {
      merged.push_back(upper[b++]);
    } else {
      if (!agree(lower[a].value, upper[b].value)) {
        throw Error(ErrorKind::AsymmetricInput,
                    "entries " + at(lower[a].row, lower[a].col) + " and " + at(lower[a].col, lower[a].row) +
                        " disagree");
      }
      merged.push_back(lower[a++]);
      ++b;
    }
  }

  std::vector<Index> col_ptr(uz(n) + 1, 0);
  std::vector<Index> rows;
  std::vector<double> vals;
  rows.reserve(merged.size());
  vals.reserve(merged.size());
  for (const auto& e : merged) {
    ++col_ptr[uz(e.col) + 1];
    rows.push_back(e.row);
    vals.push_back(e.value);
  }
  std::partial_sum(col_ptr.begin(), col_ptr.end(), col_ptr.begin());
  return SparseSymmetric(n, std::move(col_ptr), std::move(rows), std::move(vals));
}

SparseSymmetric permute_symmetric(const SparseSymmetric& a, const Permutation& p) {
  const Index n = a.size();
  if (p.size() != n) {
    throw Error(ErrorKind::SizeMismatch,
                "permutation of size " + std::to_string(p.size()) + " for n=" + std::to_string(n));
  }
  // Counting sort into the new columns, then sort rows within each column.
  std::vector<Index> col_ptr(uz(n) + 1, 0);
  for (Index j = 0; j < n; ++j) {
    for (Index i : a.column_rows(j)) {
      const Index ni = p.old_to_new(i);
      const Index nj = p.old_to_new(j);
      ++col_ptr[uz(std::min(ni, nj)) + 1];
    }
  }
  std::partial_sum(col_ptr.begin(), col_ptr.end(), col_ptr.begin());
  std::vector<Index> next(col_ptr.begin(), col_ptr.end() - 1);
  std::vector<Index> rows(uz(a.nnz()));
  std::vector<double> vals(uz(a.nnz()));
  for (Index j = 0; j < n; ++j) {
    const auto r = a.column_rows(j);
    const auto v = a.column_values(j);
    for (std::size_t q = 0; q < r.size(); ++q) {
      const Index ni = p.old_to_new(r[q]);
      const Index nj = p.old_to_new(j);
      const Index col = std::min(ni, nj);
      const Index pos = next[uz(col)]++;
      rows[uz(pos)] = std::max(ni, nj);
      vals[uz(pos)] = v[q];
    }
  }
  std::vector<std::pair<Index, double>> scratch;
  for (Index j = 0; j < n; ++j) {
    const auto begin = col_ptr[uz(j)];
    const auto end = col_ptr[uz(j) + 1];
    if (std::is_sorted(rows.begin() + begin, rows.begin() + end)) continue;
    scratch.clear();
    for (Index q = begin; q < end; ++q) scratch.emplace_back(rows[uz(q)], vals[uz(q)]);
    std::sort(scratch.begin(), scratch.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    for (Index q = begin; q < end; ++q) {
      rows[uz(q)] = scratch[uz(q - begin)].first;
      vals[uz(q)] = scratch[uz(q - begin)].second;
    }
  }
  return SparseSymmetric(n, std::move(col_ptr), std::move(rows), std::move(vals));
}

bool is_subpattern(const SparseSymmetric& b, const SparseSymmetric& a) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::SizeMismatch, "is_subpattern on matrices of different dimension");
  }
  for (Index j = 0; j < b.size(); ++j) {
    const auto rb = b.column_rows(j);
    const auto ra = a.column_rows(j);
    if (!std::includes(ra.begin(), ra.end(), rb.begin(), rb.end())) return false;
  }
  return true;
}

}  // namespace seldet
