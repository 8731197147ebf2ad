#include "seldet/selinv.hpp"

#include <algorithm>
#include <string>
#include <utility>

namespace seldet {

namespace {

std::size_t uz(Index i) { return static_cast<std::size_t>(i); }

}  // namespace

SelectedInverse::SelectedInverse(std::shared_ptr<const SymbolicFactor> sym, std::vector<double> z_values,
                                 std::vector<double> z_diag, std::uint64_t flops)
    : sym_(std::move(sym)), z_values_(std::move(z_values)), z_diag_(std::move(z_diag)), flops_(flops) {}

std::optional<double> SelectedInverse::get_entry(Index i, Index j) const {
  const Index n = size();
  if (i < 0 || j < 0 || i >= n || j >= n) {
    throw Error(ErrorKind::IndexOutOfRange,
                "(" + std::to_string(i) + "," + std::to_string(j) + ") with n=" + std::to_string(n));
  }
  Index pi = perm().old_to_new(i);
  Index pj = perm().old_to_new(j);
  if (pi == pj) return z_diag_[uz(pi)];
  if (pi < pj) std::swap(pi, pj);
  const auto rows = sym_->column_rows(pj);
  const auto it = std::lower_bound(rows.begin(), rows.end(), pi);
  if (it == rows.end() || *it != pi) return std::nullopt;
  return z_values_[uz(sym_->l_col_ptr[uz(pj)] + (it - rows.begin()))];
}

SparseSymmetric SelectedInverse::to_sparse() const {
  const Index n = size();
  TripletList t(n);
  t.entries.reserve(z_values_.size() + z_diag_.size());
  const auto& p = perm();
  for (Index j = 0; j < n; ++j) {
    const Index oj = p.new_to_old(j);
    t.add(oj, oj, z_diag_[uz(j)]);
    const auto rows = sym_->column_rows(j);
    for (std::size_t q = 0; q < rows.size(); ++q) {
      const Index oi = p.new_to_old(rows[q]);
      t.add(std::max(oi, oj), std::min(oi, oj), z_values_[uz(sym_->l_col_ptr[uz(j)]) + q]);
    }
  }
  return from_triplets(t);
}

SelectedInverse selected_inverse(const LdlFactor& f) {
  const Index n = f.size();
  const auto& sym = *f.sym;
  const auto& lp = sym.l_col_ptr;
  const auto& li = sym.l_row_idx;
  const auto& lx = f.l_values;

  std::vector<double> z(li.size(), 0.0);
  std::vector<double> zd(uz(n), 0.0);
  std::vector<Index> local(uz(n), -1);  // row -> slot within the current column
  std::vector<double> acc;
  std::uint64_t flops = 0;

  for (Index j = n - 1; j >= 0; --j) {
    const Index begin = lp[uz(j)];
    const Index m = lp[uz(j) + 1] - begin;  // off-diagonal count, m_j - 1
    acc.assign(uz(m), 0.0);
    for (Index t = 0; t < m; ++t) local[uz(li[uz(begin + t)])] = t;

    // acc = Z(R,R) * l_j over the column's row set R, using the symmetric
    // lower storage of the already computed columns k in R.
    for (Index t = 0; t < m; ++t) {
      const Index k = li[uz(begin + t)];
      const double lkj = lx[uz(begin + t)];
      acc[uz(t)] += zd[uz(k)] * lkj;
      flops += 2;
      for (Index q = lp[uz(k)]; q < lp[uz(k) + 1]; ++q) {
        const Index s = local[uz(li[uz(q)])];
        if (s < 0) continue;
        acc[uz(s)] += z[uz(q)] * lkj;
        acc[uz(t)] += z[uz(q)] * lx[uz(begin + s)];
        flops += 4;
      }
    }

    double diag = 1.0 / f.d[uz(j)];
    for (Index t = 0; t < m; ++t) {
      const double zij = -acc[uz(t)];
      z[uz(begin + t)] = zij;
      diag -= lx[uz(begin + t)] * zij;
    }
    flops += 3 * static_cast<std::uint64_t>(m);
    zd[uz(j)] = diag;

    for (Index t = 0; t < m; ++t) local[uz(li[uz(begin + t)])] = -1;
  }
  return SelectedInverse(f.sym, std::move(z), std::move(zd), flops);
}

}  // namespace seldet
