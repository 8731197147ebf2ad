#include "seldet/ldlt.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace seldet {

namespace {

std::size_t uz(Index i) { return static_cast<std::size_t>(i); }

}  // namespace

FactorOptions FactorOptions::from_environment() {
  FactorOptions options;
  if (const char* env = std::getenv("SELDET_PIVOT_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v >= 0.0)) {
      throw Error(ErrorKind::ConfigInvalid, std::string("SELDET_PIVOT_TOL='") + env + "'");
    }
    options.near_singular_rel = v;
  }
  return options;
}

LdlFactor ldlt_factorize(const SparseSymmetric& a, std::shared_ptr<const SymbolicFactor> sym,
                         const FactorOptions& options) {
  if (!sym) throw Error(ErrorKind::PatternMismatch, "no symbolic factor");
  const Index n = a.size();
  if (sym->n != n) {
    throw Error(ErrorKind::SizeMismatch, "symbolic factor is for n=" + std::to_string(sym->n));
  }
  const SparseSymmetric pa = permute_symmetric(a, sym->perm);
  const RowStructure rows = row_structure(pa);
  const auto values = pa.values();
  const auto& parent = sym->parent;
  const auto& lp = sym->l_col_ptr;
  const auto& li = sym->l_row_idx;

  LdlFactor f;
  f.sym = sym;
  f.l_values.assign(li.size(), 0.0);
  f.d.assign(uz(n), 0.0);

  double max_diag = 0.0;
  for (Index k = 0; k < n; ++k) max_diag = std::max(max_diag, std::abs(pa(k, k)));
  const double near_tol = options.near_singular_rel * max_diag;

  std::vector<double> y(uz(n), 0.0);
  std::vector<Index> flag(uz(n), -1);
  std::vector<Index> stack(uz(n));
  std::vector<Index> path(uz(n));
  std::vector<Index> fill(lp.begin(), lp.end() - 1);  // next free slot per column
  std::uint64_t flops = 0;

  for (Index k = 0; k < n; ++k) {
    // Scatter row k of the lower triangle and collect its reach in the
    // elimination tree in topological order.
    Index top = n;
    flag[uz(k)] = k;
    for (Index p = rows.row_ptr[uz(k)]; p < rows.row_ptr[uz(k) + 1]; ++p) {
      Index j = rows.col_idx[uz(p)];
      y[uz(j)] += values[uz(rows.value_pos[uz(p)])];
      Index len = 0;
      for (; flag[uz(j)] != k; j = parent[uz(j)]) {
        if (j == kNoParent || j > k) {
          throw Error(ErrorKind::PatternMismatch, "row " + std::to_string(k) + " not covered by elimination tree");
        }
        path[uz(len++)] = j;
        flag[uz(j)] = k;
      }
      while (len > 0) stack[uz(--top)] = path[uz(--len)];
    }

    double dk = y[uz(k)];
    y[uz(k)] = 0.0;
    for (; top < n; ++top) {
      const Index j = stack[uz(top)];
      const double yj = y[uz(j)];
      y[uz(j)] = 0.0;
      Index q = lp[uz(j)];
      const Index qend = fill[uz(j)];
      for (; q < qend; ++q) y[uz(li[uz(q)])] -= f.l_values[uz(q)] * yj;
      flops += 2 * static_cast<std::uint64_t>(qend - lp[uz(j)]);
      // Symbolic slots skipped here belong to rows that the matrix does not reach.
      Index slot = fill[uz(j)];
      while (slot < lp[uz(j) + 1] && li[uz(slot)] < k) ++slot;
      if (slot == lp[uz(j) + 1] || li[uz(slot)] != k) {
        throw Error(ErrorKind::PatternMismatch,
                    "entry (" + std::to_string(k) + "," + std::to_string(j) + ") missing from symbolic pattern");
      }
      const double lkj = yj / f.d[uz(j)];
      dk -= lkj * yj;
      flops += 3;
      f.l_values[uz(slot)] = lkj;
      fill[uz(j)] = slot + 1;
    }

    if (!(dk > options.pivot_tol)) throw NonPositivePivotError(k, sym->perm.new_to_old(k), dk);
    if (dk < near_tol) f.near_singular.push_back(k);
    f.d[uz(k)] = dk;
  }
  f.flops = flops;
  return f;
}

LdlFactor ldlt_factorize(const SparseSymmetric& a, const Permutation& p, const FactorOptions& options) {
  auto sym = std::make_shared<const SymbolicFactor>(symbolic_factor(a, p));
  return ldlt_factorize(a, std::move(sym), options);
}

double log_det(const LdlFactor& f) {
  double s = 0.0;
  for (double d : f.d) s += std::log(d);
  return s;
}

std::vector<double> solve(const LdlFactor& f, std::span<const double> b) {
  const Index n = f.size();
  if (static_cast<Index>(b.size()) != n) {
    throw Error(ErrorKind::SizeMismatch, "right-hand side has length " + std::to_string(b.size()));
  }
  const auto& perm = f.perm();
  const auto& lp = f.sym->l_col_ptr;
  const auto& li = f.sym->l_row_idx;
  std::vector<double> z(uz(n));
  for (Index k = 0; k < n; ++k) z[uz(k)] = b[uz(perm.new_to_old(k))];
  for (Index j = 0; j < n; ++j) {
    const double zj = z[uz(j)];
    for (Index q = lp[uz(j)]; q < lp[uz(j) + 1]; ++q) z[uz(li[uz(q)])] -= f.l_values[uz(q)] * zj;
  }
  for (Index j = 0; j < n; ++j) z[uz(j)] /= f.d[uz(j)];
  for (Index j = n - 1; j >= 0; --j) {
    double zj = z[uz(j)];
    for (Index q = lp[uz(j)]; q < lp[uz(j) + 1]; ++q) zj -= f.l_values[uz(q)] * z[uz(li[uz(q)])];
    z[uz(j)] = zj;
  }
  std::vector<double> x(uz(n));
  for (Index k = 0; k < n; ++k) x[uz(perm.new_to_old(k))] = z[uz(k)];
  return x;
}

}  // namespace seldet
