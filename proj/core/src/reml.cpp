#include "seldet/reml.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "seldet/dense.hpp"

namespace seldet {

namespace {

std::size_t uz(Index i) { return static_cast<std::size_t>(i); }

// Non-zero entries of one row of W = [X, Z] as (column, value).
void design_row(const MixedModelDataset& d, const std::vector<Index>& offsets, Index o,
                std::vector<std::pair<Index, double>>& row) {
  row.clear();
  const Index p = d.p();
  for (Index a = 0; a < p; ++a) {
    const double x = d.X(o, a);
    if (x != 0.0) row.emplace_back(a, x);
  }
  for (std::size_t f = 0; f < d.random_factors.size(); ++f) {
    const Index l = d.random_factors[f].level[uz(o)];
    if (l >= 0) row.emplace_back(p + offsets[f] + l, 1.0);
  }
}

void check_positive(double v, const std::string& what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorKind::ConfigInvalid, what + " must be positive and finite");
  }
}

}  // namespace

VarianceParams VarianceParams::unit(const MixedModelDataset& d) {
  VarianceParams v;
  v.gamma.assign(d.random_factors.size(), 1.0);
  v.phi.assign(uz(d.residual_block_count()), 1.0);
  return v;
}

void VarianceParams::validate(const MixedModelDataset& d) const {
  if (gamma.size() != d.random_factors.size()) {
    throw Error(ErrorKind::ConfigInvalid, "expected " + std::to_string(d.random_factors.size()) +
                                              " gamma values, got " + std::to_string(gamma.size()));
  }
  if (static_cast<Index>(phi.size()) != d.residual_block_count()) {
    throw Error(ErrorKind::ConfigInvalid, "expected " + std::to_string(d.residual_block_count()) +
                                              " phi values, got " + std::to_string(phi.size()));
  }
  check_positive(sigma2, "sigma2");
  for (double g : gamma) check_positive(g, "gamma");
  for (double f : phi) check_positive(f, "phi");
}

double VarianceParams::component(std::size_t k) const {
  return k < gamma.size() ? gamma[k] : phi.at(k - gamma.size());
}

void VarianceParams::set_component(std::size_t k, double value) {
  if (k < gamma.size()) {
    gamma[k] = value;
  } else {
    phi.at(k - gamma.size()) = value;
  }
}

MmeAssembler::MmeAssembler(const MixedModelDataset& d) {
  d.validate();
  n_ = d.n_obs();
  p_ = d.p();
  b_ = d.b();
  offsets_ = d.factor_offsets();
  for (const auto& f : d.random_factors) levels_.push_back(f.levels());

  const Index dim = p_ + b_;
  const Index blocks = d.residual_block_count();
  std::vector<TripletList> grams(uz(blocks), TripletList(dim));
  wy_.assign(uz(blocks), std::vector<double>(uz(dim), 0.0));
  yy_.assign(uz(blocks), 0.0);
  block_n_.assign(uz(blocks), 0);

  std::vector<std::pair<Index, double>> row;
  for (Index o = 0; o < n_; ++o) {
    const Index k = d.residual_blocks.level[uz(o)];
    const double yo = d.y[uz(o)];
    design_row(d, offsets_, o, row);
    auto& t = grams[uz(k)];
    for (std::size_t a = 0; a < row.size(); ++a) {
      wy_[uz(k)][uz(row[a].first)] += row[a].second * yo;
      for (std::size_t c = 0; c <= a; ++c) {
        // row is sorted by column, so row[a] is the larger index
        t.add(row[a].first, row[c].first, row[a].second * row[c].second);
      }
    }
    yy_[uz(k)] += yo * yo;
    ++block_n_[uz(k)];
  }

  TripletList all(dim);
  for (Index i = 0; i < dim; ++i) all.add(i, i, 0.0);
  for (auto& t : grams) {
    gram_.push_back(from_triplets(t));
    const auto& g = gram_.back();
    for (Index j = 0; j < dim; ++j) {
      for (Index i : g.column_rows(j)) all.add(i, j, 0.0);
    }
    t.entries = {};
  }
  pattern_ = from_triplets(all);

  for (const auto& g : gram_) {
    std::vector<Index> pos;
    pos.reserve(uz(g.nnz()));
    for (Index j = 0; j < dim; ++j) {
      for (Index i : g.column_rows(j)) pos.push_back(*pattern_.find(i, j));
    }
    gram_pos_.push_back(std::move(pos));
  }
  diag_pos_.resize(uz(dim));
  for (Index i = 0; i < dim; ++i) diag_pos_[uz(i)] = *pattern_.find(i, i);
}

MmeSystem MmeAssembler::assemble(const VarianceParams& v) const {
  if (v.gamma.size() != levels_.size() || v.phi.size() != gram_.size()) {
    throw Error(ErrorKind::ConfigInvalid, "variance parameters do not match the dataset");
  }
  check_positive(v.sigma2, "sigma2");
  for (double g : v.gamma) check_positive(g, "gamma");
  for (double f : v.phi) check_positive(f, "phi");

  const Index dim = p_ + b_;
  std::vector<double> values(uz(pattern_.nnz()), 0.0);
  std::vector<double> rhs(uz(dim), 0.0);
  for (std::size_t k = 0; k < gram_.size(); ++k) {
    const double w = 1.0 / v.phi[k];
    const auto gv = gram_[k].values();
    for (std::size_t q = 0; q < gv.size(); ++q) values[uz(gram_pos_[k][q])] += w * gv[q];
    for (Index i = 0; i < dim; ++i) rhs[uz(i)] += w * wy_[k][uz(i)];
  }
  for (std::size_t f = 0; f < levels_.size(); ++f) {
    const double ginv = 1.0 / v.gamma[f];
    for (Index l = 0; l < levels_[f]; ++l) values[uz(diag_pos_[uz(p_ + offsets_[f] + l)])] += ginv;
  }

  MmeSystem m;
  m.p = p_;
  m.b = b_;
  m.C = SparseSymmetric(dim, {pattern_.col_ptr().begin(), pattern_.col_ptr().end()},
                        {pattern_.row_idx().begin(), pattern_.row_idx().end()}, std::move(values));
  m.rhs = std::move(rhs);

  // dC/dgamma_f = -gamma_f^{-2} I on factor f's block
  for (std::size_t f = 0; f < levels_.size(); ++f) {
    TripletList t(dim);
    const double s = -1.0 / (v.gamma[f] * v.gamma[f]);
    for (Index l = 0; l < levels_[f]; ++l) t.add(p_ + offsets_[f] + l, p_ + offsets_[f] + l, s);
    m.derivative_templates.push_back(from_triplets(t));
  }
  // dC/dphi_k = -phi_k^{-2} W_k^T W_k
  for (std::size_t k = 0; k < gram_.size(); ++k) {
    const double s = -1.0 / (v.phi[k] * v.phi[k]);
    std::vector<double> gv(gram_[k].values().begin(), gram_[k].values().end());
    for (double& x : gv) x *= s;
    const auto& g = gram_[k];
    m.derivative_templates.emplace_back(dim, std::vector<Index>(g.col_ptr().begin(), g.col_ptr().end()),
                                        std::vector<Index>(g.row_idx().begin(), g.row_idx().end()),
                                        std::move(gv));
  }
  return m;
}

double MmeAssembler::y_rinv_y(const VarianceParams& v) const {
  double s = 0.0;
  for (std::size_t k = 0; k < yy_.size(); ++k) s += yy_[k] / v.phi[k];
  return s;
}

MmeSystem assemble_mme(const MixedModelDataset& d, const VarianceParams& v) {
  v.validate(d);
  return MmeAssembler(d).assemble(v);
}

MmeSolution solve_mme(const MmeSystem& m, const OrderingSpec& ordering) {
  const Permutation p = compute_ordering(m.C, ordering);
  const LdlFactor f = ldlt_factorize(m.C, p);
  const std::vector<double> x = solve(f, m.rhs);
  MmeSolution s;
  s.tau_hat.assign(x.begin(), x.begin() + m.p);
  s.u_tilde.assign(x.begin() + m.p, x.end());
  return s;
}

double trace_product(const SelectedInverse& z, const SparseSymmetric& b) {
  if (b.size() != z.size()) {
    throw Error(ErrorKind::SizeMismatch, "trace_product operands differ in dimension");
  }
  double diag = 0.0;
  double off = 0.0;
  for (Index j = 0; j < b.size(); ++j) {
    const auto rows = b.column_rows(j);
    const auto vals = b.column_values(j);
    for (std::size_t q = 0; q < rows.size(); ++q) {
      const auto zij = z.get_entry(rows[q], j);
      if (!zij) {
        throw Error(ErrorKind::PatternNotCovered, "entry (" + std::to_string(rows[q]) + "," + std::to_string(j) +
                                                      ") is outside the selected inverse");
      }
      if (rows[q] == j) {
        diag += *zij * vals[q];
      } else {
        off += *zij * vals[q];
      }
    }
  }
  return diag + 2.0 * off;
}

std::vector<double> logdet_gradient(const MmeSystem& m, const SelectedInverse& z) {
  std::vector<double> g;
  g.reserve(m.derivative_templates.size());
  for (const auto& t : m.derivative_templates) g.push_back(trace_product(z, t));
  return g;
}

std::vector<double> pev_diagonal(const SelectedInverse& z, double sigma2) {
  std::vector<double> pev(uz(z.size()));
  for (Index i = 0; i < z.size(); ++i) pev[uz(i)] = sigma2 * *z.get_entry(i, i);
  return pev;
}

RemlEvaluator::RemlEvaluator(const MixedModelDataset& d, const OrderingSpec& ordering, FactorOptions options)
    : assembler_(d), options_(options) {
  if (assembler_.n_obs() <= assembler_.p()) {
    throw Error(ErrorKind::SizeMismatch, "restricted likelihood needs n > p");
  }
  const Permutation p = compute_ordering(assembler_.pattern(), ordering);
  sym_ = std::make_shared<const SymbolicFactor>(symbolic_factor(assembler_.pattern(), p));
}

LoglikTerms RemlEvaluator::terms(const MmeSystem& m, const LdlFactor& f, const VarianceParams& v,
                                 MmeSolution* solution) const {
  LoglikTerms t;
  t.n = assembler_.n_obs();
  t.p = assembler_.p();
  t.logdet_C = log_det(f);
  for (std::size_t k = 0; k < v.phi.size(); ++k) {
    t.logdet_R += static_cast<double>(assembler_.block_sizes()[k]) * std::log(v.phi[k]);
  }
  for (std::size_t j = 0; j < v.gamma.size(); ++j) {
    t.logdet_G += static_cast<double>(assembler_.factor_levels()[j]) * std::log(v.gamma[j]);
  }
  const std::vector<double> x = solve(f, m.rhs);
  t.yPy = assembler_.y_rinv_y(v) - std::inner_product(m.rhs.begin(), m.rhs.end(), x.begin(), 0.0);
  t.loglik = -0.5 * (static_cast<double>(t.n - t.p) * std::log(v.sigma2) + t.logdet_C + t.logdet_R +
                     t.logdet_G + t.yPy / v.sigma2);
  if (solution) {
    solution->tau_hat.assign(x.begin(), x.begin() + m.p);
    solution->u_tilde.assign(x.begin() + m.p, x.end());
  }
  return t;
}

RemlEvaluator::Result RemlEvaluator::evaluate(const VarianceParams& v) const {
  const MmeSystem m = assembler_.assemble(v);
  const LdlFactor f = ldlt_factorize(m.C, sym_, options_);
  Result r;
  r.terms = terms(m, f, v, &r.solution);
  const SelectedInverse z = selected_inverse(f);
  r.gradient = logdet_gradient(m, z);
  r.pev = pev_diagonal(z, v.sigma2);
  r.ldlt_flops = f.flops;
  r.selinv_flops = z.flops();
  r.near_singular = f.near_singular;
  return r;
}

LoglikTerms RemlEvaluator::loglik(const VarianceParams& v) const {
  const MmeSystem m = assembler_.assemble(v);
  const LdlFactor f = ldlt_factorize(m.C, sym_, options_);
  return terms(m, f, v, nullptr);
}

double RemlEvaluator::logdet_C(const VarianceParams& v) const {
  const MmeSystem m = assembler_.assemble(v);
  return log_det(ldlt_factorize(m.C, sym_, options_));
}

double restricted_loglik_h_form(const MixedModelDataset& d, const VarianceParams& v) {
  v.validate(d);
  d.validate();
  const Index n = d.n_obs();
  const Index p = d.p();
  if (n > kDenseOracleLimit) {
    throw Error(ErrorKind::TooLargeForDenseForm, "H-form limited to n <= " + std::to_string(kDenseOracleLimit));
  }
  if (n <= p) throw Error(ErrorKind::SizeMismatch, "restricted likelihood needs n > p");

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (Index a = 0; a < n; ++a) h(a, a) = v.phi[uz(d.residual_blocks.level[uz(a)])];
  for (std::size_t f = 0; f < d.random_factors.size(); ++f) {
    const auto& lv = d.random_factors[f].level;
    for (Index a = 0; a < n; ++a) {
      if (lv[uz(a)] < 0) continue;
      for (Index c = 0; c < n; ++c) {
        if (lv[uz(c)] == lv[uz(a)]) h(a, c) += v.gamma[f];
      }
    }
  }
  Eigen::LLT<Eigen::MatrixXd> hl(h);
  if (hl.info() != Eigen::Success) throw Error(ErrorKind::SingularMatrix, "H is not positive definite");
  const double logdet_h = 2.0 * hl.matrixLLT().diagonal().array().log().sum();

  const Eigen::Map<const Eigen::VectorXd> y(d.y.data(), n);
  const Eigen::MatrixXd hx = hl.solve(d.X);
  const Eigen::VectorXd hy = hl.solve(y);
  const Eigen::MatrixXd xhx = d.X.transpose() * hx;
  Eigen::LLT<Eigen::MatrixXd> xl(xhx);
  if (xl.info() != Eigen::Success) throw Error(ErrorKind::RankDeficientX, "X'H^{-1}X is not positive definite");
  const double logdet_xhx = 2.0 * xl.matrixLLT().diagonal().array().log().sum();
  const Eigen::VectorXd xhy = d.X.transpose() * hy;
  const double ypy = y.dot(hy) - xhy.dot(xl.solve(xhy));

  return -0.5 * (static_cast<double>(n - p) * std::log(v.sigma2) + logdet_h + logdet_xhx + ypy / v.sigma2);
}

double restricted_loglik(const MixedModelDataset& d, const VarianceParams& v, LoglikForm form) {
  if (form == LoglikForm::H) return restricted_loglik_h_form(d, v);
  v.validate(d);
  return RemlEvaluator(d).loglik(v).loglik;
}

}  // namespace seldet
