#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>

#include "seldet/datagen.hpp"
#include "seldet/dataset.hpp"
#include "seldet/dense.hpp"
#include "seldet/error.hpp"
#include "seldet/ldlt.hpp"
#include "seldet/matrix_market.hpp"
#include "seldet/ordering.hpp"
#include "seldet/reml.hpp"
#include "seldet/selinv.hpp"
#include "seldet/symbolic.hpp"

namespace seldet::cli {

namespace {

constexpr double kSelinvVerifyTol = 1e-10;
constexpr double kLogdetVerifyTol = 1e-10;
constexpr double kHFormTol = 1e-8;
constexpr double kFdTol = 1e-6;
constexpr double kFdStep = 1e-5;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p);
  if (!f) throw Error(ErrorKind::IoError, "cannot open " + p.string() + " for writing");
  f << std::setprecision(17);
  return f;
}

double density_permille(Index n, Index nnz) {
  if (n == 0) return 0.0;
  const double full = static_cast<double>(n) * static_cast<double>(n + 1) / 2.0;
  return 1000.0 * static_cast<double>(nnz) / full;
}

double rel_diff(double a, double ref) {
  const double d = std::abs(a - ref);
  return ref == 0.0 ? d : d / std::abs(ref);
}

struct SelinvCheck {
  double max_rel = 0.0;
  Index compared = 0;
  bool ok = true;
};

SelinvCheck compare_with_dense(const SelectedInverse& z, const Eigen::MatrixXd& ref) {
  SelinvCheck c;
  const Index n = z.size();
  for (Index j = 0; j < n; ++j) {
    for (Index i = j; i < n; ++i) {
      const auto v = z.get_entry(i, j);
      if (!v) continue;
      c.max_rel = std::max(c.max_rel, rel_diff(*v, ref(i, j)));
      ++c.compared;
    }
  }
  c.ok = c.max_rel <= kSelinvVerifyTol;
  return c;
}

void print_pivot_error(const NonPositivePivotError& e, std::ostream& err) {
  err << "error: non-positive pivot " << e.pivot() << " at permuted index " << e.index() << " (original index "
      << e.original_index() << ")\n";
}

VarianceParams params_from(const RemlOptions& o, const MixedModelDataset& d) {
  VarianceParams v = VarianceParams::unit(d);
  if (o.sigma2) v.sigma2 = *o.sigma2;
  if (!o.gamma.empty()) v.gamma = o.gamma;
  if (!o.phi.empty()) v.phi = o.phi;
  v.validate(d);
  return v;
}

bool run_h_form_check(const MixedModelDataset& d, const VarianceParams& v, double c_form, std::ostream& out) {
  const double h_form = restricted_loglik_h_form(d, v);
  const double diff = rel_diff(c_form, h_form);
  const bool ok = diff <= kHFormTol;
  out << "H-form loglik   " << h_form << '\n';
  out << (ok ? "forms agree" : "forms DISAGREE") << ": max rel diff " << std::scientific << std::setprecision(3)
      << diff << (ok ? " <= " : " > ") << kHFormTol << std::defaultfloat << std::setprecision(10) << '\n';
  return ok;
}

bool run_fd_check(const RemlEvaluator& ev, const VarianceParams& v, const std::vector<double>& gradient,
                  const std::vector<std::string>& names, std::ostream& out) {
  out << "finite-difference check (central, relative step " << kFdStep << ")\n";
  out << std::left << std::setw(20) << "component" << std::right << std::setw(20) << "analytic" << std::setw(20)
      << "finite-diff" << std::setw(12) << "rel err" << "\n";
  bool ok = true;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double x = v.component(k);
    const double h = kFdStep * x;
    VarianceParams up = v, down = v;
    up.set_component(k, x + h);
    down.set_component(k, x - h);
    const double fd = (ev.logdet_C(up) - ev.logdet_C(down)) / (2.0 * h);
    const double err = rel_diff(gradient[k], fd);
    const bool row_ok = err <= kFdTol;
    ok = ok && row_ok;
    out << std::left << std::setw(20) << names[k] << std::right << std::setprecision(10) << std::setw(20)
        << gradient[k] << std::setw(20) << fd << std::scientific << std::setprecision(2) << std::setw(12) << err
        << std::defaultfloat << (row_ok ? "  ok" : "  FAIL") << '\n';
  }
  out << "finite-difference check: " << (ok ? "PASS" : "FAIL") << '\n';
  return ok;
}

std::vector<std::string> component_names(const MixedModelDataset& d) {
  std::vector<std::string> names;
  for (const auto& f : d.random_factors) names.push_back("gamma[" + f.name + "]");
  for (const auto& l : d.residual_blocks.labels) names.push_back("phi[" + l + "]");
  return names;
}

bool has_suffix(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Coefficient matrix of a bench problem: generated preset, Matrix Market
// file, or dataset file (MME at unit variance parameters).
SparseSymmetric load_problem(const std::string& name, std::uint64_t seed) {
  if (name.rfind("prob", 0) == 0 && !has_suffix(name, ".mtx")) {
    TrialConfig c = TrialConfig::preset(name);
    c.seed = seed;
    const auto d = generate(c);
    return MmeAssembler(d).assemble(VarianceParams::unit(d)).C;
  }
  if (has_suffix(name, ".mtx")) return read_matrix_market(std::filesystem::path(name));
  const auto d = read_dataset(std::filesystem::path(name));
  return MmeAssembler(d).assemble(VarianceParams::unit(d)).C;
}

}  // namespace

int run_analyze(const AnalyzeOptions& o, std::ostream& out, std::ostream&) {
  const SparseSymmetric a = read_matrix_market(o.matrix);
  const OrderingSpec spec = OrderingSpec::parse(o.ordering);
  const SymbolicFactor sym = symbolic_factor(a, compute_ordering(a, spec));
  const FlopPrediction fl = predict_flops(sym);
  const Index n = a.size();
  const double nz = n == 0 ? 0.0 : static_cast<double>(a.nnz()) / static_cast<double>(n);
  const double dens = density_permille(n, a.nnz());
  const TreeShape shape = tree_shape(sym.parent);

  out << std::left << std::setw(10) << "ordering" << std::right << std::setw(10) << "n" << std::setw(12) << "nnz(C)"
      << std::setw(8) << "n_z" << std::setw(12) << "density" << std::setw(14) << "nnz(L)" << std::setw(18)
      << "ldlt_flops" << std::setw(18) << "selinv_flops" << '\n';
  out << std::left << std::setw(10) << spec.name() << std::right << std::setw(10) << n << std::setw(12) << a.nnz()
      << std::fixed << std::setprecision(2) << std::setw(8) << nz << std::setprecision(3) << std::setw(12) << dens
      << std::defaultfloat << std::setw(14) << sym.nnz_L << std::setw(18) << fl.ldlt << std::setw(18) << fl.selinv
      << '\n';
  out << "etree: height " << shape.height << ", max width " << shape.max_width << ", roots " << shape.roots << '\n';

  const bool identity = selinv_flops_from_totals(n, sym.nnz_L, fl.ldlt) == fl.selinv;
  out << "identity selinv = 2*ldlt - (nnz_L - n): " << (identity ? "PASS" : "FAIL") << '\n';

  if (o.csv) {
    auto f = open_out(*o.csv);
    f << kAnalyzeCsvHeader << '\n'
      << o.matrix.filename().string() << ',' << spec.name() << ',' << n << ',' << a.nnz() << ',' << nz << ','
      << dens << ',' << sym.nnz_L << ',' << fl.ldlt << ',' << fl.selinv << '\n';
  }
  return identity ? kExitOk : kExitCheckFailed;
}

int run_selinv(const SelinvOptions& o, std::ostream& out, std::ostream& err) {
  const SparseSymmetric a = read_matrix_market(o.matrix);
  const OrderingSpec spec = OrderingSpec::parse(o.ordering);
  const FactorOptions fopts = FactorOptions::from_environment();

  auto t = Clock::now();
  const Permutation p = compute_ordering(a, spec);
  const double t_order = seconds_since(t);
  t = Clock::now();
  auto sym = std::make_shared<const SymbolicFactor>(symbolic_factor(a, p));
  const double t_symbolic = seconds_since(t);
  t = Clock::now();
  LdlFactor f;
  try {
    f = ldlt_factorize(a, sym, fopts);
  } catch (const NonPositivePivotError& e) {
    print_pivot_error(e, err);
    return kExitError;
  }
  const double t_factor = seconds_since(t);
  t = Clock::now();
  const SelectedInverse z = selected_inverse(f);
  const double t_selinv = seconds_since(t);

  const FlopPrediction pred = predict_flops(*sym);
  const double ld = log_det(f);
  out << std::setprecision(15);
  out << "n " << a.size() << ", nnz(C) " << a.nnz() << ", nnz(L) " << sym->nnz_L << ", ordering " << spec.name()
      << '\n';
  out << "logdet " << ld << '\n';
  out << "ldlt flops   measured " << f.flops << "  predicted " << pred.ldlt << '\n';
  out << "selinv flops measured " << z.flops() << "  predicted " << pred.selinv << '\n';
  out << std::setprecision(6) << "time order " << t_order << " s, symbolic " << t_symbolic << " s, factor "
      << t_factor << " s, selinv " << t_selinv << " s\n";
  for (Index k : f.near_singular) {
    err << "warning: near-singular pivot at permuted index " << k << " (original "
        << p.new_to_old(k) << ")\n";
  }

  if (o.out) write_matrix_market(z.to_sparse(), *o.out);

  bool ok = true;
  if (o.verify) {
    if (a.size() > kDenseOracleLimit) {
      err << "error: --verify needs n <= " << kDenseOracleLimit << '\n';
      return kExitError;
    }
    const auto ref = dense_inverse_oracle(a);
    const SelinvCheck c = compare_with_dense(z, ref);
    const double ld_ref = dense_log_det(a);
    const double ld_err = std::abs(ld - ld_ref) / std::max(1.0, std::abs(ld_ref));
    const bool ld_ok = ld_err <= kLogdetVerifyTol;
    out << std::scientific << std::setprecision(3);
    out << "verify selected inverse: " << c.compared << " entries, max rel error " << c.max_rel << ' '
        << (c.ok ? "PASS" : "FAIL") << '\n';
    out << "verify logdet: dense " << std::setprecision(15) << ld_ref << ", rel error " << std::setprecision(3)
        << ld_err << ' ' << (ld_ok ? "PASS" : "FAIL") << '\n'
        << std::defaultfloat;
    ok = c.ok && ld_ok;
  }
  if (o.csv) {
    auto c = open_out(*o.csv);
    c << "matrix,ordering,n,nnz_C,nnz_L,logdet,ldlt_measured,ldlt_predicted,selinv_measured,selinv_predicted,"
         "t_order,t_symbolic,t_factor,t_selinv\n"
      << o.matrix.filename().string() << ',' << spec.name() << ',' << a.size() << ',' << a.nnz() << ','
      << sym->nnz_L << ',' << ld << ',' << f.flops << ',' << pred.ldlt << ',' << z.flops() << ',' << pred.selinv
      << ',' << t_order << ',' << t_symbolic << ',' << t_factor << ',' << t_selinv << '\n';
  }
  return ok ? kExitOk : kExitCheckFailed;
}

int run_reml(const RemlOptions& o, std::ostream& out, std::ostream& err) {
  const MixedModelDataset d = read_dataset(o.dataset);
  const VarianceParams v = params_from(o, d);
  const RemlEvaluator ev(d, OrderingSpec::parse(o.ordering), FactorOptions::from_environment());
  RemlEvaluator::Result r;
  try {
    r = ev.evaluate(v);
  } catch (const NonPositivePivotError& e) {
    print_pivot_error(e, err);
    return kExitError;
  }
  const auto names = component_names(d);

  out << std::setprecision(12);
  out << "n " << d.n_obs() << ", p " << d.p() << ", b " << d.b() << ", dim(C) " << d.p() + d.b() << ", nnz(L) "
      << ev.symbolic().nnz_L << '\n';
  out << "loglik (C-form) " << r.terms.loglik << '\n';
  out << "logdet C        " << r.terms.logdet_C << '\n';
  out << "logdet R        " << r.terms.logdet_R << '\n';
  out << "logdet G        " << r.terms.logdet_G << '\n';
  out << "y'Py            " << r.terms.yPy << '\n';
  out << "gradient of logdet C\n";
  for (std::size_t k = 0; k < names.size(); ++k) {
    out << "  " << std::left << std::setw(24) << names[k] << std::right << r.gradient[k] << '\n';
  }
  if (!r.pev.empty()) {
    const auto [mn, mx] = std::minmax_element(r.pev.begin(), r.pev.end());
    double sum = 0.0;
    for (double x : r.pev) sum += x;
    out << "PEV diagonal: min " << *mn << ", mean " << sum / static_cast<double>(r.pev.size()) << ", max " << *mx
        << '\n';
  }
  for (Index k : r.near_singular) err << "warning: near-singular pivot at permuted index " << k << '\n';

  bool ok = true;
  if (o.check_h_form) {
    if (d.n_obs() > kDenseOracleLimit) {
      err << "error: --check-h-form needs n <= " << kDenseOracleLimit << '\n';
      return kExitError;
    }
    ok = run_h_form_check(d, v, r.terms.loglik, out) && ok;
  }
  if (o.fd_check) ok = run_fd_check(ev, v, r.gradient, names, out) && ok;

  if (o.csv) {
    auto c = open_out(*o.csv);
    c << "quantity,value\n";
    c << "loglik," << r.terms.loglik << "\nlogdet_C," << r.terms.logdet_C << "\nlogdet_R," << r.terms.logdet_R
      << "\nlogdet_G," << r.terms.logdet_G << "\nyPy," << r.terms.yPy << '\n';
    for (std::size_t k = 0; k < names.size(); ++k) c << "grad_" << names[k] << ',' << r.gradient[k] << '\n';
  }
  return ok ? kExitOk : kExitCheckFailed;
}

int run_gen(const GenOptions& o, std::ostream& out, std::ostream& err) {
  TrialConfig c = o.preset ? TrialConfig::preset(*o.preset) : TrialConfig{};
  if (o.config) {
    std::ifstream in(*o.config);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + o.config->string());
    c = TrialConfig::parse(in, c);
  }
  for (const auto& [k, v] : o.settings) c.set(k, v);
  if (o.seed) c.seed = *o.seed;

  const MixedModelDataset d = generate(c);
  const DesignSummary s = design_summary(d);
  // With no --out the dataset goes to stdout, so the summary moves to stderr.
  std::ostream& report = o.out ? out : err;
  print_summary_table(report, o.preset.value_or("generated"), s);
  report << "effects " << s.effects << '\n';
  if (o.out) {
    write_dataset(d, *o.out);
  } else {
    write_dataset(d, out);
  }
  if (o.csv) {
    auto f = open_out(*o.csv);
    f << "year,center,variety,y.c,y.v,v.c,units,v/y,y/v,c.v,effects\n"
      << s.years << ',' << s.centers << ',' << s.varieties << ',' << s.year_center << ',' << s.year_variety << ','
      << s.variety_center << ',' << s.units << ',' << s.varieties_per_year << ',' << s.years_per_variety << ','
      << s.controls << ',' << s.effects << '\n';
  }
  return kExitOk;
}

int run_bench(const BenchOptions& o, std::ostream& out, std::ostream& err) {
  std::ofstream csv_file, fig_file;
  if (o.csv) csv_file = open_out(*o.csv);
  if (o.fig_out) fig_file = open_out(*o.fig_out);
  std::ostream& csv = o.csv ? static_cast<std::ostream&>(csv_file) : out;
  csv << kBenchCsvHeader << '\n';
  if (o.fig_out) fig_file << kFigCsvHeader << '\n';

  const int repeat = std::max(1, o.repeat);
  const FactorOptions fopts = FactorOptions::from_environment();
  bool all_ok = true;
  for (const auto& problem : o.problems) {
    SparseSymmetric a;
    try {
      a = load_problem(problem, o.seed);
    } catch (const std::exception& e) {
      err << "problem " << problem << ": " << e.what() << '\n';
      csv << problem << ",,,,,,,,,,,,,,error\n";
      all_ok = false;
      continue;
    }
    for (const auto& ord : o.orderings) {
      try {
        const OrderingSpec spec = OrderingSpec::parse(ord);
        double best[4] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                          std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
        std::shared_ptr<const SymbolicFactor> sym;
        std::uint64_t ldlt_measured = 0, selinv_measured = 0;
        for (int r = 0; r < repeat; ++r) {
          auto t = Clock::now();
          const Permutation p = compute_ordering(a, spec);
          best[0] = std::min(best[0], seconds_since(t));
          t = Clock::now();
          sym = std::make_shared<const SymbolicFactor>(symbolic_factor(a, p));
          best[1] = std::min(best[1], seconds_since(t));
          t = Clock::now();
          const LdlFactor f = ldlt_factorize(a, sym, fopts);
          best[2] = std::min(best[2], seconds_since(t));
          t = Clock::now();
          const SelectedInverse z = selected_inverse(f);
          best[3] = std::min(best[3], seconds_since(t));
          ldlt_measured = f.flops;
          selinv_measured = z.flops();
        }
        const FlopPrediction pred = predict_flops(*sym);
        const bool ok = static_cast<std::int64_t>(ldlt_measured) == pred.ldlt &&
                        static_cast<std::int64_t>(selinv_measured) == pred.selinv;
        all_ok = all_ok && ok;
        const double total = best[0] + best[1] + best[2] + best[3];
        csv << problem << ',' << spec.name() << ',' << a.size() << ',' << a.nnz() << ',' << sym->nnz_L << ','
            << pred.ldlt << ',' << ldlt_measured << ',' << pred.selinv << ',' << selinv_measured << ',' << best[0]
            << ',' << best[1] << ',' << best[2] << ',' << best[3] << ',' << total << ','
            << (ok ? "ok" : "flop_mismatch") << '\n';
        if (o.fig_out) fig_file << problem << ',' << spec.name() << ',' << sym->nnz_L << ',' << total << '\n';
      } catch (const std::exception& e) {
        err << "problem " << problem << " (" << ord << "): " << e.what() << '\n';
        csv << problem << ',' << ord << ",,,,,,,,,,,,,error\n";
        all_ok = false;
      }
    }
  }
  return all_ok ? kExitOk : kExitCheckFailed;
}

int run_verify(const VerifyOptions& o, std::ostream& out, std::ostream& err) {
  if (has_suffix(o.input.string(), ".mtx")) {
    SelinvOptions s;
    s.matrix = o.input;
    s.ordering = o.ordering;
    s.verify = true;
    const int rc = run_selinv(s, out, err);
    if (rc == kExitError) return rc;
    const SparseSymmetric a = read_matrix_market(o.input);
    const SymbolicFactor sym = symbolic_factor(a, compute_ordering(a, OrderingSpec::parse(o.ordering)));
    const FlopPrediction fl = predict_flops(sym);
    const bool identity = selinv_flops_from_totals(a.size(), sym.nnz_L, fl.ldlt) == fl.selinv;
    out << "identity selinv = 2*ldlt - (nnz_L - n): " << (identity ? "PASS" : "FAIL") << '\n';
    return rc == kExitOk && identity ? kExitOk : kExitCheckFailed;
  }
  RemlOptions r;
  r.dataset = o.input;
  r.ordering = o.ordering;
  r.check_h_form = true;
  r.fd_check = true;
  return run_reml(r, out, err);
}

}  // namespace seldet::cli
