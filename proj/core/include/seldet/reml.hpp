#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "seldet/dataset.hpp"
#include "seldet/ldlt.hpp"
#include "seldet/ordering.hpp"
#include "seldet/selinv.hpp"
#include "seldet/sparse.hpp"
#include "seldet/symbolic.hpp"

namespace seldet {

/// kappa = (sigma2, gamma, phi). G = (+)_j gamma_j I, R = (+)_k phi_k I.
struct VarianceParams {
  double sigma2 = 1.0;
  std::vector<double> gamma;  // one per random factor
  std::vector<double> phi;    // one per residual block

  static VarianceParams unit(const MixedModelDataset& d);

  /// Throws ConfigInvalid on wrong counts or non-positive values.
  void validate(const MixedModelDataset& d) const;

  /// Parameters C depends on, gammas first: size() == gamma.size() + phi.size().
  std::size_t size() const noexcept { return gamma.size() + phi.size(); }
  double component(std::size_t k) const;
  void set_component(std::size_t k, double value);
};

/// C [tau; u] = rhs with C of order p + b, plus dC/dkappa for each of
/// gamma_1..gamma_F, phi_1..phi_K (all on sub-patterns of C).
struct MmeSystem {
  SparseSymmetric C;
  std::vector<double> rhs;
  std::vector<SparseSymmetric> derivative_templates;
  Index p = 0;
  Index b = 0;
};

/// Holds the parameter-free pieces of the mixed model equations: the pattern
/// of C and, per residual block k, W_k^T W_k, W_k^T y_k and y_k^T y_k.
/// assemble() then only rescales and sums.
class MmeAssembler {
 public:
  explicit MmeAssembler(const MixedModelDataset& d);

  MmeSystem assemble(const VarianceParams& v) const;

  const SparseSymmetric& pattern() const noexcept { return pattern_; }
  Index dimension() const noexcept { return p_ + b_; }
  Index n_obs() const noexcept { return n_; }
  Index p() const noexcept { return p_; }
  Index b() const noexcept { return b_; }
  const std::vector<Index>& factor_levels() const noexcept { return levels_; }
  const std::vector<Index>& block_sizes() const noexcept { return block_n_; }

  double y_rinv_y(const VarianceParams& v) const;

 private:
  Index n_ = 0, p_ = 0, b_ = 0;
  std::vector<Index> levels_;
  std::vector<Index> offsets_;
  SparseSymmetric pattern_;
  std::vector<Index> diag_pos_;
  std::vector<SparseSymmetric> gram_;
  std::vector<std::vector<Index>> gram_pos_;
  std::vector<std::vector<double>> wy_;
  std::vector<double> yy_;
  std::vector<Index> block_n_;
};

MmeSystem assemble_mme(const MixedModelDataset& d, const VarianceParams& v);

struct MmeSolution {
  std::vector<double> tau_hat;
  std::vector<double> u_tilde;
};

MmeSolution solve_mme(const MmeSystem& m, const OrderingSpec& ordering = {});

enum class LoglikForm { H, C };

struct LoglikTerms {
  double loglik = 0.0;
  double logdet_C = 0.0;
  double logdet_R = 0.0;
  double logdet_G = 0.0;
  double yPy = 0.0;
  Index n = 0;
  Index p = 0;
};

/// -1/2 [ (n-p) ln sigma2 + logdet C + logdet R + logdet G + y'Py / sigma2 ]
/// through the sparse pipeline (LoglikForm::C), or
/// -1/2 [ (n-p) ln sigma2 + logdet H + logdet X'H^{-1}X + y'Py / sigma2 ]
/// with a dense H = R + Z G Z' (LoglikForm::H, n <= 500).
double restricted_loglik(const MixedModelDataset& d, const VarianceParams& v, LoglikForm form);

/// Dense H-form; throws TooLargeForDenseForm for n > 500.
double restricted_loglik_h_form(const MixedModelDataset& d, const VarianceParams& v);

/// tr(C^{-1} B) = sum_i Z_ii B_ii + 2 sum_{i>j} Z_ij B_ij.
/// Throws PatternNotCovered if B has an entry outside the selected pattern.
double trace_product(const SelectedInverse& z, const SparseSymmetric& b);

/// d logdet C / d kappa_i for every derivative template (gammas, then phis).
std::vector<double> logdet_gradient(const MmeSystem& m, const SelectedInverse& z);

/// sigma2 * diag(C^{-1}), in the original ordering of C.
std::vector<double> pev_diagonal(const SelectedInverse& z, double sigma2);

/// Restricted likelihood pipeline with the ordering and symbolic analysis of
/// C computed once and reused for every parameter point. Safe to call
/// evaluate() concurrently; each call owns its factorization.
class RemlEvaluator {
 public:
  struct Result {
    LoglikTerms terms;
    std::vector<double> gradient;
    std::vector<double> pev;
    MmeSolution solution;
    std::uint64_t ldlt_flops = 0;
    std::uint64_t selinv_flops = 0;
    std::vector<Index> near_singular;
  };

  explicit RemlEvaluator(const MixedModelDataset& d, const OrderingSpec& ordering = {},
                         FactorOptions options = {});

  Result evaluate(const VarianceParams& v) const;
  LoglikTerms loglik(const VarianceParams& v) const;
  double logdet_C(const VarianceParams& v) const;

  const MmeAssembler& assembler() const noexcept { return assembler_; }
  const SymbolicFactor& symbolic() const noexcept { return *sym_; }
  std::shared_ptr<const SymbolicFactor> symbolic_ptr() const noexcept { return sym_; }

 private:
  LoglikTerms terms(const MmeSystem& m, const LdlFactor& f, const VarianceParams& v,
                    MmeSolution* solution) const;

  MmeAssembler assembler_;
  std::shared_ptr<const SymbolicFactor> sym_;
  FactorOptions options_;
};

}  // namespace seldet
