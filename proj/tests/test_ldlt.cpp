#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <random>

#include "oracles.hpp"
#include "seldet/dense.hpp"
#include "seldet/error.hpp"
#include "seldet/ldlt.hpp"
#include "seldet/ordering.hpp"

using namespace seldet;

namespace {

SparseSymmetric two_by_two() {
  TripletList t(2);
  t.add(0, 0, 4);
  t.add(1, 0, 2);
  t.add(1, 1, 3);
  return from_triplets(t);
}

}  // namespace

TEST(Ldlt, Identity) {
  const auto f = ldlt_factorize(SparseSymmetric::identity(4), Permutation::identity(4));
  EXPECT_TRUE(f.l_values.empty());
  for (double d : f.d) EXPECT_EQ(d, 1.0);
  EXPECT_EQ(log_det(f), 0.0);
  EXPECT_EQ(f.flops, 0u);
}

TEST(Ldlt, TwoByTwo) {
  const auto f = ldlt_factorize(two_by_two(), Permutation::identity(2));
  ASSERT_EQ(f.l_values.size(), 1u);
  EXPECT_DOUBLE_EQ(f.l_values[0], 0.5);
  EXPECT_DOUBLE_EQ(f.d[0], 4.0);
  EXPECT_DOUBLE_EQ(f.d[1], 2.0);
  EXPECT_NEAR(log_det(f), std::log(8.0), 1e-15);
  const auto x = solve(f, std::vector<double>{8, 8});
  EXPECT_NEAR(x[0], 1.0, 1e-15);
  EXPECT_NEAR(x[1], 2.0, 1e-15);
}

TEST(Ldlt, IndefiniteReportsPivot) {
  TripletList t(2);
  t.add(0, 0, 1);
  t.add(1, 0, 2);
  t.add(1, 1, 1);
  try {
    ldlt_factorize(from_triplets(t), Permutation::identity(2));
    FAIL();
  } catch (const NonPositivePivotError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonPositivePivot);
    EXPECT_EQ(e.index(), 1);
    EXPECT_EQ(e.original_index(), 1);
    EXPECT_DOUBLE_EQ(e.pivot(), -3.0);
  }
}

TEST(Ldlt, PivotIndexReportedInBothOrderings) {
  TripletList t(2);
  t.add(0, 0, 1);
  t.add(1, 0, 2);
  t.add(1, 1, 1);
  try {
    ldlt_factorize(from_triplets(t), Permutation({1, 0}));
    FAIL();
  } catch (const NonPositivePivotError& e) {
    EXPECT_EQ(e.index(), 1);
    EXPECT_EQ(e.original_index(), 0);
  }
}

TEST(Ldlt, PivotTolerance) {
  FactorOptions o;
  o.pivot_tol = 2.5;
  EXPECT_THROW(ldlt_factorize(two_by_two(), Permutation::identity(2), o), NonPositivePivotError);
}

TEST(Ldlt, NearSingularRecorded) {
  TripletList t(2);
  t.add(0, 0, 1.0);
  t.add(1, 0, 1.0);
  t.add(1, 1, 1.0 + 1e-15);
  const auto f = ldlt_factorize(from_triplets(t), Permutation::identity(2));
  ASSERT_EQ(f.near_singular.size(), 1u);
  EXPECT_EQ(f.near_singular[0], 1);
}

TEST(Ldlt, PivotTolFromEnvironment) {
  ::setenv("SELDET_PIVOT_TOL", "1e-3", 1);
  EXPECT_DOUBLE_EQ(FactorOptions::from_environment().near_singular_rel, 1e-3);
  ::setenv("SELDET_PIVOT_TOL", "oops", 1);
  EXPECT_THROW(FactorOptions::from_environment(), Error);
  ::unsetenv("SELDET_PIVOT_TOL");
  EXPECT_DOUBLE_EQ(FactorOptions::from_environment().near_singular_rel, 1e-13);
}

TEST(Ldlt, PatternMismatch) {
  const auto a = oracle::tridiagonal(4);
  auto sym = std::make_shared<const SymbolicFactor>(symbolic_factor(SparseSymmetric::identity(4),
                                                                    Permutation::identity(4)));
  try {
    ldlt_factorize(a, sym);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PatternMismatch);
  }
}

TEST(Ldlt, SubpatternMatrixOnLargerSymbolic) {
  const auto a = oracle::tridiagonal(5, 3.0, -1.0);
  auto sym = std::make_shared<const SymbolicFactor>(symbolic_factor(oracle::arrowhead(5, true),
                                                                    Permutation::identity(5)));
  const auto f = ldlt_factorize(SparseSymmetric::identity(5), sym);
  EXPECT_EQ(log_det(f), 0.0);
  const double direct = log_det(ldlt_factorize(a, Permutation::identity(5)));
  EXPECT_NEAR(log_det(ldlt_factorize(a, sym)), direct, 1e-13);
}

TEST(Ldlt, SolveSizeMismatch) {
  const auto f = ldlt_factorize(two_by_two(), Permutation::identity(2));
  try {
    solve(f, std::vector<double>{1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SizeMismatch);
  }
}

TEST(Ldlt, MatchesDenseFactorization) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Index n = 5 + static_cast<Index>(seed * 3);
    const auto a = oracle::random_spd(n, 0.1, seed, 2.0);
    const auto p = amd_order(a);
    const auto f = ldlt_factorize(a, p);
    const auto ref = oracle::dense_ldlt(oracle::dense_permuted(a, p));
    for (Index j = 0; j < n; ++j) {
      EXPECT_NEAR(f.d[static_cast<std::size_t>(j)], ref.d(j), 1e-12 * std::abs(ref.d(j)));
      const auto rows = f.sym->column_rows(j);
      const Index base = f.sym->l_col_ptr[static_cast<std::size_t>(j)];
      for (std::size_t k = 0; k < rows.size(); ++k) {
        EXPECT_NEAR(f.l_values[static_cast<std::size_t>(base) + k], ref.L(rows[k], j), 1e-11);
      }
    }
  }
}

TEST(Ldlt, ReconstructionOnPattern) {
  const auto a = oracle::random_spd(40, 0.1, 77);
  const auto p = amd_order(a);
  const auto f = ldlt_factorize(a, p);
  Eigen::MatrixXd l = Eigen::MatrixXd::Identity(40, 40);
  for (Index j = 0; j < 40; ++j) {
    const auto rows = f.sym->column_rows(j);
    const Index base = f.sym->l_col_ptr[static_cast<std::size_t>(j)];
    for (std::size_t k = 0; k < rows.size(); ++k) l(rows[k], j) = f.l_values[static_cast<std::size_t>(base) + k];
  }
  const Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(f.d.data(), 40);
  const Eigen::MatrixXd rec = l * d.asDiagonal() * l.transpose();
  const Eigen::MatrixXd pa = oracle::dense_permuted(a, p);
  for (Index j = 0; j < 40; ++j) {
    for (Index i = j; i < 40; ++i) {
      if (pa(i, j) != 0.0) {
        EXPECT_NEAR(rec(i, j), pa(i, j), 1e-12 * std::abs(pa(i, j)) + 1e-14);
      }
    }
  }
}

TEST(Ldlt, FlopCounterMatchesColumnCounts) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto a = oracle::random_spd(20 + static_cast<Index>(seed * 5), 0.05, seed);
    const auto f = ldlt_factorize(a, amd_order(a));
    EXPECT_EQ(static_cast<std::int64_t>(f.flops), oracle::ldlt_flops(f.sym->col_counts));
  }
}

TEST(LogDet, MatchesDenseAndIsOrderingInvariant) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto a = oracle::random_spd(100, 0.05, seed, 3.0);
    const double ld_amd = log_det(ldlt_factorize(a, amd_order(a)));
    const double ld_nat = log_det(ldlt_factorize(a, natural_order(100)));
    const double ref = std::log(oracle::dense(a).determinant());
    EXPECT_LE(std::abs(ld_amd - ref), 1e-10 * std::max(1.0, std::abs(ref)));
    EXPECT_LE(std::abs(ld_amd - ld_nat), 1e-12 * std::max(1.0, std::abs(ref)));
  }
}

TEST(LogDet, Reciprocity) {
  const auto a = oracle::random_spd(30, 0.2, 4);
  const Eigen::MatrixXd inv = oracle::dense(a).inverse();
  TripletList t(30);
  for (Index j = 0; j < 30; ++j) {
    for (Index i = j; i < 30; ++i) t.add(i, j, 0.5 * (inv(i, j) + inv(j, i)));
  }
  const auto b = from_triplets(t);
  const double sum = log_det(ldlt_factorize(a, amd_order(a))) + log_det(ldlt_factorize(b, amd_order(b)));
  EXPECT_NEAR(sum, 0.0, 1e-8);
}

TEST(Solve, RecoversKnownSolution) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Index n = 10 * static_cast<Index>(seed);
    const auto a = oracle::random_spd(n, 0.05, seed);
    Eigen::VectorXd x0(n);
    for (Index i = 0; i < n; ++i) x0(i) = normal(rng);
    const Eigen::VectorXd b = oracle::dense(a) * x0;
    const auto x = solve(ldlt_factorize(a, amd_order(a)), std::vector<double>(b.data(), b.data() + n));
    const Eigen::VectorXd xv = Eigen::Map<const Eigen::VectorXd>(x.data(), n);
    EXPECT_LE((xv - x0).norm(), 1e-9 * x0.norm());
    EXPECT_LE((oracle::dense(a) * xv - b).lpNorm<Eigen::Infinity>(), 1e-8 * b.lpNorm<Eigen::Infinity>());
  }
}

TEST(DenseOracle, Basics) {
  EXPECT_TRUE(dense_inverse_oracle(SparseSymmetric::identity(3)).isIdentity());
  Eigen::MatrixXd expect(2, 2);
  expect << 3, -2, -2, 4;
  EXPECT_TRUE(dense_inverse_oracle(two_by_two()).isApprox(expect / 8.0, 1e-15));
  const auto a = oracle::random_spd(50, 0.1, 2);
  EXPECT_TRUE((oracle::dense(a) * dense_inverse_oracle(a)).isIdentity(1e-10));
  EXPECT_THROW(dense_inverse_oracle(SparseSymmetric::identity(501)), Error);
  TripletList t(2);
  t.add(0, 0, 1);
  t.add(1, 0, 1);
  t.add(1, 1, 1);
  try {
    dense_inverse_oracle(from_triplets(t));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularMatrix);
  }
}
