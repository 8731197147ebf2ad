#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "seldet/error.hpp"
#include "seldet/ldlt.hpp"
#include "seldet/reml.hpp"

using namespace seldet;

namespace {

// n=2, X = ones, Z = I_2.
MixedModelDataset two_obs(double y1, double y2) {
  return make_dataset({y1, y2}, {}, {Factor::from_labels("g", {"a", "b"})});
}

MixedModelDataset one_obs() { return make_dataset({3.0}, {}, {Factor::from_labels("g", {"a"})}); }

}  // namespace

TEST(Assemble, TwoObservationExample) {
  const auto d = two_obs(1.0, 3.0);
  const auto m = assemble_mme(d, VarianceParams::unit(d));
  Eigen::MatrixXd expect(3, 3);
  expect << 2, 1, 1, 1, 2, 0, 1, 0, 2;
  EXPECT_EQ(oracle::dense(m.C), expect);
  EXPECT_EQ(m.rhs, (std::vector<double>{4.0, 1.0, 3.0}));
  EXPECT_EQ(m.p, 1);
  EXPECT_EQ(m.b, 2);

  const auto s = solve_mme(m);
  std::vector<double> x = s.tau_hat;
  x.insert(x.end(), s.u_tilde.begin(), s.u_tilde.end());
  const Eigen::VectorXd r = expect * Eigen::Map<const Eigen::VectorXd>(x.data(), 3) -
                            Eigen::Map<const Eigen::VectorXd>(m.rhs.data(), 3);
  EXPECT_LE(r.lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST(Assemble, OneObservationExample) {
  const auto d = one_obs();
  const auto m = assemble_mme(d, VarianceParams::unit(d));
  Eigen::MatrixXd expect(2, 2);
  expect << 1, 1, 1, 2;
  EXPECT_EQ(oracle::dense(m.C), expect);
}

TEST(Assemble, MatchesDenseBlocksAndTemplates) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const auto d = oracle::random_dataset(rng, 5, 40);
    const auto v = oracle::random_params(rng, d);
    const auto m = assemble_mme(d, v);
    EXPECT_EQ(m.C.size(), d.p() + d.b());
    EXPECT_LE((oracle::dense(m.C) - oracle::dense_c(d, v)).cwiseAbs().maxCoeff(), 1e-12);
    ASSERT_EQ(m.derivative_templates.size(), v.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
      EXPECT_TRUE(is_subpattern(m.derivative_templates[k], m.C));
      VarianceParams up = v;
      const double h = 1e-6 * v.component(k);
      up.set_component(k, v.component(k) + h);
      const Eigen::MatrixXd fd = (oracle::dense_c(d, up) - oracle::dense_c(d, v)) / h;
      EXPECT_LE((oracle::dense(m.derivative_templates[k]) - fd).cwiseAbs().maxCoeff(),
                1e-4 * std::max(1.0, fd.cwiseAbs().maxCoeff()));
    }
  }
}

TEST(Assemble, ErrorsFromDataset) {
  try {
    make_dataset({1.0, 2.0}, {}, {Factor{"empty", {}, {-1, -1}}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyFactor);
  }
  MixedModelDataset d;
  d.y = {1.0, 2.0};
  d.X = Eigen::MatrixXd::Ones(2, 2);
  d.residual_blocks = Factor::from_labels("", {"all", "all"});
  try {
    d.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::RankDeficientX);
  }
}

TEST(Params, Validation) {
  const auto d = two_obs(1, 2);
  auto v = VarianceParams::unit(d);
  EXPECT_NO_THROW(v.validate(d));
  v.gamma[0] = 0.0;
  EXPECT_THROW(v.validate(d), Error);
  v = VarianceParams::unit(d);
  v.phi.push_back(1.0);
  EXPECT_THROW(v.validate(d), Error);
}

TEST(SolveMme, MatchesGls) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto d = oracle::random_dataset(rng, 5, 50);
    const auto v = oracle::random_params(rng, d);
    const auto s = solve_mme(assemble_mme(d, v));
    const auto g = oracle::gls(d, v);
    for (Index i = 0; i < d.p(); ++i) {
      EXPECT_LE(std::abs(s.tau_hat[static_cast<std::size_t>(i)] - g.tau(i)), 1e-8 * std::max(1.0, std::abs(g.tau(i))));
    }
    for (Index i = 0; i < d.b(); ++i) {
      EXPECT_LE(std::abs(s.u_tilde[static_cast<std::size_t>(i)] - g.u(i)), 1e-8 * std::max(1.0, std::abs(g.u(i))));
    }
  }
}

TEST(SolveMme, ShrinkageLimits) {
  // y = X tau0 exactly: with gamma tiny the random effects vanish.
  std::vector<std::string> trt = {"a", "b", "a", "b", "a", "b"};
  std::vector<std::string> grp = {"g1", "g1", "g2", "g2", "g3", "g3"};
  std::vector<double> y;
  for (const auto& t : trt) y.push_back(t == "a" ? 2.0 : 5.0);
  const auto d = make_dataset(y, {Factor::from_labels("trt", trt)}, {Factor::from_labels("g", grp)});
  auto v = VarianceParams::unit(d);
  v.gamma[0] = 1e-12;
  const auto s = solve_mme(assemble_mme(d, v));
  EXPECT_NEAR(s.tau_hat[0], 2.0, 1e-9);
  EXPECT_NEAR(s.tau_hat[1], 3.0, 1e-9);
  for (double u : s.u_tilde) EXPECT_NEAR(u, 0.0, 1e-9);

  // Large gamma: group effects absorb the residual group means, which sum to zero here.
  std::vector<double> y2 = {1.0, 4.0, 2.5, 6.0, 0.5, 5.5};
  const auto d2 = make_dataset(y2, {Factor::from_labels("trt", trt)}, {Factor::from_labels("g", grp)});
  auto v2 = VarianceParams::unit(d2);
  v2.gamma[0] = 1e8;
  const auto m2 = assemble_mme(d2, v2);
  const auto s2 = solve_mme(m2);
  const Eigen::VectorXd ref = oracle::dense_c(d2, v2).ldlt().solve(Eigen::Map<const Eigen::VectorXd>(m2.rhs.data(), 5));
  for (Index i = 0; i < d2.b(); ++i) {
    EXPECT_NEAR(s2.u_tilde[static_cast<std::size_t>(i)], ref(d2.p() + i), 1e-6);
  }
  EXPECT_NEAR(s2.u_tilde[0], -0.75, 1e-6);
  EXPECT_NEAR(s2.u_tilde[1], 1.0, 1e-6);
  EXPECT_NEAR(s2.u_tilde[2], -0.25, 1e-6);
}

TEST(Loglik, TwoObservationZeroResponse) {
  const auto d = two_obs(0.0, 0.0);
  const auto v = VarianceParams::unit(d);
  const RemlEvaluator ev(d);
  const auto t = ev.loglik(v);
  EXPECT_NEAR(t.logdet_C, std::log(4.0), 1e-14);
  EXPECT_EQ(t.yPy, 0.0);
  EXPECT_EQ(t.logdet_R, 0.0);
  EXPECT_EQ(t.logdet_G, 0.0);
  EXPECT_NEAR(t.loglik, -0.5 * std::log(4.0), 1e-14);
}

TEST(Loglik, FormsAgree) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 25; ++trial) {
    const auto d = oracle::random_dataset(rng, 4, 60);
    const auto v = oracle::random_params(rng, d);
    const double c = restricted_loglik(d, v, LoglikForm::C);
    const double h = restricted_loglik(d, v, LoglikForm::H);
    const double ref = oracle::loglik_h(d, v);
    EXPECT_LE(std::abs(c - h), 1e-8 * std::max(1.0, std::abs(h)));
    EXPECT_LE(std::abs(c - ref), 1e-8 * std::max(1.0, std::abs(ref)));
  }
}

TEST(Loglik, ScalingResponseScalesQuadraticTerm) {
  std::mt19937_64 rng(4);
  const auto d = oracle::random_dataset(rng, 10, 30);
  auto d3 = d;
  for (double& y : d3.y) y *= 3.0;
  const auto v = oracle::random_params(rng, d);
  const auto a = RemlEvaluator(d).loglik(v);
  const auto b = RemlEvaluator(d3).loglik(v);
  EXPECT_NEAR(b.yPy, 9.0 * a.yPy, 1e-9 * b.yPy);
  EXPECT_NEAR(b.logdet_C, a.logdet_C, 1e-12 * std::abs(a.logdet_C) + 1e-12);
}

TEST(Loglik, HFormSizeGuardAndNeedsDegreesOfFreedom) {
  std::vector<double> y(501, 1.0);
  std::vector<std::string> g(501);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = "g" + std::to_string(i % 7);
  y[0] = 2.0;
  const auto big = make_dataset(y, {}, {Factor::from_labels("g", g)});
  try {
    restricted_loglik_h_form(big, VarianceParams::unit(big));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TooLargeForDenseForm);
  }
  EXPECT_THROW(RemlEvaluator(one_obs()).loglik(VarianceParams::unit(one_obs())), Error);
}

TEST(TraceProduct, Examples) {
  std::mt19937_64 rng(5);
  const auto d = oracle::random_dataset(rng, 10, 30);
  const auto v = oracle::random_params(rng, d);
  const auto m = assemble_mme(d, v);
  const auto z = selected_inverse(ldlt_factorize(m.C, amd_order(m.C)));
  const Index dim = m.C.size();
  EXPECT_NEAR(trace_product(z, m.C), static_cast<double>(dim), 1e-9 * static_cast<double>(dim));
  double diag = 0.0;
  for (double x : z.z_diag()) diag += x;
  EXPECT_NEAR(trace_product(z, SparseSymmetric::identity(dim)), diag, 1e-12 * diag);
  const Eigen::MatrixXd cinv = oracle::dense(m.C).inverse();
  for (const auto& t : m.derivative_templates) {
    const double ref = (cinv * oracle::dense(t)).trace();
    EXPECT_LE(oracle::rel_err(trace_product(z, t), ref), 1e-9);
  }
  EXPECT_THROW(trace_product(z, SparseSymmetric::identity(dim + 1)), Error);
}

TEST(TraceProduct, PatternNotCovered) {
  const auto a = oracle::tridiagonal(3);
  const auto z = selected_inverse(ldlt_factorize(a, Permutation::identity(3)));
  TripletList t(3);
  t.add(2, 0, 1.0);
  try {
    trace_product(z, from_triplets(t));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PatternNotCovered);
  }
}

TEST(Gradient, OneObservationExample) {
  const auto d = one_obs();
  const auto m = assemble_mme(d, VarianceParams::unit(d));
  const auto z = selected_inverse(ldlt_factorize(m.C, Permutation::identity(2)));
  const auto g = logdet_gradient(m, z);
  ASSERT_EQ(g.size(), 2u);
  EXPECT_NEAR(g[0], -1.0, 1e-14);
  const auto pev = pev_diagonal(z, 1.0);
  EXPECT_NEAR(pev[0], 2.0, 1e-14);
  EXPECT_NEAR(pev[1], 1.0, 1e-14);
}

TEST(Gradient, SingleFactorIsMinusBlockDiagonalSum) {
  const auto d = make_dataset({1, 2, 3, 4, 5}, {}, {Factor::from_labels("g", {"a", "b", "a", "c", "b"})});
  const auto m = assemble_mme(d, VarianceParams::unit(d));
  const auto z = selected_inverse(ldlt_factorize(m.C, amd_order(m.C)));
  double s = 0.0;
  for (Index i = 1; i < 4; ++i) s += *z.get_entry(i, i);
  EXPECT_NEAR(logdet_gradient(m, z)[0], -s, 1e-13);
}

TEST(Gradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 8; ++trial) {
    const auto d = oracle::random_dataset(rng, 8, 60);
    const RemlEvaluator ev(d);
    for (int point = 0; point < 3; ++point) {
      const auto v = oracle::random_params(rng, d);
      const auto r = ev.evaluate(v);
      for (std::size_t k = 0; k < v.size(); ++k) {
        const double h = 1e-5 * v.component(k);
        auto up = v, down = v;
        up.set_component(k, v.component(k) + h);
        down.set_component(k, v.component(k) - h);
        const double fd = (ev.logdet_C(up) - ev.logdet_C(down)) / (2 * h);
        EXPECT_LE(oracle::rel_err(r.gradient[k], fd), 1e-6) << "component " << k;
      }
    }
  }
}

TEST(Pev, MatchesDenseDiagonal) {
  std::mt19937_64 rng(8);
  const auto d = oracle::random_dataset(rng, 20, 40);
  auto v = oracle::random_params(rng, d);
  v.sigma2 = 2.0;
  const auto r = RemlEvaluator(d).evaluate(v);
  const Eigen::MatrixXd cinv = oracle::dense_c(d, v).inverse();
  for (Index i = 0; i < cinv.rows(); ++i) {
    EXPECT_GT(r.pev[static_cast<std::size_t>(i)], 0.0);
    EXPECT_NEAR(r.pev[static_cast<std::size_t>(i)], 2.0 * cinv(i, i), 1e-9 * cinv(i, i));
  }
  const auto z = selected_inverse(ldlt_factorize(SparseSymmetric::identity(4), Permutation::identity(4)));
  for (double p : pev_diagonal(z, 2.0)) EXPECT_EQ(p, 2.0);
}

TEST(RemlEvaluator, ReusesSymbolicAcrossPoints) {
  std::mt19937_64 rng(9);
  const auto d = oracle::random_dataset(rng, 20, 50);
  const RemlEvaluator ev(d);
  const auto* before = &ev.symbolic();
  const auto v1 = oracle::random_params(rng, d);
  const auto v2 = oracle::random_params(rng, d);
  const auto r1 = ev.evaluate(v1);
  const auto r2 = ev.evaluate(v2);
  EXPECT_EQ(before, &ev.symbolic());
  EXPECT_EQ(r1.ldlt_flops, r2.ldlt_flops);
  EXPECT_LE(oracle::rel_err(r1.terms.loglik, restricted_loglik(d, v1, LoglikForm::C)), 1e-12);
  const auto s = solve_mme(assemble_mme(d, v2));
  EXPECT_LE(oracle::rel_err(r2.solution.tau_hat[0], s.tau_hat[0]), 1e-10);
}

TEST(Dataset, ReadWriteRoundTrip) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 10; ++trial) {
    const auto d = oracle::random_dataset(rng, 5, 30);
    std::stringstream s;
    write_dataset(d, s);
    const auto back = read_dataset(s);
    EXPECT_EQ(back.y, d.y);
    EXPECT_EQ(back.X, d.X);
    ASSERT_EQ(back.random_factors.size(), d.random_factors.size());
    for (std::size_t f = 0; f < d.random_factors.size(); ++f) {
      EXPECT_EQ(back.random_factors[f].level, d.random_factors[f].level);
    }
    EXPECT_EQ(back.residual_blocks.level, d.residual_blocks.level);
  }
}

TEST(Dataset, ParseErrors) {
  auto kind = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_dataset(in);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::IoError;
  };
  EXPECT_EQ(kind("y\trandom:g\n1\tNA\n"), ErrorKind::ParseError);
  EXPECT_EQ(kind("y\tg\n1\ta\n"), ErrorKind::ParseError);
  EXPECT_EQ(kind("y\trandom:g\n1\n"), ErrorKind::ParseError);
  EXPECT_EQ(kind("y\trandom:g\nx\ta\n"), ErrorKind::ParseError);
  EXPECT_EQ(kind("y\tresid:a\tresid:b\n1\tx\ty\n"), ErrorKind::ParseError);
  std::istringstream ok("y\tfixed:t\trandom:g\tresid:r\n1\ta\tg1\tr1\n2\tb\tg1\tr2\n3\ta\tg2\tr1\n");
  const auto d = read_dataset(ok);
  EXPECT_EQ(d.p(), 2);
  EXPECT_EQ(d.b(), 2);
  EXPECT_EQ(d.residual_block_count(), 2);
}
