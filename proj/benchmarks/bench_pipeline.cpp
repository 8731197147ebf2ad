#include <benchmark/benchmark.h>

#include <memory>

#include "seldet/datagen.hpp"
#include "seldet/ldlt.hpp"
#include "seldet/ordering.hpp"
#include "seldet/reml.hpp"
#include "seldet/selinv.hpp"
#include "seldet/symbolic.hpp"

using namespace seldet;

namespace {

// 5-point Laplacian on a k x k grid.
SparseSymmetric grid(Index k) {
  TripletList t(k * k);
  for (Index r = 0; r < k; ++r) {
    for (Index c = 0; c < k; ++c) {
      const Index i = r * k + c;
      t.add(i, i, 4.0);
      if (c + 1 < k) t.add(i + 1, i, -1.0);
      if (r + 1 < k) t.add(i + k, i, -1.0);
    }
  }
  return from_triplets(t);
}

const SparseSymmetric& trial_mme() {
  static const SparseSymmetric c = [] {
    const auto d = generate(TrialConfig::preset("prob1"));
    return assemble_mme(d, VarianceParams::unit(d)).C;
  }();
  return c;
}

void set_counters(benchmark::State& state, const SparseSymmetric& a) {
  state.counters["n"] = static_cast<double>(a.size());
  state.counters["nnz"] = static_cast<double>(a.nnz());
}

}  // namespace

static void BM_AmdGrid(benchmark::State& state) {
  const auto a = grid(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(amd_order(a));
  set_counters(state, a);
}
BENCHMARK(BM_AmdGrid)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_SymbolicGrid(benchmark::State& state) {
  const auto a = grid(state.range(0));
  const auto p = amd_order(a);
  for (auto _ : state) benchmark::DoNotOptimize(symbolic_factor(a, p));
  set_counters(state, a);
}
BENCHMARK(BM_SymbolicGrid)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_FactorGrid(benchmark::State& state) {
  const auto a = grid(state.range(0));
  const auto sym = std::make_shared<const SymbolicFactor>(symbolic_factor(a, amd_order(a)));
  for (auto _ : state) benchmark::DoNotOptimize(ldlt_factorize(a, sym));
  state.counters["flops"] = static_cast<double>(predict_flops(*sym).ldlt);
}
BENCHMARK(BM_FactorGrid)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_SelinvGrid(benchmark::State& state) {
  const auto a = grid(state.range(0));
  const auto f = ldlt_factorize(a, amd_order(a));
  for (auto _ : state) benchmark::DoNotOptimize(selected_inverse(f));
  state.counters["flops"] = static_cast<double>(predict_flops(*f.sym).selinv);
}
BENCHMARK(BM_SelinvGrid)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_TrialMmeOrder(benchmark::State& state) {
  const auto& c = trial_mme();
  for (auto _ : state) benchmark::DoNotOptimize(amd_order(c));
  set_counters(state, c);
}
BENCHMARK(BM_TrialMmeOrder)->Unit(benchmark::kMillisecond);

static void BM_TrialMmeFactorAndSelinv(benchmark::State& state) {
  const auto& c = trial_mme();
  const auto sym = std::make_shared<const SymbolicFactor>(symbolic_factor(c, amd_order(c)));
  for (auto _ : state) {
    const auto f = ldlt_factorize(c, sym);
    benchmark::DoNotOptimize(selected_inverse(f));
  }
  set_counters(state, c);
}
BENCHMARK(BM_TrialMmeFactorAndSelinv)->Unit(benchmark::kMillisecond);

static void BM_RemlEvaluate(benchmark::State& state) {
  const auto d = generate(TrialConfig::preset("prob1"));
  const RemlEvaluator ev(d);
  const auto v = VarianceParams::unit(d);
  for (auto _ : state) benchmark::DoNotOptimize(ev.evaluate(v));
}
BENCHMARK(BM_RemlEvaluate)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
