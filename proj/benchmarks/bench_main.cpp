#include <benchmark/benchmark.h>

#include <vector>

#include "hetnet/analytic.hpp"
#include "hetnet/sim.hpp"

using namespace hetnet;

static void BM_Varphi(benchmark::State& state) {
  const double alpha = static_cast<double>(state.range(0)) / 10.0;
  double x = 1e-3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(varphi(x, alpha));
    x = x < 1e3 ? x * 1.37 : 1e-3;
  }
}
BENCHMARK(BM_Varphi)->Arg(30)->Arg(40)->Arg(45);

static void BM_VarphiQuadrature(benchmark::State& state) {
  double x = 1e-3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(varphi_quadrature(x, 3.5));
    x = x < 1e3 ? x * 1.37 : 1e-3;
  }
}
BENCHMARK(BM_VarphiQuadrature);

static void BM_RatioTable(benchmark::State& state) {
  NetworkModel m = reference_model();
  m.noise_power = dbm_to_watts(-104.0);
  for (auto _ : state) {
    RatioCdfTable table(m, 0, 2, QuadSettings{});
    benchmark::DoNotOptimize(table.mass());
  }
}
BENCHMARK(BM_RatioTable)->Unit(benchmark::kMillisecond);

static void BM_FixedPoint(benchmark::State& state) {
  const auto vm = validate(reference_model()).value();
  solve_tier_probabilities(vm);  // warm the ratio-law cache
  for (auto _ : state) benchmark::DoNotOptimize(solve_tier_probabilities(vm).t);
}
BENCHMARK(BM_FixedPoint)->Unit(benchmark::kMillisecond);

static void BM_BuildCandidates(benchmark::State& state) {
  const NetworkModel m = reference_model();
  const Snapshot s = sample_snapshot(m, Window::auto_sized(m), 11);
  const Fading f(12);
  for (auto _ : state) benchmark::DoNotOptimize(build_candidates(s, f, m));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.mu.size()));
}
BENCHMARK(BM_BuildCandidates)->Unit(benchmark::kMillisecond);

static void BM_BestResponse(benchmark::State& state) {
  const NetworkModel m = reference_model();
  const Snapshot s = sample_snapshot(m, Window::auto_sized(m), 11);
  const Fading f(12);
  const auto cand = build_candidates(s, f, m);
  for (auto _ : state) benchmark::DoNotOptimize(associate(cand, s, f, m, {Scheme::Proposed}).rounds);
}
BENCHMARK(BM_BestResponse)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
