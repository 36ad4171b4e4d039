#include <vector>

#include <benchmark/benchmark.h>

#include "clutter/analytic_stats.hpp"
#include "clutter/estimators.hpp"
#include "clutter/mixing_law.hpp"
#include "clutter/speckle.hpp"
#include "clutter/texture_sim.hpp"

using namespace clutter;

static void BM_SampleGeometric(benchmark::State& state) {
  const MixingLaw law(make_builtin_finite(), 150.0);
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(law.sample(rng));
}
BENCHMARK(BM_SampleGeometric);

static void BM_SampleLogarithmic(benchmark::State& state) {
  const MixingLaw law(make_builtin_infinite(), 150.0);
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(law.sample(rng));
}
BENCHMARK(BM_SampleLogarithmic);

static void BM_SimulateFinite(benchmark::State& state) {
  SimConfig cfg;
  cfg.duration = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate(make_builtin_finite(), cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateFinite)->Arg(10'000)->Arg(100'000);

static void BM_SimulateInfinite(benchmark::State& state) {
  SimConfig cfg;
  cfg.mode = SimMode::infinite_approx;
  cfg.duration = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate(make_builtin_infinite(), cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateInfinite)->Arg(10'000)->Arg(100'000);

static void BM_SampleOnGrid(benchmark::State& state) {
  SimConfig cfg;
  cfg.duration = 1e5;
  const auto path = simulate(make_builtin_finite(), cfg);
  for (auto _ : state) benchmark::DoNotOptimize(sample_on_grid(path, cfg.dt, cfg.duration));
}
BENCHMARK(BM_SampleOnGrid);

static void BM_KTextureCdfTable(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(k_texture_law(2.0));
}
BENCHMARK(BM_KTextureCdfTable);

static void BM_KsDistance(benchmark::State& state) {
  Rng rng(2);
  std::vector<double> x(static_cast<std::size_t>(state.range(0)));
  for (auto& v : x) v = rng.exponential();
  const auto law = gamma_texture_law(1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ks_distance(x, [&](double t) { return law.cdf(t); }));
  }
}
BENCHMARK(BM_KsDistance)->Arg(10'000)->Arg(100'000);

static void BM_Ar1Speckle(benchmark::State& state) {
  const SpeckleSpec spec{1.0, Ar1Speckle{0.9}, 0.1};
  Rng rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(gen_speckle(spec, 100'000, rng));
}
BENCHMARK(BM_Ar1Speckle);

BENCHMARK_MAIN();
