#include <benchmark/benchmark.h>

#include "maxstab/clt.hpp"
#include "maxstab/gaussian.hpp"
#include "maxstab/rng.hpp"
#include "maxstab/simulate.hpp"

namespace {

using namespace maxstab;

GridSpec square(int dim, long n, double delta) {
  GridSpec g;
  g.dim = dim;
  g.delta = delta;
  for (int k = 0; k < dim; ++k) g.counts[static_cast<std::size_t>(k)] = n;
  return g;
}

void BM_SmithField(benchmark::State& state) {
  const GridSpec g = square(2, state.range(0), 0.25);
  SimulationControl c;
  c.threads = 1;
  SmithSampler s(SmithModel::isotropic(2, 1.0), g.sites(), c, &g);
  std::uint64_t r = 0;
  for (auto _ : state) benchmark::DoNotOptimize(s.sample(r++));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_SmithField)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_BrExtremalField(benchmark::State& state) {
  const GridSpec g = square(2, state.range(0), 0.25);
  SimulationControl c;
  c.threads = 1;
  BrownResnickModel m;
  m.variogram = {1.0, 1.0};
  BrExtremalSampler s(m, g.sites(), c, &g);
  std::uint64_t r = 0;
  for (auto _ : state) benchmark::DoNotOptimize(s.sample(r++));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_BrExtremalField)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_BrThresholdField(benchmark::State& state) {
  const GridSpec g = square(2, state.range(0), 0.25);
  SimulationControl c;
  c.threads = 1;
  BrownResnickModel m;
  m.variogram = {1.0, 1.0};
  BrThresholdSampler s(m, g.sites(), c);
  std::uint64_t r = 0;
  for (auto _ : state) benchmark::DoNotOptimize(s.sample(r++));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_BrThresholdField)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_FbfSample(benchmark::State& state) {
  const GridSpec g = square(2, state.range(0), 0.25);
  const SiteSet sites = g.sites();
  PowerVariogram v{1.0, 1.0};
  FbfSampler fbf(v, sites, {0.0, 0.0, 0.0});
  RngStream rng(7, 1);
  std::vector<double> out(sites.size());
  std::vector<double> normals(sites.size());
  for (auto _ : state) {
    fbf.sample(rng, out, normals);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_FbfSample)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_PairCovarianceOffset(benchmark::State& state) {
  // One sigma2 lattice offset: n two-site simulations.
  SimulationControl c;
  c.threads = 1;
  const CostFunctional F = CostFunctional::deductible_log(2.718281828459045);
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_sigma2_integral(
        SmithModel::isotropic(2, 1.0), F, 2, 1.0, 200, c, 2.0));
  }
}
BENCHMARK(BM_PairCovarianceOffset)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
