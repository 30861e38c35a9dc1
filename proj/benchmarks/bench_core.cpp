#include <benchmark/benchmark.h>

#include <vector>

#include "anderson/approx.hpp"
#include "anderson/gauge.hpp"
#include "anderson/interval_union.hpp"
#include "anderson/localization.hpp"
#include "anderson/potential.hpp"
#include "anderson/rng.hpp"
#include "anderson/spectral_stats.hpp"
#include "anderson/transfer.hpp"
#include "anderson/tridiagonal.hpp"

using namespace anderson;

namespace {

const PotentialDistribution kUnit = PotentialDistribution::uniform(0, 1);
const PotentialDistribution kStrong = PotentialDistribution::uniform(0, 5);

void BM_Philox(benchmark::State& state) {
  RandomStream r(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(r.next_u64());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Philox);

void BM_SamplePotential(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample_potential(kUnit, n, 1, 0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SamplePotential)->Arg(1 << 16);

void BM_TransferProduct(benchmark::State& state) {
  const auto v = sample_potential(kUnit, static_cast<std::size_t>(state.range(0)), 2, 0);
  for (auto _ : state) benchmark::DoNotOptimize(transfer_product(v, 0.5).product.log_norm());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TransferProduct)->Arg(100000);

void BM_SturmCount(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto block = restrict_block(sample_potential(kUnit, n, 3, 0), 1, n);
  for (auto _ : state) benchmark::DoNotOptimize(sturm_count(block, 0.5));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SturmCount)->Arg(1024)->Arg(16384);

void BM_EigenvaluesBisection(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto block = restrict_block(sample_potential(kStrong, n, 4, 0), 1, n);
  for (auto _ : state) benchmark::DoNotOptimize(eigenvalues_bisection(block, 1e-12));
}
BENCHMARK(BM_EigenvaluesBisection)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_SpectrumWithVectors(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto block = restrict_block(sample_potential(kStrong, n, 5, 0), 1, n);
  for (auto _ : state) benchmark::DoNotOptimize(spectrum(block, 1e-12, true));
}
BENCHMARK(BM_SpectrumWithVectors)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_CenterOrderedEigenvalues(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto block = restrict_block(sample_potential(kStrong, n, 6, 0), 1, n);
  for (auto _ : state) benchmark::DoNotOptimize(center_ordered_eigenvalues(block, 1e-12));
}
BENCHMARK(BM_CenterOrderedEigenvalues)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_IdsEstimate(benchmark::State& state) {
  const auto grid = uniform_grid(-2, 3, 0.005);
  for (auto _ : state) benchmark::DoNotOptimize(ids_estimate(kUnit, grid, 1024, 16, 7, 1));
}
BENCHMARK(BM_IdsEstimate)->Unit(benchmark::kMillisecond);

IntervalUnion random_union(std::size_t n, std::uint64_t seed) {
  RandomStream r(seed, 0);
  std::vector<Interval> v;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = r.uniform();
    const double w = 0.5 / static_cast<double>(n) * r.uniform_open();
    v.push_back({c - w, c + w});
  }
  return IntervalUnion(v).clip({0, 1});
}

void BM_IntervalUnionBuild(benchmark::State& state) {
  RandomStream r(8, 0);
  std::vector<double> c(static_cast<std::size_t>(state.range(0)));
  for (auto& x : c) x = r.uniform();
  for (auto _ : state) benchmark::DoNotOptimize(union_of_intervals(c, 1e-4, {0, 1}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_IntervalUnionBuild)->Arg(4096)->Arg(65536);

void BM_CoveringFunction(benchmark::State& state) {
  const auto B = random_union(static_cast<std::size_t>(state.range(0)), 9);
  for (auto _ : state) benchmark::DoNotOptimize(covering_function(B, {0, 1}, 0.01));
}
BENCHMARK(BM_CoveringFunction)->Arg(64)->Arg(4096);

void BM_SeriesTest(benchmark::State& state) {
  const auto rho = GaugeFunction::reciprocal_log();
  const auto alpha = ApproxSequence::exponential(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(series_test(rho, alpha, 100000));
}
BENCHMARK(BM_SeriesTest)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
