// Microbenchmarks for the odd-occupancy samplers: the fast lattice path
// should scale linearly in the grid size; the generic scatter path carries
// the heavy-tailed point-count cost, most visibly at small beta.

#include <benchmark/benchmark.h>

#include "karlin/geometry.hpp"
#include "karlin/occupancy.hpp"
#include "karlin/rng.hpp"
#include "karlin/smalljump.hpp"
#include "karlin/stats.hpp"

namespace {

using karlin::RngStream;
namespace geometry = karlin::geometry;
namespace occupancy = karlin::occupancy;

void BM_FastHalfLine(benchmark::State& state) {
  const auto geom =
      geometry::make_geometry("halfline", static_cast<std::size_t>(state.range(0)), 0);
  RngStream rng(42, 1);
  for (auto _ : state)
    benchmark::DoNotOptimize(occupancy::sample_occupancy(geom, 0.8, rng));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FastHalfLine)->RangeMultiplier(3)->Range(100, 8100)->Complexity();

void BM_FastRectangle(benchmark::State& state) {
  const auto geom =
      geometry::make_geometry("rectangle", static_cast<std::size_t>(state.range(0)), 0);
  RngStream rng(42, 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(occupancy::sample_occupancy(geom, 0.8, rng));
  state.SetComplexityN(state.range(0) * state.range(0));
}
BENCHMARK(BM_FastRectangle)->RangeMultiplier(2)->Range(16, 256)->Complexity();

void BM_GenericHalfLine(benchmark::State& state) {
  const auto geom =
      geometry::make_geometry("halfline", static_cast<std::size_t>(state.range(0)), 0);
  const double beta = static_cast<double>(state.range(1)) / 10.0;
  RngStream rng(42, 3);
  std::int64_t aborts = 0;
  for (auto _ : state) {
    try {
      benchmark::DoNotOptimize(
          occupancy::sample_occupancy_generic(geom, beta, rng, 100000));
    } catch (const occupancy::HeavyTailOverflow&) {
      ++aborts;
    }
  }
  state.counters["aborts"] = static_cast<double>(aborts);
}
BENCHMARK(BM_GenericHalfLine)
    ->Args({1000, 8})
    ->Args({1000, 5})
    ->Args({1000, 3});

void BM_SibuyaDraw(benchmark::State& state) {
  const double beta = static_cast<double>(state.range(0)) / 10.0;
  RngStream rng(42, 4);
  for (auto _ : state)
    benchmark::DoNotOptimize(karlin::stats::sample_sibuya(beta, rng));
}
BENCHMARK(BM_SibuyaDraw)->Arg(2)->Arg(5)->Arg(8);

void BM_CirculantFbm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i)
    grid[i] = static_cast<double>(i + 1) / static_cast<double>(n);
  RngStream rng(42, 5);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        karlin::smalljump::simulate_fbm_halfline(grid, 0.8, rng));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CirculantFbm)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

}  // namespace

BENCHMARK_MAIN();
