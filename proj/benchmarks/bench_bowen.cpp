#include <benchmark/benchmark.h>

#include "entlab/bowen.hpp"

using namespace entlab;

static void GreedySeparatedTorus(benchmark::State& state) {
  const System cat = System::torus({2, 1, 1, 1}, 2);
  const double delta = 1.0 / double(state.range(0));
  const SampledSpace space = sample_grid(cat, delta);
  for (auto _ : state) {
    benchmark::DoNotOptimize(max_separated(space, cat, 4, 0.1).count);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(GreedySeparatedTorus)->Arg(32)->Arg(64)->Arg(128)->Complexity();

static void CylinderCountShift(benchmark::State& state) {
  GridOptions g;
  g.truncation = 16;
  const System shift = System::full_shift(2);
  const SampledSpace space = sample_grid(shift, 0.0, g);
  for (auto _ : state) {
    benchmark::DoNotOptimize(max_separated(space, shift, std::size_t(state.range(0)), 0.4).count);
  }
}
BENCHMARK(CylinderCountShift)->Arg(6)->Arg(10)->Arg(14);
