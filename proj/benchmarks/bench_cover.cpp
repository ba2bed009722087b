#include <benchmark/benchmark.h>

#include "entlab/cover.hpp"

using namespace entlab;

namespace {

Cover doubling_halves(const SampledSpace& space) {
  std::vector<MemberSet> halves(2);
  for (std::size_t i = 0; i < space.size(); ++i)
    halves[space.point(i)[0] < 0.5 ? 0 : 1].push_back(std::uint32_t(i));
  return Cover::from_members(space.size(), std::move(halves));
}

}  // namespace

static void IterateCoverDoubling(benchmark::State& state) {
  const System doubling = System::torus({2}, 1);
  const SampledSpace space = sample_grid(doubling, 1.0 / 1024.0);
  const DiscreteMap map = discretize(space, doubling);
  const Cover arcs = doubling_halves(space);
  for (auto _ : state) {
    benchmark::DoNotOptimize(iterate_cover(arcs, map, std::size_t(state.range(0))).size());
  }
}
BENCHMARK(IterateCoverDoubling)->Arg(4)->Arg(6)->Arg(8);

static void MinSubcoverDyadic(benchmark::State& state) {
  const System doubling = System::torus({2}, 1);
  const SampledSpace space = sample_grid(doubling, 1.0 / 1024.0);
  const DiscreteMap map = discretize(space, doubling);
  const Cover iterated = iterate_cover(doubling_halves(space), map, std::size_t(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(min_subcover_cardinality(iterated).value());
  }
}
BENCHMARK(MinSubcoverDyadic)->Arg(4)->Arg(8);
