#include <benchmark/benchmark.h>

#include "entlab/metric.hpp"
#include "entlab/space.hpp"
#include "entlab/system.hpp"

using namespace entlab;

static void IteratedMetricTorus(benchmark::State& state) {
  const System cat = System::torus({2, 1, 1, 1}, 2);
  const Metric base = metrics::torus_sup();
  const IteratedMetric dn(base, cat, std::size_t(state.range(0)));
  const State x{0.21, 0.73};
  const State y{0.22, 0.70};
  for (auto _ : state) {
    benchmark::DoNotOptimize(dn.eval(x, y));
  }
}
BENCHMARK(IteratedMetricTorus)->Arg(4)->Arg(8)->Arg(16);

static void SequenceMetricEval(benchmark::State& state) {
  const Metric d = metrics::sequence(SequenceCoord::Discrete);
  State x(std::size_t(state.range(0)), 0.0);
  State y = x;
  y.back() = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(d(x, y));
  }
}
BENCHMARK(SequenceMetricEval)->Arg(8)->Arg(16)->Arg(32);
