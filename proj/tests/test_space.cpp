#include "doctest.h"

#include <cmath>

#include "entlab/space.hpp"

using namespace entlab;

TEST_SUITE_BEGIN("space");

TEST_CASE("circle lattice at delta 1/4 has 4 points") {
  const SampledSpace s = sample_grid(System::torus({1}, 1), 0.25);
  CHECK(s.size() == 4);
  CHECK(s.mesh() == doctest::Approx(0.25));
}

TEST_CASE("2-torus lattice at delta 1/16 has 256 points") {
  const SampledSpace s = sample_grid(System::torus({1, 0, 0, 1}, 2), 1.0 / 16.0);
  CHECK(s.size() == 256);
  CHECK(s.dim() == 2);
}

TEST_CASE("2-shift truncated at depth 3 has 8 representatives") {
  GridOptions g;
  g.truncation = 3;
  const SampledSpace s = sample_grid(System::full_shift(2), 0.0, g);
  // oracle: enumerate {0,1}^3
  CHECK(s.size() == 8);
  CHECK(s.dim() == 3);
  for (std::size_t i = 0; i < 8; ++i) {
    const StateView w = s.point(i);
    std::size_t val = 0;
    for (std::size_t j = 0; j < 3; ++j) val = val * 2 + std::size_t(w[j]);
    CHECK(val == i);  // lexicographic lattice order
  }
}

TEST_CASE("resource guard names the required count") {
  GridOptions g;
  g.max_points = 100;
  CHECK_THROWS_AS(sample_grid(System::torus({1, 0, 0, 1}, 2), 1.0 / 64.0, g),
                  ResourceError);
}

TEST_CASE("locate wraps and rounds on the torus lattice") {
  const SampledSpace s = sample_grid(System::torus({1}, 1), 1.0 / 8.0);
  CHECK(s.locate(State{0.0}) == 0);
  CHECK(s.locate(State{0.26}) == 2);
  CHECK(s.locate(State{0.99}) == 0);  // wraps to the origin
}

TEST_CASE("discretized dynamics is exact on lattice-closed systems") {
  const System doubling = System::torus({2}, 1);
  const SampledSpace s = sample_grid(doubling, 1.0 / 64.0);
  const DiscreteMap map = discretize(s, doubling);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double image = s.point(map.next[i])[0];
    const double exact = std::fmod(2.0 * s.point(i)[0], 1.0);
    CHECK(image == doctest::Approx(exact).epsilon(1e-12));
  }
}

TEST_CASE("orbit table matches repeated stepping") {
  const System cat = System::torus({2, 1, 1, 1}, 2);
  const SampledSpace s = sample_grid(cat, 1.0 / 16.0);
  const OrbitTable table(s, cat, 4);
  for (std::size_t i = 0; i < s.size(); i += 37) {
    State cur = to_state(s.point(i));
    for (std::size_t j = 0; j < 4; ++j) {
      const StateView row = table.at(i, j);
      for (std::size_t c = 0; c < 2; ++c) CHECK(row[c] == doctest::Approx(cur[c]));
      cur = cat.step(cur);
    }
  }
}

TEST_CASE("real-shift grid samples deeper coordinates more coarsely") {
  // coordinate j carries weight 1/j, so its lattice may be j times coarser
  const SampledSpace s = sample_grid(System::real_shift(), 0.34);
  CHECK(s.dim() == truncation_depth(0.34, DepthMode::Spanning));
  CHECK(s.dim() == 2);
  CHECK(s.size() == 12);  // 4 x 3 per-coordinate lattices
  const Metric d = s.metric();
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      CHECK(d(s.point(i), s.point(j)) <= d.diameter() + 1e-12);
}

TEST_CASE("continuum interval refuses point queries") {
  const SampledSpace s = SampledSpace::continuum_interval(1.0, metrics::window(1.0));
  CHECK(s.size() == 0);
  CHECK_THROWS_AS(s.locate(State{0.0}), UsageError);
}

TEST_SUITE_END();
