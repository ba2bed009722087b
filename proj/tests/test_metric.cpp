#include "doctest.h"

#include <cmath>
#include <random>

#include "entlab/metric.hpp"
#include "entlab/space.hpp"
#include "entlab/system.hpp"

using namespace entlab;

TEST_SUITE_BEGIN("metric");

TEST_CASE("product metric on binary sequences") {
  const Metric d = metrics::sequence(SequenceCoord::Discrete);

  // differ exactly at coordinates 2 and 5 (1-based): sup(1/2, 1/5) = 1/2
  const State x{0, 0, 0, 0, 0, 0};
  const State y{0, 1, 0, 0, 1, 0};
  CHECK(d(x, y) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(d(x, x) == 0.0);

  const auto with_bound = d.eval_with_bound(x, y);
  CHECK(with_bound.value == doctest::Approx(0.5));
  CHECK(with_bound.tail_bound == doctest::Approx(1.0 / 7.0));
}

TEST_CASE("capped-abs sequence metric") {
  const Metric d = metrics::sequence(SequenceCoord::CappedAbs);
  // x = (1,0,...), y = (0,0,...): per-coordinate scan gives min(1,1)/1 = 1
  const State x{1, 0, 0};
  const State y{0, 0, 0};
  double best = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j)
    best = std::max(best, std::min(std::abs(x[j] - y[j]), 1.0) / double(j + 1));
  CHECK(d(x, y) == doctest::Approx(best));
  CHECK(d(x, y) == doctest::Approx(1.0));
}

TEST_CASE("mismatched lengths raise a dimension error") {
  const Metric d = metrics::sequence(SequenceCoord::Discrete);
  CHECK_THROWS_AS(d(State{0, 1}, State{0, 1, 0}), DimensionError);
}

TEST_CASE("factor product rejects oversized factors") {
  CHECK_THROWS_AS(metrics::factor_product({metrics::window(2.0)}, {1}), ValidationError);
}

TEST_CASE("truncation depth boundaries") {
  CHECK(truncation_depth(0.4, DepthMode::Separation) == 2);
  CHECK(truncation_depth(0.1, DepthMode::Separation) == 9);
  CHECK(truncation_depth(0.1, DepthMode::Spanning) == 10);
  CHECK(truncation_depth(1.0, DepthMode::Spanning) == 1);
  CHECK(truncation_depth(1.0, DepthMode::Separation) == 0);
  CHECK_THROWS_AS(truncation_depth(0.0, DepthMode::Separation), RangeError);
  CHECK_THROWS_AS(truncation_depth(1.5, DepthMode::Spanning), RangeError);

  // geometric weights: 2^-j
  CHECK(truncation_depth(0.3, DepthMode::Separation, WeightScheme::Geometric) == 1);
  CHECK(truncation_depth(0.25, DepthMode::Spanning, WeightScheme::Geometric) == 2);
  CHECK(truncation_depth(0.25, DepthMode::Separation, WeightScheme::Geometric) == 1);
}

TEST_CASE("truncation exactness: counts agree with and without tail coordinates") {
  // separation decisions at radius eps only read coordinates up to
  // truncation_depth(eps) + n - 1, so deeper truncations change nothing
  const System shift = System::full_shift(2);
  const double eps = 0.4;
  for (std::size_t n = 1; n <= 6; ++n) {
    const std::size_t needed = truncation_depth(eps, DepthMode::Separation) + n - 1;
    GridOptions shallow, deep;
    shallow.truncation = needed;
    deep.truncation = needed + 3;
    const SampledSpace a = sample_grid(shift, 0.0, shallow);
    const SampledSpace b = sample_grid(shift, 0.0, deep);

    // greedy scans over both grids, no closed forms involved
    std::vector<std::uint32_t> sa, sb;
    {
      IteratedMetric da(a.metric(), shift, n);
      for (std::size_t i = 0; i < a.size(); ++i) {
        bool ok = true;
        for (auto s : sa)
          if (!(da.eval(a.point(i), a.point(s)) > eps)) {
            ok = false;
            break;
          }
        if (ok) sa.push_back(std::uint32_t(i));
      }
      IteratedMetric db(b.metric(), shift, n);
      for (std::size_t i = 0; i < b.size(); ++i) {
        bool ok = true;
        for (auto s : sb)
          if (!(db.eval(b.point(i), b.point(s)) > eps)) {
            ok = false;
            break;
          }
        if (ok) sb.push_back(std::uint32_t(i));
      }
    }
    CHECK(sa.size() == sb.size());
  }
}

TEST_CASE("iterated metric on the 2-shift") {
  const System shift = System::full_shift(2);
  const Metric base = metrics::sequence(SequenceCoord::Discrete);

  const State x{0, 1, 1, 1};
  const State y{0, 0, 0, 0};
  IteratedMetric d1(base, shift, 1);
  CHECK(d1.eval(x, y) == doctest::Approx(0.5));  // first difference at coordinate 2

  IteratedMetric d2(base, shift, 2);
  CHECK(d2.eval(x, y) == doctest::Approx(1.0));  // shifted words differ at coordinate 1
  CHECK(d2.exceeds(x, y, 0.9));
  CHECK(!d1.exceeds(x, y, 0.9));
}

TEST_CASE("iterated metric under the identity is the base metric") {
  const System id = System::identity(2);
  const Metric base = metrics::window(1.0);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const State x{u(rng), u(rng)};
    const State y{u(rng), u(rng)};
    for (std::size_t n : {1ul, 3ul, 7ul}) {
      IteratedMetric dn(base, id, n);
      CHECK(dn.eval(x, y) == doctest::Approx(base(x, y)));
    }
  }
}

TEST_CASE("metric axioms on sampled triples") {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Metric> metrics_to_check = {
      metrics::sequence(SequenceCoord::Discrete),
      metrics::sequence(SequenceCoord::CappedAbs),
      metrics::sequence(SequenceCoord::Arctan),
      metrics::torus_sup(),
      metrics::window(1.0),
      metrics::arctan_line(),
  };
  for (const auto& d : metrics_to_check) {
    const std::size_t dim = d.name() == "arctan" ? 1 : 4;
    for (int trial = 0; trial < 200; ++trial) {
      State x(dim), y(dim), z(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        x[i] = d.name() == "seq_discrete_1/j" ? std::floor(2.0 * u(rng)) : u(rng);
        y[i] = d.name() == "seq_discrete_1/j" ? std::floor(2.0 * u(rng)) : u(rng);
        z[i] = d.name() == "seq_discrete_1/j" ? std::floor(2.0 * u(rng)) : u(rng);
      }
      const double dxy = d(x, y), dyx = d(y, x), dxx = d(x, x);
      const double dxz = d(x, z), dzy = d(z, y);
      CHECK(dxy == dyx);
      CHECK(dxx == 0.0);
      CHECK(dxy <= dxz + dzy + 1e-12 * std::max(1.0, dxy));
      CHECK(dxy <= d.diameter() + 1e-12);
    }
  }
}

TEST_CASE("iterated metric is monotone in the horizon") {
  const System doubling = System::torus({2}, 1);
  const Metric base = metrics::torus_sup();
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const State x{u(rng)}, y{u(rng)};
    double prev = 0.0;
    for (std::size_t n = 1; n <= 6; ++n) {
      IteratedMetric dn(base, doubling, n);
      const double v = dn.eval(x, y);
      CHECK(v >= prev - 1e-15);
      prev = v;
    }
  }
}

TEST_CASE("product metric dominates every weighted factor") {
  const Metric d = metrics::sequence(SequenceCoord::CappedAbs);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    State x(6), y(6);
    for (std::size_t i = 0; i < 6; ++i) {
      x[i] = u(rng);
      y[i] = u(rng);
    }
    const double v = d(x, y);
    for (std::size_t j = 0; j < 6; ++j)
      CHECK(v >= std::min(std::abs(x[j] - y[j]), 1.0) / double(j + 1) - 1e-15);
  }
}

TEST_SUITE_END();
