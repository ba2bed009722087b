#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "entlab/bowen.hpp"
#include "entlab/verify.hpp"

using namespace entlab;

namespace {

// independent oracle: enumerate every subset of a small space and keep the
// largest pairwise-separated one, distances straight from IteratedMetric
std::size_t brute_force_max_separated(const SampledSpace& space, const System& system,
                                      std::size_t n, double eps) {
  REQUIRE(space.size() <= 14);
  IteratedMetric dn(space.metric(), system, n);
  const std::size_t m = space.size();
  std::size_t best = 0;
  for (std::size_t mask = 1; mask < (std::size_t(1) << m); ++mask) {
    bool ok = true;
    for (std::size_t i = 0; i < m && ok; ++i) {
      if (!(mask & (std::size_t(1) << i))) continue;
      for (std::size_t j = i + 1; j < m && ok; ++j) {
        if (!(mask & (std::size_t(1) << j))) continue;
        if (!(dn.eval(space.point(i), space.point(j)) > eps)) ok = false;
      }
    }
    if (ok) best = std::max(best, std::size_t(__builtin_popcountll(mask)));
  }
  return best;
}

SampledSpace shift_space(std::size_t alphabet, std::size_t truncation) {
  GridOptions g;
  g.truncation = truncation;
  return sample_grid(System::full_shift(alphabet), 0.0, g);
}

}  // namespace

TEST_SUITE_BEGIN("bowen");

TEST_CASE("separated sets on the full 2-shift match the cylinder closed form") {
  const System shift = System::full_shift(2);
  const SampledSpace space = shift_space(2, 10);
  // closed form: s(n, eps) = m^(n+k-1) with k = truncation_depth(eps)
  const std::size_t k = truncation_depth(0.4, DepthMode::Separation);
  REQUIRE(k == 2);
  for (std::size_t n = 1; n <= 5; ++n) {
    const unsigned long long expected = 1ull << (n + k - 1);
    const PackingResult closed = max_separated(space, shift, n, 0.4);
    CHECK(closed.count == expected);
    CHECK(closed.method == PackMethod::Exact);
    CHECK(closed.algorithm == "cylinder");
    CHECK(closed.selected.size() == expected);

    PackOptions scan;
    scan.force_scan = true;
    const PackingResult greedy = max_separated(space, shift, n, 0.4, scan);
    CHECK(greedy.count == expected);
  }
  CHECK(max_separated(space, shift, 5, 0.4).count == 64);
}

TEST_CASE("identity system separates everything below the minimum gap") {
  RandomInstance inst = random_point_system(5, 10);
  double min_gap = 1.0;
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = i + 1; j < 10; ++j)
      min_gap = std::min(min_gap, inst.space.metric()(inst.space.point(i),
                                                      inst.space.point(j)));
  const System id = System::identity(2);
  const PackingResult r = max_separated(inst.space, id, 3, min_gap * 0.5);
  CHECK(r.count == 10);
}

TEST_CASE("single fixed point stays a single point") {
  const std::vector<State> pts = {{0.3, 0.3}};
  const SampledSpace space =
      SampledSpace::explicit_points(pts, metrics::euclidean_capped(1.0), 0.1);
  const System fix = System::tabulated(pts, {0});
  for (std::size_t n : {1ul, 4ul})
    CHECK(max_separated(space, fix, n, 0.2).count == 1);
}

TEST_CASE("exact mode agrees with subset enumeration") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    RandomInstance inst = random_point_system(seed, 11);
    for (double eps : {0.2, 0.35}) {
      for (std::size_t n = 1; n <= 3; ++n) {
        PackOptions exact;
        exact.mode = PackMethod::Exact;
        const PackingResult r = max_separated(inst.space, inst.system, n, eps, exact);
        CHECK(r.count == brute_force_max_separated(inst.space, inst.system, n, eps));
        // greedy is maximal, never larger than the maximum
        const PackingResult g = max_separated(inst.space, inst.system, n, eps);
        CHECK(g.count <= r.count);
        CHECK(g.count >= 1);
      }
    }
  }
}

TEST_CASE("exact mode has a size guard") {
  const SampledSpace space = shift_space(2, 5);
  PackOptions exact;
  exact.mode = PackMethod::Exact;
  exact.force_scan = true;
  CHECK_THROWS_AS(max_separated(space, System::full_shift(2), 1, 0.4, exact),
                  ResourceError);
}

TEST_CASE("spanning counts") {
  const System shift = System::full_shift(2);
  const SampledSpace space = shift_space(2, 10);
  // balls at radius 0.4 are depth-(n+1) cylinders
  for (std::size_t n = 1; n <= 5; ++n)
    CHECK(min_spanning(space, shift, n, 0.4).count == (1ull << (n + 1)));

  // eps above the diameter needs a single ball
  RandomInstance inst = random_point_system(9, 12);
  CHECK(min_spanning(inst.space, inst.system, 2, 1.5).count == 1);

  // identity on the circle lattice: an eps-net of expected arithmetic size
  const System circle = System::torus({1}, 1);
  const SampledSpace lattice = sample_grid(circle, 1.0 / 256.0);
  for (double eps : {0.05, 0.1, 0.2}) {
    const PackingResult net = min_spanning(lattice, System::identity(1), 1, eps);
    const double expected = std::ceil(1.0 / (2.0 * eps));
    CHECK(std::abs(double(net.count) - expected) <= 1.0);
  }
}

TEST_CASE("sandwich chain on the 2-shift, fixture from the runtime oracle") {
  const SampledSpace space = shift_space(2, 14);
  const System shift = System::full_shift(2);
  const SandwichReport rep = sandwich_check(space, shift, 4, 0.4);
  CHECK(rep.holds);
  // spanning depth at 0.4 is 2, separation depth 2, spanning depth at 0.2 is 5
  CHECK(rep.cover_at_eps == 32);       // 2^(4+2-1)
  CHECK(rep.separated == 32);          // 2^(4+2-1)
  CHECK(rep.cover_at_half_eps == 256); // 2^(4+5-1)
}

TEST_CASE("sandwich chain on random instances") {
  for (std::uint64_t seed = 100; seed < 112; ++seed) {
    RandomInstance inst = random_point_system(seed, 12);
    for (double eps : {0.15, 0.3}) {
      const SandwichReport rep = sandwich_check(inst.space, inst.system, 3, eps);
      CHECK(rep.holds);
      CHECK(rep.cover_at_eps <= rep.separated);
      CHECK(rep.separated <= rep.cover_at_half_eps);
    }
  }
}

TEST_CASE("estimator on the 2-shift reaches log 2") {
  const SampledSpace space = shift_space(2, 14);
  std::vector<std::size_t> ns;
  for (std::size_t n = 1; n <= 12; ++n) ns.push_back(n);
  const EntropyEstimate est =
      bowen_entropy_estimate(space, System::full_shift(2), {0.4}, ns, {});
  CHECK(est.estimate == doctest::Approx(std::log(2.0)).epsilon(0.03));
  CHECK(est.per_eps[0].sandwich_recorded);
}

TEST_CASE("estimator on the identity reports zero with a saturated flag") {
  const SampledSpace lattice = sample_grid(System::torus({1}, 1), 1.0 / 128.0);
  const EntropyEstimate est = bowen_entropy_estimate(
      lattice, System::identity(1), {0.1}, {1, 2, 3, 4, 5, 6}, {});
  CHECK(est.estimate == 0.0);
  CHECK(est.per_eps[0].saturated);
}

TEST_CASE("estimator on the doubling map lattice") {
  const System doubling = System::torus({2}, 1);
  const SampledSpace lattice = sample_grid(doubling, 1.0 / 4096.0);
  std::vector<std::size_t> ns;
  for (std::size_t n = 1; n <= 10; ++n) ns.push_back(n);
  const EntropyEstimate est = bowen_entropy_estimate(lattice, doubling, {0.05}, ns, {});
  CHECK(est.estimate == doctest::Approx(std::log(2.0)).epsilon(0.10));
}

TEST_CASE("estimator validates its grid") {
  const SampledSpace space = shift_space(2, 8);
  CHECK_THROWS_AS(
      bowen_entropy_estimate(space, System::full_shift(2), {0.4}, {1, 2, 3}, {}),
      RangeError);
  CHECK_THROWS_AS(
      bowen_entropy_estimate(space, System::full_shift(2), {1.7}, {1, 2, 3, 4}, {}),
      RangeError);
}

TEST_CASE("interval closed form against a fine grid") {
  const System window_map = System::linear({2.0}, 1, LinearMetric::Window, 1.0);
  const SampledSpace continuum =
      SampledSpace::continuum_interval(1.0, window_map.canonical_metric());
  // greedy packing on a very fine lattice approaches the continuum count
  const SampledSpace grid = sample_grid(window_map, 1.0 / 8192.0);
  for (std::size_t n = 1; n <= 4; ++n) {
    const unsigned long long closed =
        max_separated(continuum, window_map, n, 0.25).count;
    const unsigned long long greedy = max_separated(grid, window_map, n, 0.25).count;
    CHECK(double(greedy) == doctest::Approx(double(closed)).epsilon(0.02));
  }
  // growth factor per step is |a|
  const unsigned long long s3 = max_separated(continuum, window_map, 3, 0.25).count;
  const unsigned long long s4 = max_separated(continuum, window_map, 4, 0.25).count;
  CHECK(double(s4) / double(s3) == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("per-eps rates on shifts are nonincreasing and the estimate is their max") {
  const SampledSpace space = shift_space(2, 16);
  std::vector<std::size_t> ns;
  for (std::size_t n = 1; n <= 10; ++n) ns.push_back(n);
  const EntropyEstimate est = bowen_entropy_estimate(
      space, System::full_shift(2), {0.2, 0.4, 0.6, 0.9}, ns, {});
  double max_rate = 0.0;
  for (std::size_t e = 1; e < est.per_eps.size(); ++e)
    CHECK(est.per_eps[e].rate_window <= est.per_eps[e - 1].rate_window + 1e-12);
  for (const auto& r : est.per_eps) max_rate = std::max(max_rate, r.rate_window);
  CHECK(est.estimate == max_rate);
}

TEST_CASE("grid csv has the documented column order") {
  const SampledSpace space = shift_space(2, 8);
  const EntropyEstimate est = bowen_entropy_estimate(space, System::full_shift(2), {0.4},
                                                     {1, 2, 3, 4}, {});
  std::ostringstream os;
  write_grid_csv(os, est);
  const std::string text = os.str();
  CHECK(text.rfind("system,metric,eps,n,count,method,log_count,rate_window\n", 0) == 0);
  CHECK(text.find("full_shift:m=2") != std::string::npos);
  CHECK(text.find("cylinder") == std::string::npos);  // method column says exact|greedy
}

TEST_SUITE_END();
