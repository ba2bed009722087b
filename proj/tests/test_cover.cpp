#include "doctest.h"

#include <algorithm>
#include <random>

#include "entlab/cover.hpp"
#include "entlab/measure.hpp"
#include "entlab/system.hpp"

using namespace entlab;

namespace {

// independent oracle: scan every subfamily
std::size_t brute_force_min_subcover(const Cover& a) {
  const std::size_t k = a.size();
  REQUIRE(k <= 16);
  std::size_t best = k;
  for (std::size_t mask = 1; mask < (std::size_t(1) << k); ++mask) {
    std::vector<std::uint8_t> hit(a.ground_size(), 0);
    for (std::size_t m = 0; m < k; ++m)
      if (mask & (std::size_t(1) << m))
        for (auto v : a.member(m)) hit[v] = 1;
    if (std::all_of(hit.begin(), hit.end(), [](std::uint8_t h) { return h != 0; }))
      best = std::min(best, std::size_t(__builtin_popcountll(mask)));
  }
  return best;
}

}  // namespace

TEST_SUITE_BEGIN("cover");

TEST_CASE("join against enumerated intersections") {
  const Cover a = Cover::from_members(3, {MemberSet{0, 1}, MemberSet{1, 2}});
  const Cover b = Cover::from_members(3, {MemberSet{0}, MemberSet{1, 2}});
  const Cover j = join(a, b);
  const Cover expected =
      Cover::from_members(3, {MemberSet{0}, MemberSet{1}, MemberSet{1, 2}});
  CHECK(j == expected);

  // {X} join B = B
  const Cover whole = Cover::whole_space(3);
  CHECK(join(whole, b) == b);

  // join(A, A) is equivalent to A in the refinement preorder (cross
  // intersections may appear as subset members) and has the same N
  const Cover aa = join(a, a);
  CHECK(refines(aa, a));
  CHECK(refines(a, aa));
  CHECK(min_subcover_cardinality(aa).value() == min_subcover_cardinality(a).value());

  // for partitions the join is literally idempotent
  const Cover part = Cover::from_members(3, {MemberSet{0}, MemberSet{1, 2}});
  CHECK(join(part, part) == part);
}

TEST_CASE("refinement preorder") {
  const Cover a = Cover::from_members(3, {MemberSet{0, 1}, MemberSet{1, 2}});
  const Cover b = Cover::from_members(3, {MemberSet{0}, MemberSet{1, 2}});
  CHECK(refines(join(a, b), a));
  CHECK(refines(join(a, b), b));
  CHECK(refines(Cover::singletons(3), a));
  CHECK(!refines(Cover::whole_space(3), a));
  // a cover containing X is refined by {X}
  const Cover with_whole = Cover::from_members(3, {MemberSet{0, 1, 2}, MemberSet{0}});
  CHECK(refines(Cover::whole_space(3), with_whole));
}

TEST_CASE("cover validation") {
  CHECK_THROWS_AS(Cover::from_members(3, {MemberSet{0, 1}}), CoverageError);
  CHECK_THROWS_AS(Cover::from_members(2, {MemberSet{0, 5}}), ValidationError);
  CHECK_THROWS_AS(join(Cover::whole_space(2), Cover::whole_space(3)), ValidationError);
}

TEST_CASE("minimal subcover examples") {
  const Cover a = Cover::from_members(
      3, {MemberSet{0, 1}, MemberSet{1, 2}, MemberSet{2}, MemberSet{0}});
  const SubcoverCount c = min_subcover_cardinality(a);
  CHECK(c.exact);
  CHECK(c.value() == 2);
  CHECK(c.value() == brute_force_min_subcover(a));

  const Cover with_whole = Cover::from_members(4, {MemberSet{0, 1, 2, 3}, MemberSet{1}});
  CHECK(min_subcover_cardinality(with_whole).value() == 1);

  // a partition of size k admits no smaller subcover, at any size
  std::vector<MemberSet> cells;
  for (std::uint32_t i = 0; i < 40; ++i) cells.push_back({i});
  const SubcoverCount part = min_subcover_cardinality(Cover::from_members(40, cells));
  CHECK(part.exact);
  CHECK(part.value() == 40);
}

TEST_CASE("minimal subcover matches brute force on random instances") {
  std::mt19937_64 rng(424242);
  std::uniform_int_distribution<std::size_t> ground(4, 9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t m = ground(rng);
    std::vector<MemberSet> members(5);
    std::vector<std::uint8_t> hit(m, 0);
    for (auto& set : members)
      for (std::size_t v = 0; v < m; ++v)
        if (u(rng) < 0.5) {
          set.push_back(std::uint32_t(v));
          hit[v] = 1;
        }
    MemberSet patch;
    for (std::size_t v = 0; v < m; ++v)
      if (!hit[v]) patch.push_back(std::uint32_t(v));
    if (!patch.empty()) members.push_back(patch);
    const Cover a = Cover::from_members(m, members);
    const SubcoverCount c = min_subcover_cardinality(a);
    CHECK(c.exact);
    CHECK(c.value() == brute_force_min_subcover(a));
  }
}

TEST_CASE("restricted subcover names uncovered elements") {
  const Cover a = Cover::from_members(3, {MemberSet{0}, MemberSet{1, 2}});
  const SubcoverCount c = min_subcover_cardinality(a, MemberSet{1});
  CHECK(c.value() == 1);
  // restriction to an element covered by nothing is impossible here since a
  // cover spans the ground set, so corrupt one by restricting a sub-cover
  const Cover partial = Cover::from_members(3, {MemberSet{0, 1, 2}});
  CHECK(min_subcover_cardinality(partial, MemberSet{0, 2}).value() == 1);
}

TEST_CASE("iterate_cover on the doubling map produces dyadic arcs") {
  const System doubling = System::torus({2}, 1);
  const SampledSpace space = sample_grid(doubling, 1.0 / 64.0);
  const DiscreteMap map = discretize(space, doubling);
  std::vector<MemberSet> halves(2);
  for (std::size_t i = 0; i < space.size(); ++i)
    halves[space.point(i)[0] < 0.5 ? 0 : 1].push_back(std::uint32_t(i));
  const Cover a = Cover::from_members(space.size(), std::move(halves));

  CHECK(iterate_cover(a, map, 1) == a);

  // oracle: explicit preimage enumeration of the quarter arcs
  const Cover a2 = iterate_cover(a, map, 2);
  CHECK(a2.size() == 4);
  std::vector<MemberSet> quarters(4);
  for (std::size_t i = 0; i < space.size(); ++i) {
    const double x = space.point(i)[0];
    quarters[std::size_t(x * 4.0)].push_back(std::uint32_t(i));
  }
  CHECK(a2 == Cover::from_members(space.size(), std::move(quarters)));

  // identity dynamics leaves any cover alone
  const DiscreteMap id_map = discretize(space, System::identity(1));
  CHECK(iterate_cover(a, id_map, 5) == a);
  CHECK_THROWS_AS(iterate_cover(a, map, 0), RangeError);
}

TEST_CASE("admissibility through provenance and compact complements") {
  // fully compact sampled space: every cover is admissible
  const SampledSpace circle = sample_grid(System::torus({1}, 1), 0.125);
  const Cover any = Cover::whole_space(circle.size());
  CHECK(is_admissible(any, circle));

  // line stand-in: member with complement inside the core is admissible
  std::vector<State> pts;
  std::vector<std::uint8_t> core;
  for (int i = -8; i <= 8; ++i) {
    pts.push_back({double(i)});
    core.push_back(std::abs(i) <= 5 ? 1 : 0);
  }
  const SampledSpace line = SampledSpace::explicit_points(
      pts, metrics::window(1.0), 0.5, core);
  MemberSet tail, middle;
  for (std::size_t i = 0; i < pts.size(); ++i)
    (std::abs(pts[i][0]) > 5.0 ? tail : middle).push_back(std::uint32_t(i));
  const Cover admissible = Cover::from_members(pts.size(), {tail, middle});
  CHECK(is_admissible(admissible, line));

  // balls of radius 1/2 on a (0,1) stand-in never have compact complement;
  // dyadic lattice positions (2i-1)/32 keep the arithmetic exact and avoid
  // the degenerate midpoint center whose ball is the whole space
  std::vector<State> unit;
  std::vector<std::uint8_t> unit_core;
  const std::size_t m = 16;
  for (std::size_t i = 1; i <= m; ++i) {
    const double x = (2.0 * double(i) - 1.0) / 32.0;
    unit.push_back({x});
    unit_core.push_back(x > 0.15 && x < 0.85 ? 1 : 0);
  }
  const SampledSpace interval = SampledSpace::explicit_points(
      unit, metrics::window(1.0), 1.0 / double(m), unit_core);
  const Metric d = interval.metric();
  const Cover balls = Cover::balls(
      m, [&](std::size_t i, std::size_t j) { return d(interval.point(i), interval.point(j)); },
      0.5);
  CHECK(!is_admissible(balls, interval));

  // an iterate of a pre-admissible cover stays admissible by provenance
  const Cover marked = Cover::from_members(pts.size(), {tail, middle}, true);
  DiscreteMap shift_map;
  shift_map.next.assign(pts.size(), 0);
  const Cover iterated = iterate_cover(marked, shift_map, 3);
  CHECK(iterated.from_pre_admissible());
  CHECK(is_admissible(iterated, line));
}

TEST_CASE("cover entropy rates") {
  const System doubling = System::torus({2}, 1);
  const SampledSpace space = sample_grid(doubling, 1.0 / 1024.0);
  const DiscreteMap map = discretize(space, doubling);
  std::vector<MemberSet> halves(2);
  for (std::size_t i = 0; i < space.size(); ++i)
    halves[space.point(i)[0] < 0.5 ? 0 : 1].push_back(std::uint32_t(i));
  const Cover arcs = Cover::from_members(space.size(), std::move(halves), true);

  const CoverEntropyReport doubling_report = cover_entropy_rate(arcs, map, 10, true);
  CHECK(doubling_report.all_exact);
  // oracle: exact preimage-arc counting gives N(A^n) = 2^n
  for (std::size_t i = 0; i < doubling_report.n.size(); ++i)
    CHECK(doubling_report.counts[i].value() ==
          (unsigned long long)(1) << doubling_report.n[i]);
  CHECK(doubling_report.rate_nats ==
        doctest::Approx(std::log(2.0)).epsilon(0.05));

  const DiscreteMap id_map = discretize(space, System::identity(1));
  const CoverEntropyReport id_report = cover_entropy_rate(arcs, id_map, 6);
  CHECK(id_report.rate_nats == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("cover json round-trip") {
  const Cover a = Cover::from_members(4, {MemberSet{0, 1}, MemberSet{2, 3}, MemberSet{1, 2}});
  CHECK(cover_from_json(cover_to_json(a)) == a);
  CHECK_THROWS_AS(cover_from_json("{\"members\": [[0]]}"), ValidationError);
  CHECK_THROWS_AS(cover_from_json("{\"ground_size\": 3, \"members\": [[0,1]]}"),
                  CoverageError);
}

TEST_SUITE_END();
