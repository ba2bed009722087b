#include "entlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "entlab/bowen.hpp"
#include "entlab/cover.hpp"
#include "entlab/endomorphism.hpp"
#include "entlab/experiment.hpp"
#include "entlab/measure.hpp"

namespace entlab {

bool VerifyReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.pass; });
}

std::size_t VerifyReport::failures() const {
  std::size_t f = 0;
  for (const auto& c : checks) f += !c.pass;
  return f;
}

RandomInstance random_point_system(std::uint64_t seed, std::size_t points) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(0.0, 1.0);
  std::vector<State> pts;
  pts.reserve(points);
  for (std::size_t i = 0; i < points; ++i) pts.push_back({coord(rng), coord(rng)});
  std::uniform_int_distribution<std::uint32_t> pick(0, std::uint32_t(points - 1));
  std::vector<std::uint32_t> image(points);
  for (auto& v : image) v = pick(rng);
  std::vector<State> copy = pts;
  return {SampledSpace::explicit_points(std::move(pts), metrics::euclidean_capped(1.0),
                                        0.01),
          System::tabulated(std::move(copy), std::move(image))};
}

namespace {

constexpr double kLn2 = 0.6931471805599453;

struct Checker {
  VerifyReport report;
  std::string suite;

  void run(const std::string& name, const std::function<std::string()>& body) {
    CheckResult r;
    r.suite = suite;
    r.name = name;
    try {
      r.detail = body();  // empty detail means pass with nothing to add
      r.pass = true;
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = e.what();
    }
    report.checks.push_back(std::move(r));
  }
};

void expect(bool condition, const std::string& message) {
  if (!condition) throw Error(message);
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// random cover of {0..m-1} with `members` parts, each element kept with the
// given probability; leftovers go into one patch member
Cover random_cover(std::mt19937_64& rng, std::size_t ground, std::size_t members) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<MemberSet> sets(members);
  std::vector<std::uint8_t> hit(ground, 0);
  for (std::size_t k = 0; k < members; ++k)
    for (std::size_t v = 0; v < ground; ++v)
      if (u(rng) < 0.45) {
        sets[k].push_back(std::uint32_t(v));
        hit[v] = 1;
      }
  MemberSet patch;
  for (std::size_t v = 0; v < ground; ++v)
    if (!hit[v]) patch.push_back(std::uint32_t(v));
  if (!patch.empty()) sets.push_back(std::move(patch));
  return Cover::from_members(ground, std::move(sets));
}

DiscreteMap random_map(std::mt19937_64& rng, std::size_t ground) {
  std::uniform_int_distribution<std::uint32_t> pick(0, std::uint32_t(ground - 1));
  DiscreteMap map;
  map.next.resize(ground);
  for (auto& v : map.next) v = pick(rng);
  return map;
}

DiscreteMap compose(const DiscreteMap& map, std::size_t k) {
  DiscreteMap out;
  out.next.resize(map.next.size());
  for (std::size_t i = 0; i < map.next.size(); ++i) out.next[i] = map.orbit(std::uint32_t(i), k);
  return out;
}

// ---------------------------------------------------------------------------

void covers_suite(Checker& ck, std::uint64_t seed, const VerifyOptions& options) {
  ck.run("subadditivity", [&] {
    std::mt19937_64 rng(seed * 7919 + 1);
    std::uniform_int_distribution<std::size_t> ground(6, 12);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t m = ground(rng);
      const Cover a = random_cover(rng, m, 4);
      const Cover b = random_cover(rng, m, 4);
      const SubcoverCount na = min_subcover_cardinality(a);
      const SubcoverCount nb = min_subcover_cardinality(b);
      const SubcoverCount nj = min_subcover_cardinality(join(a, b));
      expect(na.exact && nb.exact && nj.exact, "non-exact count on a small instance");
      expect(nj.value() <= na.value() * nb.value(),
             "N(A v B) > N(A) N(B) on trial " + std::to_string(trial));
    }
    return "100 random pairs";
  });

  ck.run("refinement-monotonicity", [&] {
    std::mt19937_64 rng(seed * 7919 + 2);
    std::uniform_int_distribution<std::size_t> ground(6, 10);
    std::uniform_int_distribution<std::size_t> nn(1, 4);
    for (int trial = 0; trial < 40; ++trial) {
      const std::size_t m = ground(rng);
      const Cover a = random_cover(rng, m, 4);
      // B coarsens A: members are unions of A's members, so B precedes A
      std::vector<MemberSet> grouped(2);
      for (std::size_t k = 0; k < a.size(); ++k) {
        MemberSet u = grouped[k % 2];
        u.insert(u.end(), a.member(k).begin(), a.member(k).end());
        grouped[k % 2] = normalized_member(std::move(u));
      }
      const Cover b = Cover::from_members(m, std::move(grouped));
      const DiscreteMap map = random_map(rng, m);
      const std::size_t n = nn(rng);
      const Cover an = iterate_cover(a, map, n);
      const Cover bn = iterate_cover(b, map, n);
      expect(refines(an, bn), "B^n does not precede A^n");
      MemberSet y;
      std::uniform_real_distribution<double> u01(0.0, 1.0);
      for (std::size_t v = 0; v < m; ++v)
        if (u01(rng) < 0.6) y.push_back(std::uint32_t(v));
      if (y.empty()) y.push_back(0);
      const SubcoverCount cb = min_subcover_cardinality(bn, y);
      const SubcoverCount ca = min_subcover_cardinality(an, y);
      expect(cb.exact && ca.exact, "non-exact restricted count");
      expect(cb.value() <= ca.value(), "N_Y(B^n) > N_Y(A^n)");
    }
    return "40 seeded coarsenings, n <= 4";
  });

  ck.run("iterated-system-law", [&] {
    const System doubling = System::torus({2}, 1);
    const SampledSpace space = sample_grid(doubling, 1.0 / 32.0);
    const DiscreteMap map = discretize(space, doubling);
    std::vector<MemberSet> halves(2);
    for (std::size_t i = 0; i < space.size(); ++i)
      halves[space.point(i)[0] < 0.5 ? 0 : 1].push_back(std::uint32_t(i));
    const Cover a = Cover::from_members(space.size(), std::move(halves));
    for (std::size_t k : {2ul, 3ul}) {
      const Cover ak = iterate_cover(a, map, k);
      const DiscreteMap mapk = compose(map, k);
      for (std::size_t n : {2ul, 3ul}) {
        const Cover lhs = iterate_cover(ak, mapk, n);
        const Cover rhs = iterate_cover(a, map, k * n);
        expect(lhs == rhs, "(A^k)_{T^k}^n != A_T^{kn} at k=" + std::to_string(k) +
                               ", n=" + std::to_string(n));
      }
    }
    return "doubling map, k in {2,3}, n in {2,3}";
  });

  ck.run("lebesgue", [&] {
    const System circle = System::torus({1}, 1);  // identity rotation lattice
    const SampledSpace space = sample_grid(circle, 1.0 / 64.0);
    const Metric metric = space.metric();

    const Cover whole = Cover::whole_space(space.size());
    expect(lebesgue_number(whole, space, metric) == metric.diameter(),
           "whole-space cover should admit the diameter");

    // two overlapping arcs with overlap width 8/64 on each side
    std::vector<MemberSet> arcs(2);
    for (std::size_t i = 0; i < space.size(); ++i) {
      const double x = space.point(i)[0];
      if (x < 0.5 + 8.0 / 64.0 || x >= 1.0 - 8.0 / 64.0) arcs[0].push_back(std::uint32_t(i));
      if (x >= 0.5 - 8.0 / 64.0 || x < 8.0 / 64.0) arcs[1].push_back(std::uint32_t(i));
    }
    const Cover two = Cover::from_members(space.size(), std::move(arcs));
    const double ell = lebesgue_number(two, space, metric);
    expect(ell <= 8.0 / 64.0 + 1e-12, "lebesgue number exceeds the overlap width");
    expect(refines(Cover::balls(space.size(),
                                [&](std::size_t i, std::size_t j) {
                                  return metric(space.point(i), space.point(j));
                                },
                                ell),
                   two),
           "balls at the lebesgue radius do not refine the cover");

    const Cover singles = Cover::singletons(space.size());
    const double fine = lebesgue_number(singles, space, metric);
    expect(fine <= 2.0 * space.mesh() && fine > 0.0,
           "singleton cover radius should be at the mesh scale");
    return "ell(two arcs) = " + fmt(ell);
  });

  ck.run("json-roundtrip", [&] {
    const Cover a =
        Cover::from_members(4, {MemberSet{0, 1}, MemberSet{1, 2}, MemberSet{2, 3}});
    const Cover b = cover_from_json(cover_to_json(a));
    expect(a == b, "cover changed across json round-trip");
    std::size_t fixtures = 0;
    if (!options.fixtures_dir.empty()) {
      for (const auto& entry : std::filesystem::directory_iterator(options.fixtures_dir)) {
        if (entry.path().extension() != ".json") continue;
        std::ifstream in(entry.path());
        std::stringstream ss;
        ss << in.rdbuf();
        const std::string text = ss.str();
        try {
          if (text.find("\"cells\"") != std::string::npos) {
            (void)partition_from_json(text);
          } else {
            const Cover c = cover_from_json(text);
            expect(cover_from_json(cover_to_json(c)) == c, "fixture round-trip changed");
          }
        } catch (const std::exception& e) {
          throw Error("fixture " + entry.path().filename().string() + ": " + e.what());
        }
        ++fixtures;
      }
    }
    return "validated " + std::to_string(fixtures) + " fixture files";
  });
}

// ---------------------------------------------------------------------------

void bowen_suite(Checker& ck, std::uint64_t seed, const VerifyOptions& options) {
  ck.run("separation-soundness", [&] {
    // shift representatives
    {
      const System shift = System::full_shift(2);
      GridOptions g;
      g.truncation = 8;
      const SampledSpace space = sample_grid(shift, 0.0, g);
      const PackingResult r = max_separated(space, shift, 4, 0.4);
      expect(!r.selected.empty() && r.selected.size() == r.count, "no representatives");
      PairEvaluator ev(space, shift, space.metric(), 4);
      for (std::size_t i = 0; i < r.selected.size(); ++i)
        for (std::size_t j = i + 1; j < r.selected.size(); ++j)
          expect(ev.separated(r.selected[i], r.selected[j], 0.4),
                 "shift representatives not separated");
    }
    // doubling map lattice
    {
      const System doubling = System::torus({2}, 1);
      const SampledSpace space = sample_grid(doubling, 1.0 / 1024.0);
      const PackingResult r = max_separated(space, doubling, 5, 0.05);
      PairEvaluator ev(space, doubling, space.metric(), 5);
      for (std::size_t i = 0; i < r.selected.size(); ++i)
        for (std::size_t j = i + 1; j < r.selected.size(); ++j)
          expect(ev.separated(r.selected[i], r.selected[j], 0.05),
                 "doubling greedy set not separated");
    }
    // random instance, exact mode
    {
      RandomInstance inst = random_point_system(seed * 31 + 5, 12);
      PackOptions exact;
      exact.mode = PackMethod::Exact;
      const PackingResult r = max_separated(inst.space, inst.system, 3, 0.3, exact);
      PairEvaluator ev(inst.space, inst.system, inst.space.metric(), 3);
      for (std::size_t i = 0; i < r.selected.size(); ++i)
        for (std::size_t j = i + 1; j < r.selected.size(); ++j)
          expect(ev.separated(r.selected[i], r.selected[j], 0.3),
                 "exact separated set not separated");
    }
    return "shift, doubling and random instances rechecked";
  });

  ck.run("spanning-soundness", [&] {
    const System doubling = System::torus({2}, 1);
    const SampledSpace space = sample_grid(doubling, 1.0 / 512.0);
    for (std::size_t n : {1ul, 4ul}) {
      const PackingResult r = min_spanning(space, doubling, n, 0.07);
      PairEvaluator ev(space, doubling, space.metric(), n);
      for (std::size_t p = 0; p < space.size(); ++p) {
        bool inside = false;
        for (auto c : r.selected)
          if (ev.within(c, p, 0.07)) {
            inside = true;
            break;
          }
        expect(inside, "point " + std::to_string(p) + " is outside every ball");
      }
    }
    return "doubling lattice covers rechecked";
  });

  ck.run("sandwich-exact", [&] {
    std::size_t checked = 0;
    for (std::size_t instance = 0; instance < options.sandwich_instances; ++instance) {
      RandomInstance inst = random_point_system(seed + instance, 12);
      for (double eps : {0.15, 0.3, 0.45}) {
        for (std::size_t n = 1; n <= 3; ++n) {
          const SandwichReport rep = sandwich_check(inst.space, inst.system, n, eps);
          expect(rep.holds, "sandwich fails on instance " + std::to_string(instance) +
                                ", eps=" + fmt(eps) + ", n=" + std::to_string(n));
          ++checked;
        }
      }
    }
    return std::to_string(checked) + " exact chains";
  });

  ck.run("monotonicity", [&] {
    const System shift = System::full_shift(2);
    GridOptions g;
    g.truncation = 14;
    const SampledSpace space = sample_grid(shift, 0.0, g);
    const std::vector<double> eps_grid = {0.2, 0.3, 0.4, 0.6};
    std::vector<std::vector<unsigned long long>> counts;
    for (double eps : eps_grid) {
      counts.emplace_back();
      for (std::size_t n = 1; n <= 8; ++n)
        counts.back().push_back(max_separated(space, shift, n, eps).count);
    }
    for (std::size_t e = 0; e < eps_grid.size(); ++e)
      for (std::size_t n = 1; n < counts[e].size(); ++n)
        expect(counts[e][n] >= counts[e][n - 1], "s(n,eps) decreased in n");
    for (std::size_t e = 1; e < eps_grid.size(); ++e)
      for (std::size_t n = 0; n < counts[e].size(); ++n)
        expect(counts[e][n] <= counts[e - 1][n], "s(n,eps) increased in eps");

    RandomInstance inst = random_point_system(seed * 13 + 3, 12);
    PackOptions exact;
    exact.mode = PackMethod::Exact;
    for (double eps : {0.2, 0.3}) {
      unsigned long long prev = 0;
      for (std::size_t n = 1; n <= 3; ++n) {
        const unsigned long long c =
            max_separated(inst.space, inst.system, n, eps, exact).count;
        expect(c >= prev, "exact s(n,eps) decreased in n");
        prev = c;
      }
    }
    return "exact-integer checks on shift and random instances";
  });

  ck.run("ball-cover-refinement", [&] {
    const System doubling = System::torus({2}, 1);
    const SampledSpace space = sample_grid(doubling, 1.0 / 64.0);
    const Metric metric = space.metric();
    const DiscreteMap map = discretize(space, doubling);
    auto base_distance = [&](std::size_t i, std::size_t j) {
      return metric(space.point(i), space.point(j));
    };
    for (double eps : {0.1, 0.3}) {
      for (std::size_t n = 1; n <= 3; ++n) {
        PairEvaluator ev(space, doubling, metric, n);
        const Cover iter_eps =
            iterate_cover(Cover::balls(space.size(), base_distance, eps), map, n);
        const Cover dn_balls = Cover::balls(
            space.size(),
            [&](std::size_t i, std::size_t j) { return ev.distance(i, j); }, eps);
        const Cover iter_half =
            iterate_cover(Cover::balls(space.size(), base_distance, eps / 2.0), map, n);
        expect(refines(dn_balls, iter_eps), "[balls eps]^n does not precede balls(d_n)");
        expect(refines(iter_half, dn_balls), "balls(d_n) does not precede [balls eps/2]^n");
      }
    }
    return "doubling lattice, n <= 3";
  });

  ck.run("metric-agreement", [&] {
    const System shift = System::full_shift(2);
    GridOptions g;
    g.truncation = 14;
    const SampledSpace space = sample_grid(shift, 0.0, g);
    std::vector<std::size_t> ns;
    for (std::size_t n = 1; n <= 12; ++n) ns.push_back(n);
    EstimateOptions opts;
    const EntropyEstimate harmonic =
        bowen_entropy_estimate(space, shift, {0.4}, ns, opts);
    EstimateOptions geo = opts;
    geo.metric_override = metrics::sequence(SequenceCoord::Discrete, WeightScheme::Geometric);
    const EntropyEstimate geometric =
        bowen_entropy_estimate(space, shift, {0.4}, ns, geo);
    const double a = harmonic.estimate, b = geometric.estimate;
    expect(std::abs(a - b) <= 0.05 * std::max(a, b),
           "1/j and 2^-j rates differ by more than 5%: " + fmt(a) + " vs " + fmt(b));
    return "rates " + fmt(a) + " and " + fmt(b);
  });
}

// ---------------------------------------------------------------------------

void measures_suite(Checker& ck, std::uint64_t seed, const VerifyOptions&) {
  const System shift = System::full_shift(2);
  GridOptions g;
  g.truncation = 10;
  const SampledSpace words = sample_grid(shift, 0.0, g);
  const DiscreteMap shift_map = discretize(words, shift);
  const FinitePartition generator = cylinder_partition(words, 1);

  ck.run("scaling-identity", [&] {
    std::vector<PointMeasure> fixtures = {bernoulli_measure(words, {0.5, 0.5}),
                                          bernoulli_measure(words, {0.75, 0.25})};
    {
      // uniform measure on the doubling lattice is invariant as well
      const System doubling = System::torus({2}, 1);
      const SampledSpace circle = sample_grid(doubling, 1.0 / 64.0);
      PointMeasure uniform;
      uniform.weights.assign(circle.size(), 1.0 / double(circle.size()));
      const DiscreteMap map = discretize(circle, doubling);
      const FinitePartition halves = build_fine_partition(circle, circle.metric(), 0.3);
      const KSReport base = ks_rate(uniform, halves, map, 6);
      for (double alpha : {0.0, 0.25, 0.5, 1.0}) {
        const KSReport scaled = ks_rate(scaled_measure(uniform, alpha), halves, map, 6);
        expect(std::abs(scaled.rate - alpha * base.rate) <= 1e-6,
               "rate scaling fails on the doubling lattice at alpha=" + fmt(alpha));
      }
    }
    const std::size_t n_max = 8;
    for (const auto& mu : fixtures) {
      const KSReport base = ks_rate(mu, generator, shift_map, n_max);
      const double mass = mu.mass();
      for (double alpha : {0.0, 0.25, 0.5, 1.0}) {
        const KSReport scaled = ks_rate(scaled_measure(mu, alpha), generator, shift_map, n_max);
        // term-by-term: H_{alpha mu}(C^n) = alpha H_mu(C^n) + alpha m log(1/alpha)
        const double shiftterm = alpha > 0.0 ? alpha * mass * std::log(1.0 / alpha) : 0.0;
        for (std::size_t i = 0; i < n_max; ++i)
          expect(std::abs(scaled.per_n_entropy[i] -
                          (alpha * base.per_n_entropy[i] + shiftterm)) <= 1e-9,
                 "displayed scaling identity fails at n=" + std::to_string(i + 1));
        expect(std::abs(scaled.rate - alpha * base.rate) <= 1e-6,
               "ks rate does not scale by alpha=" + fmt(alpha));
      }
    }
    return "alpha in {0, 0.25, 0.5, 1} on three fixtures";
  });

  ck.run("entropy-subadditive", [&] {
    const PointMeasure mu = bernoulli_measure(words, {0.7, 0.3});
    const KSReport rep = ks_rate(mu, generator, shift_map, 8);
    for (std::size_t a = 1; a < 8; ++a)
      for (std::size_t b = 1; a + b <= 8; ++b)
        expect(rep.per_n_entropy[a + b - 1] <=
                   rep.per_n_entropy[a - 1] + rep.per_n_entropy[b - 1] + 1e-12,
               "H(C^{a+b}) > H(C^a) + H(C^b)");
    return "H subadditive up to n=8";
  });

  ck.run("sigma-uniformity", [&] {
    GridOptions g12;
    g12.truncation = 12;
    const SampledSpace space = sample_grid(shift, 0.0, g12);
    const DiscreteMap map = discretize(space, shift);
    const PackingResult e5 = max_separated(space, shift, 5, 0.4);
    expect(e5.count == 64 && e5.selected.size() == 64, "expected 64 representatives");
    const FinitePartition depth6 = cylinder_partition(space, 6);
    const EmpiricalMeasures em = empirical_measures(e5.selected, map, 5, depth6);
    expect(std::abs(em.sigma_points.mass() - 1.0) <= 1e-12, "sigma mass is not 1");
    expect(std::abs(em.mu_points.mass() - 1.0) <= 1e-12, "mu mass is not 1");
    const FinitePartition refined = refine_partition(depth6, map, 5);
    const double h = partition_entropy(em.sigma_points, refined);
    expect(std::abs(h - std::log(64.0)) <= 1e-9,
           "H_sigma(C^5) = " + fmt(h) + ", expected log 64");
    return "H_sigma(C^5) = log 64 exactly";
  });

  ck.run("misiurewicz", [&] {
    // fixed point: E = {00000...}
    {
      const FinitePartition depth3 = cylinder_partition(words, 3);
      const MisiurewiczReport rep = misiurewicz_bound_check(
          words, {0}, shift_map, depth3, 2, 4, 0.4);
      expect(rep.holds, "fixed-point instance fails");
    }
    // shift instance, n=6, q=2
    {
      const PackingResult e = max_separated(words, shift, 6, 0.4);
      const FinitePartition depth3 = cylinder_partition(words, 3);
      const MisiurewiczReport rep =
          misiurewicz_bound_check(words, e.selected, shift_map, depth3, 2, 6, 0.4);
      expect(rep.holds, "shift instance fails: lhs=" + fmt(rep.lhs) + " rhs=" + fmt(rep.rhs));
    }
    // doubling lattice, n=8, q=2, eps=0.1
    {
      const System doubling = System::torus({2}, 1);
      const SampledSpace circle = sample_grid(doubling, 1.0 / 1024.0);
      const DiscreteMap map = discretize(circle, doubling);
      const FinitePartition fine = build_fine_partition(circle, circle.metric(), 0.05);
      const PackingResult e = max_separated(circle, doubling, 8, 0.1);
      const MisiurewiczReport rep =
          misiurewicz_bound_check(circle, e.selected, map, fine, 2, 8, 0.1);
      expect(rep.holds, "doubling instance fails: lhs=" + fmt(rep.lhs) +
                            " rhs=" + fmt(rep.rhs));
    }
    return "three instances with exact arithmetic";
  });

  ck.run("fine-partition", [&] {
    const System doubling = System::torus({2}, 1);
    const SampledSpace circle = sample_grid(doubling, 1.0 / 64.0);
    const Metric metric = circle.metric();

    const FinitePartition whole = build_fine_partition(circle, metric, 1.0);
    expect(whole.size() == 1, "eps above the diameter should give one cell");

    const FinitePartition cells = build_fine_partition(circle, metric, 1.0 / 8.0);
    expect(cells.size() >= 4 && cells.size() <= 8,
           "expected 4..8 cells, got " + std::to_string(cells.size()));
    for (std::size_t k = 0; k < cells.size(); ++k)
      for (auto a : cells.cell(k))
        for (auto b : cells.cell(k))
          expect(metric(circle.point(a), circle.point(b)) <= 0.25 + 1e-12,
                 "cell diameter above 2 eps");

    // two separated clusters force exactly two cells
    std::vector<State> pts;
    for (int i = 0; i < 5; ++i) pts.push_back({0.01 * i});
    for (int i = 0; i < 5; ++i) pts.push_back({0.8 + 0.01 * i});
    const SampledSpace clusters =
        SampledSpace::explicit_points(pts, metrics::euclidean_capped(1.0), 0.01);
    const FinitePartition two =
        build_fine_partition(clusters, clusters.metric(), 0.2);
    expect(two.size() == 2, "expected the two clusters, got " + std::to_string(two.size()));
    return "diameters and cluster counts check out";
  });

  ck.run("ks-invariance-flag", [&] {
    std::mt19937_64 rng(seed * 17 + 9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    PointMeasure mu;
    mu.weights.resize(words.size());
    double total = 0.0;
    for (auto& w : mu.weights) total += (w = u(rng));
    for (auto& w : mu.weights) w /= total;
    const KSReport rep = ks_rate(mu, generator, shift_map, 4);
    expect(!rep.invariant, "a random measure should not look invariant");
    expect(rep.per_n_entropy.size() == 4, "computation should proceed despite the flag");
    return "flagged, gap " + fmt(rep.invariance_gap);
  });
}

// ---------------------------------------------------------------------------

void systems_suite(Checker& ck, std::uint64_t seed, const VerifyOptions&) {
  ck.run("measurability-contract", [&] {
    // full shift: pi_n(Tx) depends only on the first n+stride slots, exhaustively
    for (std::size_t stride : {1ul, 2ul}) {
      const System shift = System::full_shift(2, stride);
      const std::size_t L = 6;
      for (std::size_t n = 1; n + stride <= L; ++n) {
        const std::size_t m = shift.measurability_bound(n);
        expect(m == n + stride, "m(n) should be n + stride");
        for (std::size_t word = 0; word < (1u << L); ++word) {
          State x(L);
          for (std::size_t j = 0; j < L; ++j) x[j] = double((word >> j) & 1);
          State y = x;
          for (std::size_t j = m; j < L; ++j) y[j] = 1.0 - y[j];  // tamper beyond m(n)
          const State tx = shift.step(x), ty = shift.step(y);
          for (std::size_t j = 0; j < n; ++j)
            expect(tx[j] == ty[j], "pi_n(Tx) depends on coordinates past m(n)");
        }
      }
    }
    // formal derivative: m(n) = n + 1 on sampled coefficient vectors
    {
      const System d = System::formal_derivative();
      std::mt19937_64 rng(seed + 2);
      std::uniform_real_distribution<double> u(-2.0, 2.0);
      for (int trial = 0; trial < 50; ++trial) {
        State x(8);
        for (auto& v : x) v = u(rng);
        for (std::size_t n = 1; n <= 6; ++n) {
          State y = x;
          for (std::size_t j = d.measurability_bound(n); j < y.size(); ++j) y[j] += 1.0;
          const State tx = d.step(x), ty = d.step(y);
          for (std::size_t j = 0; j < n; ++j)
            expect(tx[j] == ty[j], "formal derivative breaks the m(n)=n+1 contract");
        }
      }
    }
    return "shift and formal derivative contracts hold";
  });

  ck.run("step-examples", [&] {
    const System shift = System::full_shift(2);
    const State moved = shift.step(State{0, 1, 1, 0});
    expect(moved == State({1, 1, 0, 0}), "full shift drops the first symbol");

    const System d = System::formal_derivative();
    expect(d.step(State{1, 1, 1, 1}) == State({1, 2, 3, 0}),
           "derivative of (1,1,1,1) should be (1,2,3,0)");

    const System two_x = System::linear({2.0}, 1);
    expect(two_x.step(State{1.5}) == State({3.0}), "linear map 2x");
    return "catalog steps verified";
  });

  ck.run("rank-profiles", [&] {
    {
      const RankProfile id = rank_stabilization_index({1, 0, 0, 1}, 2);
      expect(id.stabilization_index == 0, "identity should stabilize at 0");
    }
    {
      const RankProfile proj = rank_stabilization_index({2, 0, 0, 0}, 2);
      expect(proj.stabilization_index == 1, "diag(2,0) should stabilize at 1");
      expect(proj.ranks[0] == 2 && proj.ranks[1] == 1 && proj.ranks[2] == 1,
             "diag(2,0) ranks should be 2,1,1");
    }
    for (std::size_t dim = 2; dim <= 8; ++dim) {
      std::vector<double> jordan(dim * dim, 0.0);
      for (std::size_t r = 0; r + 1 < dim; ++r) jordan[r * dim + r + 1] = 1.0;
      const RankProfile p = rank_stabilization_index(jordan, dim);
      expect(p.stabilization_index == dim,
             "nilpotent Jordan block should stabilize at its dimension");
      for (std::size_t i = 1; i < p.ranks.size(); ++i)
        expect(p.ranks[i] <= p.ranks[i - 1], "ranks must be nonincreasing");
    }
    return "identity, projection, Jordan blocks up to dim 8";
  });

  ck.run("iterated-rate-law", [&] {
    // counts come from the cylinder closed form of the full shift, so the
    // materialized truncation can stay shallow
    const System shift = System::full_shift(2);
    GridOptions g;
    g.truncation = 14;
    const SampledSpace space = sample_grid(shift, 0.0, g);
    std::vector<std::size_t> ns;
    for (std::size_t n = 1; n <= 10; ++n) ns.push_back(n);
    const double r1 = bowen_entropy_estimate(space, shift, {0.4}, ns, {}).estimate;
    const double r2 =
        bowen_entropy_estimate(space, shift.iterate(2), {0.4}, ns, {}).estimate;
    const double ratio = r2 / r1;
    expect(ratio >= 1.94 && ratio <= 2.06,
           "rate(T^2)/rate(T) = " + fmt(ratio) + " outside [1.94, 2.06]");
    return "ratio " + fmt(ratio);
  });

  ck.run("entropy-prediction", [&] {
    expect(entropy_prediction(System::linear({2.0}, 1)).value == 0.0,
           "linear maps must predict zero");
    expect(entropy_prediction(System::torus({1, 0, 0, 1}, 2)).value == 0.0,
           "torus identity must predict zero");
    const double cat = entropy_prediction(System::torus({2, 1, 1, 1}, 2)).value;
    const double golden = std::log((3.0 + std::sqrt(5.0)) / 2.0);
    expect(std::abs(cat - golden) <= 1e-9, "cat-map prediction " + fmt(cat));
    expect(std::abs(entropy_prediction(System::torus({2}, 1)).value - kLn2) <= 1e-12,
           "doubling prediction should be log 2");
    return "predictions match the eigenvalue closed forms";
  });
}

// ---------------------------------------------------------------------------

void variational_suite(Checker& ck, std::uint64_t seed, const VerifyOptions& options) {
  (void)seed;

  ck.run("bernoulli-vs-bowen", [&] {
    const System shift = System::full_shift(2);
    GridOptions g;
    g.truncation = 14;
    const SampledSpace space = sample_grid(shift, 0.0, g);
    const DiscreteMap map = discretize(space, shift);
    const FinitePartition generator = cylinder_partition(space, 1);
    std::vector<std::size_t> ns;
    for (std::size_t n = 1; n <= 12; ++n) ns.push_back(n);
    const double bowen = bowen_entropy_estimate(space, shift, {0.4}, ns, {}).estimate;

    double best_rate = -1.0, best_p = 0.0;
    for (int i = 1; i <= 9; ++i) {
      const double p = 0.1 * i;
      const KSReport ks =
          ks_rate(bernoulli_measure(space, {1.0 - p, p}), generator, map, 8);
      expect(ks.rate <= bowen * 1.03 + 1e-12,
             "ks rate exceeds the bowen rate at p=" + fmt(p));
      if (ks.rate > best_rate) {
        best_rate = ks.rate;
        best_p = p;
      }
    }
    expect(std::abs(best_p - 0.5) < 1e-9, "maximum should sit at p=0.5");
    expect(std::abs(best_rate - kLn2) <= 0.02 * kLn2,
           "maximum ks rate " + fmt(best_rate) + " is not within 2% of log 2");
    return "sweep max " + fmt(best_rate) + " at p=" + fmt(best_p);
  });

  ck.run("linear-zero-entropy", [&] {
    const System arctan_map = System::linear({2.0}, 1, LinearMetric::Arctan);
    GridOptions g;
    g.core_halfwidth = 10.0;
    const SampledSpace space = sample_grid(arctan_map, 0.002, g);
    std::vector<std::size_t> ns;
    for (std::size_t n = 20; n <= 40; ++n) ns.push_back(n);
    const double slope = bowen_entropy_estimate(space, arctan_map, {0.2}, ns, {}).estimate;
    expect(std::abs(slope) < 0.05, "arctan slope " + fmt(slope) + " not below 0.05");

    const System window_map = System::linear({2.0}, 1, LinearMetric::Window, 1.0);
    const SampledSpace continuum =
        SampledSpace::continuum_interval(1.0, window_map.canonical_metric());
    const double contrast =
        bowen_entropy_estimate(continuum, window_map, {0.2}, ns, {}).estimate;
    expect(contrast > 0.5, "window slope " + fmt(contrast) + " not above 0.5");
    return "arctan slope " + fmt(slope) + ", window slope " + fmt(contrast);
  });

  ck.run("product-sum", [&] {
    const System product = System::product(
        {System::full_shift(2), System::full_shift(3)}, {8, 6});
    const SampledSpace space = sample_grid(product, 0.0);
    // brute-force greedy scan must reproduce the factor closed form exactly
    PackOptions scan;
    scan.force_scan = true;
    const std::size_t n_brute = options.heavy ? 4 : 3;
    for (std::size_t n = 1; n <= n_brute; ++n) {
      const unsigned long long brute =
          max_separated(space, product, n, 0.2, scan).count;
      const unsigned long long closed = max_separated(space, product, n, 0.2).count;
      unsigned long long expected = 1;
      for (std::size_t i = 0; i < n + 3; ++i) expected *= 2;  // 2^{n+4-1}
      for (std::size_t i = 0; i < n + 1; ++i) expected *= 3;  // 3^{n+2-1}
      expect(closed == expected, "closed form disagrees with the factor product");
      expect(brute == expected, "brute-force count " + std::to_string(brute) +
                                    " != " + std::to_string(expected) +
                                    " at n=" + std::to_string(n));
    }
    std::vector<std::size_t> ns;
    for (std::size_t n = 1; n <= 8; ++n) ns.push_back(n);
    const double rate = bowen_entropy_estimate(space, product, {0.2}, ns, {}).estimate;
    const double ln6 = std::log(6.0);
    expect(std::abs(rate - ln6) <= 0.10 * ln6,
           "product rate " + fmt(rate) + " not within 10% of log 6");
    return "rate " + fmt(rate) + " vs log 6 = " + fmt(ln6);
  });

  if (options.heavy) {
    ck.run("torus-grid-vs-eigenvalue", [&] {
      const System cat = System::torus({2, 1, 1, 1}, 2);
      const double oracle = entropy_prediction(cat).value;
      const SampledSpace space = sample_grid(cat, 1.0 / 256.0);
      std::vector<std::size_t> ns;
      for (std::size_t n = 1; n <= 8; ++n) ns.push_back(n);
      const double estimate = bowen_entropy_estimate(space, cat, {0.05}, ns, {}).estimate;
      expect(std::abs(estimate - oracle) <= 0.15 * oracle,
             "grid estimate " + fmt(estimate) + " not within 15% of " + fmt(oracle));
      return "estimate " + fmt(estimate) + " vs oracle " + fmt(oracle);
    });
  }
}

}  // namespace

VerifyReport run_verify(const std::string& suite, std::uint64_t seed,
                        const VerifyOptions& options) {
  Checker ck;
  bool known = false;
  if (suite == "covers" || suite == "all") {
    ck.suite = "covers";
    covers_suite(ck, seed, options);
    known = true;
  }
  if (suite == "bowen" || suite == "all") {
    ck.suite = "bowen";
    bowen_suite(ck, seed, options);
    known = true;
  }
  if (suite == "measures" || suite == "all") {
    ck.suite = "measures";
    measures_suite(ck, seed, options);
    known = true;
  }
  if (suite == "systems" || suite == "all") {
    ck.suite = "systems";
    systems_suite(ck, seed, options);
    known = true;
  }
  if (suite == "variational" || suite == "all") {
    ck.suite = "variational";
    variational_suite(ck, seed, options);
    known = true;
  }
  if (!known)
    throw UsageError("unknown suite '" + suite +
                     "' (covers|bowen|measures|systems|variational|all)");
  return ck.report;
}

}  // namespace entlab
