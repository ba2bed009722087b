#include "entlab/cover.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "json.hpp"

namespace entlab {

MemberSet normalized_member(MemberSet m) {
  std::sort(m.begin(), m.end());
  m.erase(std::unique(m.begin(), m.end()), m.end());
  return m;
}

bool is_subset(const MemberSet& a, const MemberSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

MemberSet intersect(const MemberSet& a, const MemberSet& b) {
  MemberSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

namespace {

struct MemberHash {
  std::size_t operator()(const MemberSet& m) const {
    std::size_t h = 1469598103934665603ull;
    for (auto v : m) {
      h ^= v + 0x9e3779b97f4a7c15ull;
      h *= 1099511628211ull;
    }
    return h;
  }
};

std::vector<MemberSet> dedup(std::vector<MemberSet> members) {
  std::unordered_set<MemberSet, MemberHash> seen;
  std::vector<MemberSet> out;
  out.reserve(members.size());
  for (auto& m : members) {
    if (m.empty()) continue;
    if (seen.insert(m).second) out.push_back(std::move(m));
  }
  return out;
}

}  // namespace

Cover Cover::from_members(std::size_t ground_size, std::vector<MemberSet> members,
                          bool pre_admissible) {
  if (ground_size == 0) throw ValidationError("cover: empty ground set");
  for (auto& m : members) {
    m = normalized_member(std::move(m));
    if (!m.empty() && m.back() >= ground_size)
      throw ValidationError("cover: member index " + std::to_string(m.back()) +
                            " outside ground set");
  }
  Cover c;
  c.ground_ = ground_size;
  c.members_ = dedup(std::move(members));
  // canonical member order makes covers comparable as set families
  std::sort(c.members_.begin(), c.members_.end());
  c.pre_admissible_ = pre_admissible;

  std::vector<std::uint8_t> hit(ground_size, 0);
  for (const auto& m : c.members_)
    for (auto v : m) hit[v] = 1;
  for (std::size_t i = 0; i < ground_size; ++i)
    if (!hit[i])
      throw CoverageError("cover: element " + std::to_string(i) + " is uncovered");
  return c;
}

Cover Cover::whole_space(std::size_t ground_size) {
  MemberSet all(ground_size);
  for (std::size_t i = 0; i < ground_size; ++i) all[i] = std::uint32_t(i);
  return from_members(ground_size, {std::move(all)});
}

Cover Cover::singletons(std::size_t ground_size) {
  std::vector<MemberSet> m;
  m.reserve(ground_size);
  for (std::size_t i = 0; i < ground_size; ++i) m.push_back({std::uint32_t(i)});
  return from_members(ground_size, std::move(m));
}

Cover Cover::balls(std::size_t ground_size,
                   const std::function<double(std::size_t, std::size_t)>& distance,
                   double radius) {
  if (!(radius > 0.0)) throw RangeError("balls: radius must be positive");
  std::vector<MemberSet> members;
  members.reserve(ground_size);
  for (std::size_t c = 0; c < ground_size; ++c) {
    MemberSet ball;
    for (std::size_t i = 0; i < ground_size; ++i)
      if (distance(c, i) < radius) ball.push_back(std::uint32_t(i));
    members.push_back(std::move(ball));
  }
  return from_members(ground_size, std::move(members));
}

Cover join(const Cover& a, const Cover& b) {
  if (a.ground_size() != b.ground_size())
    throw ValidationError("join: ground sets differ");
  std::vector<MemberSet> members;
  members.reserve(a.size() * b.size());
  for (const auto& ma : a.members())
    for (const auto& mb : b.members()) {
      MemberSet cell = intersect(ma, mb);
      if (!cell.empty()) members.push_back(std::move(cell));
    }
  return Cover::from_members(a.ground_size(), std::move(members),
                             a.from_pre_admissible() && b.from_pre_admissible());
}

bool refines(const Cover& a, const Cover& b) {
  if (a.ground_size() != b.ground_size())
    throw ValidationError("refines: ground sets differ");
  for (const auto& ma : a.members()) {
    bool inside = false;
    for (const auto& mb : b.members())
      if (is_subset(ma, mb)) {
        inside = true;
        break;
      }
    if (!inside) return false;
  }
  return true;
}

namespace {

MemberSet preimage(const MemberSet& m, const DiscreteMap& map) {
  std::vector<std::uint8_t> in(map.next.size(), 0);
  for (auto v : m) in[v] = 1;
  MemberSet out;
  for (std::size_t i = 0; i < map.next.size(); ++i)
    if (in[map.next[i]]) out.push_back(std::uint32_t(i));
  return out;
}

}  // namespace

Cover iterate_cover(const Cover& a, const DiscreteMap& map, std::size_t n) {
  if (n == 0) throw RangeError("iterate_cover: n must be >= 1");
  if (map.next.size() != a.ground_size())
    throw ValidationError("iterate_cover: map size does not match ground set");
  Cover result = a;
  Cover pulled = a;
  for (std::size_t j = 1; j < n; ++j) {
    std::vector<MemberSet> pre;
    pre.reserve(pulled.size());
    for (const auto& m : pulled.members()) {
      MemberSet p = preimage(m, map);
      if (!p.empty()) pre.push_back(std::move(p));
    }
    pulled = Cover::from_members(a.ground_size(), std::move(pre));
    result = join(result, pulled);
  }
  // Provenance survives iteration: A^n of a pre-admissible A is admissible.
  if (a.from_pre_admissible())
    result = Cover::from_members(result.ground_size(), result.members(), true);
  return result;
}

// ---------------------------------------------------------------------------
// minimal subcover
// ---------------------------------------------------------------------------

namespace {

// Dense bitset over the compressed target universe.
struct Bits {
  std::vector<std::uint64_t> w;

  explicit Bits(std::size_t n) : w((n + 63) / 64, 0) {}
  void set(std::size_t i) { w[i >> 6] |= (std::uint64_t(1) << (i & 63)); }
  bool any() const {
    for (auto x : w)
      if (x) return true;
    return false;
  }
  std::size_t count_and(const Bits& o) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < w.size(); ++i) c += std::size_t(__builtin_popcountll(w[i] & o.w[i]));
    return c;
  }
  void subtract(const Bits& o) {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] &= ~o.w[i];
  }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto x : w) c += std::size_t(__builtin_popcountll(x));
    return c;
  }
};

struct SubcoverSearch {
  const std::vector<Bits>& member_bits;
  const std::vector<std::vector<std::size_t>>& element_members;  // who covers each element
  std::size_t best;  // monotone best-so-far upper bound

  // Branch on the first uncovered element: every subcover must pick one of
  // the members containing it, so the enumeration is complete.
  void dfs(const Bits& uncovered, std::size_t used) {
    std::size_t remaining = 0, first = std::size_t(-1);
    for (std::size_t blk = 0; blk < uncovered.w.size(); ++blk) {
      if (uncovered.w[blk] && first == std::size_t(-1))
        first = blk * 64 + std::size_t(__builtin_ctzll(uncovered.w[blk]));
      remaining += std::size_t(__builtin_popcountll(uncovered.w[blk]));
    }
    if (remaining == 0) {
      best = std::min(best, used);
      return;
    }
    std::size_t max_gain = 0;
    for (const auto& b : member_bits) max_gain = std::max(max_gain, b.count_and(uncovered));
    if (max_gain == 0) return;
    if (used + (remaining + max_gain - 1) / max_gain >= best) return;

    for (std::size_t k : element_members[first]) {
      Bits next = uncovered;
      next.subtract(member_bits[k]);
      dfs(next, used + 1);
    }
  }
};

}  // namespace

SubcoverCount min_subcover_cardinality(const Cover& a,
                                       const std::optional<MemberSet>& restrict_to) {
  MemberSet targets;
  if (restrict_to) {
    targets = normalized_member(*restrict_to);
    if (!targets.empty() && targets.back() >= a.ground_size())
      throw ValidationError("min_subcover: restriction outside ground set");
  } else {
    targets.resize(a.ground_size());
    for (std::size_t i = 0; i < a.ground_size(); ++i) targets[i] = std::uint32_t(i);
  }
  if (targets.empty()) return {0, 0, true};

  // coverage check, naming the first uncovered element
  {
    std::vector<std::uint8_t> hit(a.ground_size(), 0);
    for (const auto& m : a.members())
      for (auto v : m) hit[v] = 1;
    for (auto t : targets)
      if (!hit[t])
        throw CoverageError("min_subcover: element " + std::to_string(t) +
                            " is not covered");
  }

  // Forced members: a target covered by exactly one member pins that member.
  std::vector<std::uint8_t> target_flag(a.ground_size(), 0);
  for (auto t : targets) target_flag[t] = 1;
  std::vector<std::uint8_t> member_used(a.size(), 0);
  std::size_t forced = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<std::int32_t> sole(a.ground_size(), -1);
    std::vector<std::uint8_t> multi(a.ground_size(), 0);
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (member_used[k]) continue;
      for (auto v : a.member(k)) {
        if (!target_flag[v]) continue;
        if (sole[v] < 0)
          sole[v] = std::int32_t(k);
        else
          multi[v] = 1;
      }
    }
    for (std::size_t v = 0; v < a.ground_size(); ++v) {
      if (!target_flag[v] || multi[v] || sole[v] < 0) continue;
      const std::size_t k = std::size_t(sole[v]);
      if (member_used[k]) continue;
      member_used[k] = 1;
      ++forced;
      for (auto u : a.member(k)) target_flag[u] = 0;
      changed = true;
    }
  }

  MemberSet remaining;
  for (std::size_t v = 0; v < a.ground_size(); ++v)
    if (target_flag[v]) remaining.push_back(std::uint32_t(v));
  if (remaining.empty()) return {forced, forced, true};

  // Compress remaining targets, keep members that still help; drop members
  // dominated by a superset (never needed in an optimal subcover).
  std::vector<std::size_t> pos(a.ground_size(), 0);
  for (std::size_t i = 0; i < remaining.size(); ++i) pos[remaining[i]] = i;
  std::vector<MemberSet> useful;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (member_used[k]) continue;
    MemberSet m;
    for (auto v : a.member(k))
      if (target_flag[v]) m.push_back(std::uint32_t(pos[v]));
    if (!m.empty()) useful.push_back(normalized_member(std::move(m)));
  }
  useful = dedup(std::move(useful));
  {
    std::vector<std::uint8_t> dominated(useful.size(), 0);
    for (std::size_t i = 0; i < useful.size(); ++i)
      for (std::size_t j = 0; j < useful.size(); ++j)
        if (i != j && !dominated[j] &&
            (useful[i].size() < useful[j].size() ||
             (useful[i].size() == useful[j].size() && i > j)) &&
            is_subset(useful[i], useful[j]))
          dominated[i] = 1;
    std::vector<MemberSet> kept;
    for (std::size_t i = 0; i < useful.size(); ++i)
      if (!dominated[i]) kept.push_back(std::move(useful[i]));
    useful = std::move(kept);
  }

  // Greedy upper bound (most new coverage, lowest index on ties).
  std::size_t greedy_count = 0;
  {
    std::vector<std::uint8_t> open(remaining.size(), 1);
    std::size_t open_total = remaining.size();
    while (open_total > 0) {
      std::size_t pick = useful.size(), gain = 0;
      for (std::size_t k = 0; k < useful.size(); ++k) {
        std::size_t g = 0;
        for (auto v : useful[k]) g += open[v];
        if (g > gain) {
          gain = g;
          pick = k;
        }
      }
      if (pick == useful.size()) break;
      for (auto v : useful[pick]) {
        if (open[v]) --open_total;
        open[v] = 0;
      }
      ++greedy_count;
    }
  }

  std::size_t max_member = 0;
  for (const auto& m : useful) max_member = std::max(max_member, m.size());
  const std::size_t trivial_lower =
      (remaining.size() + max_member - 1) / max_member;

  if (useful.size() > 24)
    return {forced + std::max<std::size_t>(1, trivial_lower), forced + greedy_count, false};

  std::vector<Bits> bits;
  bits.reserve(useful.size());
  std::vector<std::vector<std::size_t>> element_members(remaining.size());
  for (std::size_t k = 0; k < useful.size(); ++k) {
    Bits b(remaining.size());
    for (auto v : useful[k]) {
      b.set(v);
      element_members[v].push_back(k);
    }
    bits.push_back(std::move(b));
  }
  Bits all(remaining.size());
  for (std::size_t i = 0; i < remaining.size(); ++i) all.set(i);
  SubcoverSearch search{bits, element_members, greedy_count};
  search.dfs(all, 0);
  const std::size_t exact = forced + search.best;
  return {exact, exact, true};
}

bool is_admissible(const Cover& a, const SampledSpace& space) {
  if (space.size() != a.ground_size())
    throw ValidationError("is_admissible: space size does not match ground set");
  if (a.from_pre_admissible()) return true;
  for (const auto& m : a.members()) {
    std::vector<std::uint8_t> in(a.ground_size(), 0);
    for (auto v : m) in[v] = 1;
    bool complement_in_core = true;
    for (std::size_t i = 0; i < a.ground_size() && complement_in_core; ++i)
      if (!in[i] && !space.in_core(i)) complement_in_core = false;
    if (complement_in_core) return true;
  }
  return false;
}

double lebesgue_number(const Cover& a, const SampledSpace& space, const Metric& metric) {
  if (space.size() != a.ground_size())
    throw ValidationError("lebesgue_number: space size does not match ground set");
  const double diam = metric.diameter();
  auto works = [&](double eps) {
    for (std::size_t x = 0; x < space.size(); ++x) {
      MemberSet ball;
      for (std::size_t y = 0; y < space.size(); ++y)
        if (metric(space.point(x), space.point(y)) < eps) ball.push_back(std::uint32_t(y));
      bool inside = false;
      for (const auto& m : a.members())
        if (is_subset(ball, m)) {
          inside = true;
          break;
        }
      if (!inside) return false;
    }
    return true;
  };
  for (double eps = diam; eps >= space.mesh() / 4.0; eps /= 2.0)
    if (works(eps)) return eps;
  throw ResolutionError("lebesgue_number: no dyadic radius works at mesh " +
                        std::to_string(space.mesh()));
}

CoverEntropyReport cover_entropy_rate(const Cover& a, const DiscreteMap& map,
                                      std::size_t n_max, bool admissible_flag) {
  if (n_max == 0) throw RangeError("cover_entropy_rate: n_max must be >= 1");
  CoverEntropyReport r;
  r.admissible = admissible_flag;
  Cover iterated = a;
  Cover pulled = a;
  for (std::size_t n = 1; n <= n_max; ++n) {
    if (n > 1) {
      std::vector<MemberSet> pre;
      pre.reserve(pulled.size());
      for (const auto& m : pulled.members()) {
        std::vector<std::uint8_t> in(map.next.size(), 0);
        for (auto v : m) in[v] = 1;
        MemberSet p;
        for (std::size_t i = 0; i < map.next.size(); ++i)
          if (in[map.next[i]]) p.push_back(std::uint32_t(i));
        if (!p.empty()) pre.push_back(std::move(p));
      }
      pulled = Cover::from_members(a.ground_size(), std::move(pre));
      iterated = join(iterated, pulled);
    }
    const SubcoverCount c = min_subcover_cardinality(iterated);
    r.n.push_back(n);
    r.counts.push_back(c);
    r.log_counts.push_back(std::log(double(c.value())));
    r.per_step.push_back(std::log(double(c.value())) / double(n));
    if (!c.exact) r.all_exact = false;
  }
  auto [lo, hi] = trailing_half(r.n.size());
  r.window_lo = lo;
  r.window_hi = hi;
  std::vector<double> xs(r.n.begin() + lo, r.n.begin() + hi);
  std::vector<double> ys(r.log_counts.begin() + lo, r.log_counts.begin() + hi);
  r.fit = fit_line(xs, ys);
  r.rate_nats = r.fit.slope;
  r.rate_bits = nats_to_bits(r.rate_nats);
  return r;
}

std::string cover_to_json(const Cover& a) {
  nlohmann::json j;
  j["ground_size"] = a.ground_size();
  auto& members = j["members"] = nlohmann::json::array();
  for (const auto& m : a.members()) members.push_back(m);
  return j.dump();
}

Cover cover_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.contains("ground_size") || !j.contains("members"))
    throw ValidationError("cover json: needs ground_size and members");
  std::vector<MemberSet> members;
  for (const auto& m : j["members"]) members.push_back(m.get<MemberSet>());
  return Cover::from_members(j["ground_size"].get<std::size_t>(), std::move(members));
}

}  // namespace entlab
