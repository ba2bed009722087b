#include "entlab/bowen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <queue>
#include <unordered_set>

#include "entlab/cover.hpp"
#include "entlab/parallel.hpp"

namespace entlab {

namespace {

constexpr double kPi = std::numbers::pi_v<double>;

// ---------------------------------------------------------------------------
// shift structure: closed-form counts for (products of) full shifts
// ---------------------------------------------------------------------------

struct ShiftFactor {
  std::size_t alphabet = 0;
  std::size_t stride = 1;
  WeightScheme scheme = WeightScheme::Harmonic;
  std::size_t index = 1;   // outer weight 1/index
  std::size_t offset = 0;  // slot offset in the stored state
  std::size_t length = 0;  // stored prefix length, 0 when not materialized
};

struct ShiftStructure {
  std::vector<ShiftFactor> factors;
};

std::optional<ShiftStructure> detect_shift(const System& system, const Metric& metric) {
  ShiftStructure s;
  if (system.kind() == System::Kind::FullShift) {
    auto info = sequence_metric_info(metric);
    if (!info || info->coord != SequenceCoord::Discrete) return std::nullopt;
    s.factors.push_back({system.alphabet(), system.stride(), info->scheme, 1, 0, 0});
    return s;
  }
  if (system.kind() == System::Kind::Product) {
    auto info = factor_product_info(metric);
    if (!info) return std::nullopt;
    const auto& factors = system.factors();
    if (info->factors.size() != factors.size()) return std::nullopt;
    std::size_t offset = 0;
    for (std::size_t f = 0; f < factors.size(); ++f) {
      if (factors[f].kind() != System::Kind::FullShift) return std::nullopt;
      auto fm = sequence_metric_info(info->factors[f]);
      if (!fm || fm->coord != SequenceCoord::Discrete) return std::nullopt;
      s.factors.push_back({factors[f].alphabet(), factors[f].stride(), fm->scheme,
                           f + 1, offset, 0});
      offset += system.factor_dims()[f];
    }
    return s;
  }
  return std::nullopt;
}

// Fill per-factor stored prefix lengths from a matching word grid; false when
// the space does not enumerate the right word lattice.
bool bind_shift_space(ShiftStructure& s, const SampledSpace& space) {
  if (s.factors.size() == 1) {
    auto w = space.words_info();
    if (!w || w->alphabet != s.factors[0].alphabet) return false;
    s.factors[0].length = w->length;
    return true;
  }
  auto pw = space.product_words_info();
  if (!pw || pw->size() != s.factors.size()) return false;
  std::size_t offset = 0;
  for (std::size_t f = 0; f < s.factors.size(); ++f) {
    if ((*pw)[f].alphabet != s.factors[f].alphabet) return false;
    if (offset != s.factors[f].offset) return false;
    s.factors[f].length = (*pw)[f].length;
    offset += (*pw)[f].length;
  }
  return true;
}

// Deepest in-factor slot (1-based) that can decide at the factor-level radius.
std::size_t factor_depth(double factor_eps, WeightScheme scheme, DepthMode mode) {
  const double w1 = coordinate_weight(scheme, 1);
  if (mode == DepthMode::Separation ? (factor_eps >= w1) : (factor_eps > w1)) return 0;
  return truncation_depth(factor_eps, mode, scheme);
}

// |union of the n stride-windows of width k|; the windows have gaps when the
// stride exceeds k.
std::size_t deciding_slots(std::size_t k, std::size_t stride, std::size_t n) {
  if (k == 0) return 0;
  return stride >= k ? n * k : stride * (n - 1) + k;
}

struct CylinderCount {
  unsigned long long count = 1;
  double log_count = 0.0;
  std::vector<std::size_t> slots_per_factor;
  bool materializable = true;  // all deciding slots inside the stored prefixes
};

CylinderCount cylinder_count(const ShiftStructure& s, std::size_t n, double eps,
                             DepthMode mode) {
  CylinderCount out;
  for (const auto& f : s.factors) {
    const double factor_eps = eps * double(f.index);
    const std::size_t k = factor_depth(factor_eps, f.scheme, mode);
    const std::size_t slots = deciding_slots(k, f.stride, n);
    out.slots_per_factor.push_back(slots);
    if (f.length != 0 && slots > f.length) out.materializable = false;
    out.log_count += double(slots) * std::log(double(f.alphabet));
    for (std::size_t i = 0; i < slots; ++i) {
      if (out.count > std::numeric_limits<unsigned long long>::max() / f.alphabet)
        throw ResourceError("cylinder count overflows 64 bits at n=" + std::to_string(n));
      out.count *= f.alphabet;
    }
  }
  return out;
}

// One representative per cylinder class, first in lattice order.
std::vector<std::uint32_t> cylinder_representatives(const ShiftStructure& s,
                                                    const SampledSpace& space,
                                                    std::size_t n, double eps,
                                                    DepthMode mode) {
  // deciding slot list per factor (absolute slot indices)
  std::vector<std::size_t> slots;
  for (const auto& f : s.factors) {
    const std::size_t k = factor_depth(eps * double(f.index), f.scheme, mode);
    if (k == 0) continue;
    std::vector<std::uint8_t> mark(f.length, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        const std::size_t pos = f.stride * i + j;
        if (pos < f.length) mark[pos] = 1;
      }
    for (std::size_t p = 0; p < f.length; ++p)
      if (mark[p]) slots.push_back(f.offset + p);
  }
  std::vector<std::uint32_t> reps;
  std::unordered_set<std::string> seen;
  std::string key;
  for (std::size_t i = 0; i < space.size(); ++i) {
    const StateView x = space.point(i);
    key.clear();
    for (std::size_t p : slots) key.push_back(char(int(x[p])));
    if (seen.insert(key).second) reps.push_back(std::uint32_t(i));
  }
  return reps;
}

// ---------------------------------------------------------------------------
// closed forms for one-dimensional linear maps under the window metric
// ---------------------------------------------------------------------------

struct IntervalSetup {
  double halfwidth = 0.0;
  double growth = 1.0;  // max_j |a|^j for j < n
  double cap = 1.0;
};

std::optional<IntervalSetup> interval_setup(const SampledSpace& space, const System& system,
                                            const Metric& metric, std::size_t n) {
  if (space.kind() != GridKind::ContinuumInterval) return std::nullopt;
  if (system.kind() != System::Kind::Linear || system.dim() != 1) return std::nullopt;
  auto cap = window_metric_cap(metric);
  if (!cap) return std::nullopt;
  const double step_factor =
      std::pow(std::abs(system.matrix()[0]), double(system.iterate_count()));
  IntervalSetup s;
  s.halfwidth = space.line_info()->halfwidth;
  s.growth = std::max(1.0, std::pow(step_factor, double(n - 1)));
  s.cap = *cap;
  return s;
}

unsigned long long interval_packing_count(const IntervalSetup& s, double eps) {
  if (eps >= s.cap) return 1;  // d_n never exceeds the cap
  const double theta = eps / s.growth;
  const double q = 2.0 * s.halfwidth / theta;
  const double f = std::floor(q);
  return (unsigned long long)(f == q ? q : f + 1.0);
}

unsigned long long interval_covering_count(const IntervalSetup& s, double eps) {
  if (eps >= s.cap) return 1;
  const double theta = eps / s.growth;
  return (unsigned long long)(std::floor(s.halfwidth / theta)) + 1ull;
}

}  // namespace

// ---------------------------------------------------------------------------
// pair evaluator
// ---------------------------------------------------------------------------

struct PairEvaluator::Impl {
  const SampledSpace* space = nullptr;
  std::size_t n = 1;
  Metric metric;
  std::optional<ShiftStructure> shift;
  std::optional<OrbitTable> table;

  double shift_distance(std::size_t a, std::size_t b) const {
    const StateView x = space->point(a), y = space->point(b);
    double best = 0.0;
    for (const auto& f : shift->factors) {
      const double outer = 1.0 / double(f.index);
      if (outer <= best) break;  // outer weights decrease with the factor index
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t off = f.stride * i;
        if (off >= f.length) break;
        for (std::size_t j = 0; off + j < f.length; ++j) {
          if (x[f.offset + off + j] != y[f.offset + off + j]) {
            best = std::max(best, outer * coordinate_weight(f.scheme, j + 1));
            break;
          }
          if (outer * coordinate_weight(f.scheme, j + 2) <= best) break;
        }
      }
    }
    return best;
  }

  // any difference within the first `depth` slots at some offset
  bool shift_hits(std::size_t a, std::size_t b, double eps, DepthMode mode) const {
    const StateView x = space->point(a), y = space->point(b);
    for (const auto& f : shift->factors) {
      const std::size_t k = factor_depth(eps * double(f.index), f.scheme, mode);
      if (k == 0) continue;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t off = f.stride * i;
        const std::size_t end = std::min(off + k, f.length);
        for (std::size_t p = off; p < end; ++p)
          if (x[f.offset + p] != y[f.offset + p]) return true;
      }
    }
    return false;
  }

  double table_distance(std::size_t a, std::size_t b) const {
    double best = 0.0;
    for (std::size_t j = 0; j < table->horizon(); ++j)
      best = std::max(best, metric(table->at(a, j), table->at(b, j)));
    return best;
  }
};

PairEvaluator::PairEvaluator(const SampledSpace& space, const System& system,
                             const Metric& metric, std::size_t n)
    : impl_(new Impl) {
  if (n == 0) throw RangeError("pair evaluator: n must be >= 1");
  if (space.size() == 0) throw UsageError("pair evaluator: space has no sample points");
  impl_->space = &space;
  impl_->n = n;
  impl_->metric = metric;
  auto shift = detect_shift(system, metric);
  if (shift && bind_shift_space(*shift, space)) {
    impl_->shift = std::move(*shift);
    return;
  }
  const std::size_t horizon = system.kind() == System::Kind::Identity ? 1 : n;
  const std::size_t bytes = space.size() * horizon * space.dim() * sizeof(double);
  if (bytes > (std::size_t(1) << 31))
    throw ResourceError("pair evaluator: orbit table needs " + std::to_string(bytes) +
                        " bytes");
  impl_->table.emplace(space, system, horizon);
}

PairEvaluator::~PairEvaluator() = default;
PairEvaluator::PairEvaluator(PairEvaluator&&) noexcept = default;

bool PairEvaluator::separated(std::size_t i, std::size_t j, double eps) const {
  if (impl_->shift) return impl_->shift_hits(i, j, eps, DepthMode::Separation);
  double best = 0.0;
  for (std::size_t t = 0; t < impl_->table->horizon(); ++t) {
    best = std::max(best, impl_->metric(impl_->table->at(i, t), impl_->table->at(j, t)));
    if (best > eps) return true;
  }
  return false;
}

bool PairEvaluator::within(std::size_t i, std::size_t j, double eps) const {
  if (impl_->shift) return !impl_->shift_hits(i, j, eps, DepthMode::Spanning);
  for (std::size_t t = 0; t < impl_->table->horizon(); ++t)
    if (impl_->metric(impl_->table->at(i, t), impl_->table->at(j, t)) >= eps) return false;
  return true;
}

double PairEvaluator::distance(std::size_t i, std::size_t j) const {
  return impl_->shift ? impl_->shift_distance(i, j) : impl_->table_distance(i, j);
}

// ---------------------------------------------------------------------------
// spatial bucketing on lattice grids
// ---------------------------------------------------------------------------

namespace {

// Cells at least eps wide in the base metric, so any pair at base distance
// <= eps lands in the same or an adjacent cell.
class SpatialIndex {
public:
  static std::unique_ptr<SpatialIndex> build(const SampledSpace& space, double eps) {
    auto idx = std::unique_ptr<SpatialIndex>(new SpatialIndex);
    idx->space_ = &space;
    switch (space.kind()) {
      case GridKind::TorusLattice: {
        idx->wrap_ = true;
        idx->dims_ = space.torus_info()->dims;
        const std::size_t c =
            std::max<std::size_t>(1, std::size_t(std::floor(1.0 / eps)));
        idx->cells_.assign(idx->dims_, c);
        idx->lo_.assign(idx->dims_, 0.0);
        idx->width_.assign(idx->dims_, 1.0 / double(c));
        break;
      }
      case GridKind::ArctanLine: {
        idx->dims_ = 1;
        const double W = space.line_info()->halfwidth;
        const double lo = std::atan(-W), hi = std::atan(W);
        const std::size_t c = std::max<std::size_t>(
            1, std::size_t(std::floor((hi - lo) / (eps * kPi))));
        idx->cells_ = {c};
        idx->lo_ = {lo};
        idx->width_ = {(hi - lo) / double(c)};
        idx->arctan_coord_ = true;
        break;
      }
      case GridKind::IntervalLine: {
        idx->dims_ = 1;
        const double W = space.line_info()->halfwidth;
        const std::size_t c =
            std::max<std::size_t>(1, std::size_t(std::floor(2.0 * W / eps)));
        idx->cells_ = {c};
        idx->lo_ = {-W};
        idx->width_ = {2.0 * W / double(c)};
        break;
      }
      default:
        return nullptr;
    }
    std::size_t total = 1;
    for (std::size_t c : idx->cells_) total *= c;
    idx->buckets_.resize(total);
    return idx;
  }

  void insert(std::uint32_t i) { buckets_[bucket_of(i)].push_back(i); }

  template <typename Fn>
  bool scan_neighbors(std::size_t i, Fn&& fn) const {
    std::vector<std::size_t> digits = digits_of(i);
    std::vector<std::size_t> ids;
    const std::size_t combos = pow3(dims_);
    for (std::size_t c = 0; c < combos; ++c) {
      std::size_t id = 0;
      bool valid = true;
      std::size_t rest = c;
      for (std::size_t d = 0; d < dims_; ++d) {
        const int delta = int(rest % 3) - 1;
        rest /= 3;
        long long v = (long long)digits[d] + delta;
        if (wrap_) {
          v = (v + (long long)cells_[d]) % (long long)cells_[d];
        } else if (v < 0 || v >= (long long)cells_[d]) {
          valid = false;
          break;
        }
        id = id * cells_[d] + std::size_t(v);
      }
      if (valid) ids.push_back(id);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    for (std::size_t id : ids)
      for (std::uint32_t j : buckets_[id])
        if (fn(j)) return true;
    return false;
  }

private:
  SpatialIndex() = default;

  static std::size_t pow3(std::size_t d) {
    std::size_t v = 1;
    while (d--) v *= 3;
    return v;
  }

  std::vector<std::size_t> digits_of(std::size_t i) const {
    const StateView x = space_->point(i);
    std::vector<std::size_t> digits(dims_);
    for (std::size_t d = 0; d < dims_; ++d) {
      double t = x[d];
      if (arctan_coord_) t = std::atan(t);
      long long c = (long long)std::floor((t - lo_[d]) / width_[d]);
      c = std::clamp<long long>(c, 0, (long long)cells_[d] - 1);
      digits[d] = std::size_t(c);
    }
    return digits;
  }

  std::size_t bucket_of(std::size_t i) const {
    auto digits = digits_of(i);
    std::size_t id = 0;
    for (std::size_t d = 0; d < dims_; ++d) id = id * cells_[d] + digits[d];
    return id;
  }

  const SampledSpace* space_ = nullptr;
  std::size_t dims_ = 0;
  bool wrap_ = false;
  bool arctan_coord_ = false;
  std::vector<std::size_t> cells_;
  std::vector<double> lo_, width_;
  std::vector<std::vector<std::uint32_t>> buckets_;
};

std::vector<std::uint32_t> greedy_separated_scan(const SampledSpace& space,
                                                 const PairEvaluator& ev, double eps) {
  std::vector<std::uint32_t> selected;
  auto index = SpatialIndex::build(space, eps);
  for (std::size_t i = 0; i < space.size(); ++i) {
    bool collides = false;
    if (index) {
      collides = index->scan_neighbors(
          i, [&](std::uint32_t j) { return !ev.separated(i, j, eps); });
    } else {
      // most recently selected first: collisions cluster in lattice order
      for (auto it = selected.rbegin(); it != selected.rend(); ++it)
        if (!ev.separated(i, *it, eps)) {
          collides = true;
          break;
        }
    }
    if (!collides) {
      selected.push_back(std::uint32_t(i));
      if (index) index->insert(std::uint32_t(i));
    }
  }
  return selected;
}

// Maximum separated subset by branch and bound on <= 20 points.
std::vector<std::uint32_t> exact_separated(const SampledSpace& space,
                                           const PairEvaluator& ev, double eps) {
  const std::size_t m = space.size();
  std::vector<std::uint32_t> adj(m, 0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (i != j && ev.separated(i, j, eps)) adj[i] |= (std::uint32_t(1) << j);

  std::vector<std::uint32_t> best;
  std::vector<std::uint32_t> current;
  auto dfs = [&](auto&& self, std::uint32_t candidates) -> void {
    if (current.size() + std::size_t(__builtin_popcount(candidates)) <= best.size()) return;
    if (candidates == 0) {
      if (current.size() > best.size()) best = current;
      return;
    }
    const int v = __builtin_ctz(candidates);
    // include v
    current.push_back(std::uint32_t(v));
    self(self, candidates & adj[v] & ~((std::uint32_t(1) << (v + 1)) - 1));
    current.pop_back();
    // exclude v
    self(self, candidates & ~(std::uint32_t(1) << v));
  };
  const std::uint32_t all = m >= 32 ? ~std::uint32_t(0) : ((std::uint32_t(1) << m) - 1);
  dfs(dfs, all);
  return best;
}

struct BallFamily {
  std::vector<std::vector<std::uint32_t>> balls;  // ball[i] = {j : d_n(i,j) < eps}
};

BallFamily enumerate_balls(const SampledSpace& space, const PairEvaluator& ev, double eps) {
  BallFamily fam;
  fam.balls.resize(space.size());
  auto index = SpatialIndex::build(space, eps);
  if (index) {
    for (std::size_t i = 0; i < space.size(); ++i) index->insert(std::uint32_t(i));
    for (std::size_t i = 0; i < space.size(); ++i) {
      index->scan_neighbors(i, [&](std::uint32_t j) {
        if (ev.within(i, j, eps)) fam.balls[i].push_back(j);
        return false;
      });
      std::sort(fam.balls[i].begin(), fam.balls[i].end());
    }
  } else {
    for (std::size_t i = 0; i < space.size(); ++i)
      for (std::size_t j = 0; j < space.size(); ++j)
        if (ev.within(i, j, eps)) fam.balls[i].push_back(std::uint32_t(j));
  }
  return fam;
}

// Lazy-heap greedy set cover over the ball family; deterministic ties by
// lowest center index.
std::vector<std::uint32_t> greedy_ball_cover(const SampledSpace& space,
                                             const BallFamily& fam) {
  const std::size_t m = space.size();
  std::vector<std::uint8_t> covered(m, 0);
  std::size_t open = m;
  using Entry = std::pair<std::size_t, std::size_t>;  // (gain, center)
  auto cmp = [](const Entry& a, const Entry& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second > b.second;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);
  for (std::size_t i = 0; i < m; ++i) heap.push({fam.balls[i].size(), i});

  std::vector<std::uint32_t> centers;
  while (open > 0 && !heap.empty()) {
    auto [gain, c] = heap.top();
    heap.pop();
    std::size_t fresh = 0;
    for (auto v : fam.balls[c]) fresh += !covered[v];
    if (fresh == 0) continue;
    if (!heap.empty() && fresh < heap.top().first) {
      heap.push({fresh, c});
      continue;
    }
    centers.push_back(std::uint32_t(c));
    for (auto v : fam.balls[c]) {
      if (!covered[v]) --open;
      covered[v] = 1;
    }
  }
  if (open > 0) throw CoverageError("greedy_ball_cover: a point is in no ball");
  return centers;
}

}  // namespace

// ---------------------------------------------------------------------------
// public packing operations
// ---------------------------------------------------------------------------

PackingResult max_separated(const SampledSpace& space, const System& system,
                            std::size_t n, double eps, const PackOptions& opts) {
  if (n == 0) throw RangeError("max_separated: n must be >= 1");
  if (!(eps > 0.0)) throw RangeError("max_separated: eps must be positive");
  const Metric metric = opts.metric_override ? opts.metric_override : space.metric();

  PackingResult r;
  r.n = n;
  r.eps = eps;

  if (!opts.force_scan) {
    if (auto shift = detect_shift(system, metric)) {
      // count of cylinder classes of the full (untruncated) system
      ShiftStructure bound = *shift;
      const bool materialized = space.size() > 0 && bind_shift_space(bound, space);
      const CylinderCount c = cylinder_count(bound, n, eps, DepthMode::Separation);
      r.count = c.count;
      r.log_count = c.log_count;
      r.method = PackMethod::Exact;
      r.algorithm = "cylinder";
      if (materialized && c.materializable)
        r.selected = cylinder_representatives(bound, space, n, eps, DepthMode::Separation);
      return r;
    }
    if (auto setup = interval_setup(space, system, metric, n)) {
      r.count = interval_packing_count(*setup, eps);
      r.log_count = std::log(double(r.count));
      r.method = PackMethod::Exact;
      r.algorithm = "interval";
      return r;
    }
  }

  if (space.size() == 0)
    throw UsageError("max_separated: no closed form applies and the space has no points");

  PairEvaluator ev(space, system, metric, n);
  if (opts.mode == PackMethod::Exact) {
    if (space.size() > 20)
      throw ResourceError("max_separated: exact mode limited to 20 points, have " +
                          std::to_string(space.size()));
    r.selected = exact_separated(space, ev, eps);
    r.method = PackMethod::Exact;
    r.algorithm = "max_clique";
  } else {
    r.selected = greedy_separated_scan(space, ev, eps);
    r.method = PackMethod::Greedy;
    r.algorithm = "lattice_greedy";
  }
  r.count = r.selected.size();
  r.log_count = std::log(double(r.count));
  return r;
}

PackingResult min_spanning(const SampledSpace& space, const System& system,
                           std::size_t n, double eps, const PackOptions& opts) {
  if (n == 0) throw RangeError("min_spanning: n must be >= 1");
  if (!(eps > 0.0)) throw RangeError("min_spanning: eps must be positive");
  const Metric metric = opts.metric_override ? opts.metric_override : space.metric();

  PackingResult r;
  r.n = n;
  r.eps = eps;

  if (!opts.force_scan) {
    if (auto shift = detect_shift(system, metric)) {
      // spanning balls are cylinders, so they partition the space and the
      // minimal subcover is the class count
      ShiftStructure bound = *shift;
      const bool materialized = space.size() > 0 && bind_shift_space(bound, space);
      const CylinderCount c = cylinder_count(bound, n, eps, DepthMode::Spanning);
      r.count = c.count;
      r.log_count = c.log_count;
      r.method = PackMethod::Exact;
      r.algorithm = "cylinder";
      if (materialized && c.materializable)
        r.selected = cylinder_representatives(bound, space, n, eps, DepthMode::Spanning);
      return r;
    }
    if (auto setup = interval_setup(space, system, metric, n)) {
      r.count = interval_covering_count(*setup, eps);
      r.log_count = std::log(double(r.count));
      r.method = PackMethod::Exact;
      r.algorithm = "interval";
      return r;
    }
  }

  if (space.size() == 0)
    throw UsageError("min_spanning: no closed form applies and the space has no points");

  PairEvaluator ev(space, system, metric, n);
  const BallFamily fam = enumerate_balls(space, ev, eps);
  r.selected = greedy_ball_cover(space, fam);
  r.count = r.selected.size();
  r.method = PackMethod::Greedy;
  r.algorithm = "greedy_cover";

  // exact minimal subcover when the ball family is small
  if (space.size() <= 24) {
    std::vector<MemberSet> members;
    members.reserve(fam.balls.size());
    for (const auto& b : fam.balls) members.push_back(b);
    const Cover balls = Cover::from_members(space.size(), std::move(members));
    const SubcoverCount exact = min_subcover_cardinality(balls);
    if (exact.exact) {
      if (exact.value() == r.count) {
        r.method = PackMethod::Exact;  // greedy witness certified optimal
      } else {
        r.count = exact.value();
        r.selected.clear();
        r.method = PackMethod::Exact;
      }
      r.algorithm = "exact_cover";
    }
  }
  r.log_count = std::log(double(r.count));
  return r;
}

SandwichReport sandwich_check(const SampledSpace& space, const System& system,
                              std::size_t n, double eps) {
  const Metric metric = space.metric();
  SandwichReport rep;

  if (auto shift = detect_shift(system, metric)) {
    rep.cover_at_eps = cylinder_count(*shift, n, eps, DepthMode::Spanning).count;
    rep.separated = cylinder_count(*shift, n, eps, DepthMode::Separation).count;
    rep.cover_at_half_eps = cylinder_count(*shift, n, eps / 2.0, DepthMode::Spanning).count;
    rep.holds = rep.cover_at_eps <= rep.separated && rep.separated <= rep.cover_at_half_eps;
    return rep;
  }

  if (space.size() > 20)
    throw ResourceError("sandwich_check: exact paths limited to 20 points, have " +
                        std::to_string(space.size()));
  PairEvaluator ev(space, system, metric, n);
  auto exact_cover_count = [&](double radius) -> unsigned long long {
    std::vector<MemberSet> members;
    for (std::size_t i = 0; i < space.size(); ++i) {
      MemberSet ball;
      for (std::size_t j = 0; j < space.size(); ++j)
        if (ev.within(i, j, radius)) ball.push_back(std::uint32_t(j));
      members.push_back(std::move(ball));
    }
    const SubcoverCount c = min_subcover_cardinality(
        Cover::from_members(space.size(), std::move(members)));
    if (!c.exact)
      throw ResourceError("sandwich_check: subcover count not exact on this instance");
    return c.value();
  };
  rep.cover_at_eps = exact_cover_count(eps);
  rep.separated = exact_separated(space, ev, eps).size();
  rep.cover_at_half_eps = exact_cover_count(eps / 2.0);
  rep.holds = rep.cover_at_eps <= rep.separated && rep.separated <= rep.cover_at_half_eps;
  return rep;
}

// ---------------------------------------------------------------------------
// growth-rate estimator
// ---------------------------------------------------------------------------

EntropyEstimate bowen_entropy_estimate(const SampledSpace& space, const System& system,
                                       const std::vector<double>& eps_grid,
                                       const std::vector<std::size_t>& n_range,
                                       const EstimateOptions& opts) {
  if (n_range.size() < 4)
    throw RangeError("bowen_entropy_estimate: n_range needs at least 4 entries");
  if (!std::is_sorted(n_range.begin(), n_range.end()))
    throw RangeError("bowen_entropy_estimate: n_range must be ascending");
  const Metric metric = opts.metric_override ? opts.metric_override : space.metric();
  for (double eps : eps_grid)
    if (!(eps > 0.0) || eps > metric.diameter() + 1e-12)
      throw RangeError("bowen_entropy_estimate: eps " + std::to_string(eps) +
                       " outside (0, diameter]");

  EntropyEstimate est;
  est.system_name = system.name();
  est.metric_name = metric.name();
  est.cells.resize(eps_grid.size() * n_range.size());

  PackOptions pack;
  pack.force_scan = opts.force_scan;
  pack.metric_override = metric;

  std::mutex hook_mutex;
  parallel_for(
      est.cells.size(),
      [&](std::size_t job) {
        const std::size_t ei = job / n_range.size();
        const std::size_t ni = job % n_range.size();
        GridCell& cell = est.cells[job];
        cell.eps = eps_grid[ei];
        cell.n = n_range[ni];
        if (opts.preload && opts.preload(cell.eps, cell.n, cell)) return;
        const PackingResult r =
            max_separated(space, system, n_range[ni], eps_grid[ei], pack);
        cell.count = r.count;
        cell.log_count = r.log_count;
        cell.method = r.method;
        cell.algorithm = r.algorithm;
        // a greedy count near the grid size says the sample ran out of
        // resolution, not that the growth stopped
        cell.resolution_limited =
            r.method == PackMethod::Greedy &&
            double(r.count) > opts.resolution_fraction * double(space.size());
        if (opts.on_cell) {
          std::lock_guard<std::mutex> lock(hook_mutex);
          opts.on_cell(cell);
        }
      },
      opts.parallel);

  for (std::size_t ei = 0; ei < eps_grid.size(); ++ei) {
    EpsRate rate;
    rate.eps = eps_grid[ei];
    std::vector<std::size_t> valid;
    for (std::size_t ni = 0; ni < n_range.size(); ++ni) {
      if (!est.cells[ei * n_range.size() + ni].resolution_limited) valid.push_back(ni);
    }
    rate.resolution_limited = valid.size() != n_range.size();
    if (valid.empty())
      for (std::size_t ni = 0; ni < n_range.size(); ++ni) valid.push_back(ni);

    auto [lo, hi] = trailing_half(valid.size());
    rate.window_lo = valid[lo];
    rate.window_hi = valid[hi - 1] + 1;
    std::vector<double> xs, ys;
    unsigned long long wmin = std::numeric_limits<unsigned long long>::max(), wmax = 0;
    for (std::size_t w = lo; w < hi; ++w) {
      const GridCell& cell = est.cells[ei * n_range.size() + valid[w]];
      xs.push_back(double(cell.n));
      ys.push_back(cell.log_count);
      wmin = std::min(wmin, cell.count);
      wmax = std::max(wmax, cell.count);
    }
    const LineFit fit = fit_line(xs, ys);
    rate.rate_window = fit.slope;
    rate.residual = fit.residual_rms;
    rate.saturated = wmin == wmax;
    if (rate.saturated) rate.rate_window = 0.0;

    const GridCell& last = est.cells[ei * n_range.size() + valid.back()];
    rate.rate_terminal = last.log_count / double(last.n);
    const double mag = std::max(std::abs(rate.rate_window), std::abs(rate.rate_terminal));
    rate.disagreement =
        mag > 1e-6 && std::abs(rate.rate_window - rate.rate_terminal) > 0.10 * mag;

    if (opts.with_sandwich &&
        (space.size() <= 20000 || detect_shift(system, metric) ||
         space.kind() == GridKind::ContinuumInterval)) {
      try {
        const PackingResult lo_span =
            min_spanning(space, system, last.n, rate.eps, pack);
        const PackingResult hi_span =
            min_spanning(space, system, last.n, rate.eps / 2.0, pack);
        rate.sandwich_recorded = true;
        rate.sandwich_log_lo = lo_span.log_count;
        rate.sandwich_log_hi = hi_span.log_count;
      } catch (const Error&) {
        rate.sandwich_recorded = false;
      }
    }
    est.per_eps.push_back(rate);
  }

  est.estimate = 0.0;
  for (const auto& r : est.per_eps) est.estimate = std::max(est.estimate, r.rate_window);
  return est;
}

void write_grid_csv(std::ostream& os, const EntropyEstimate& e) {
  os << "system,metric,eps,n,count,method,log_count,rate_window\n";
  char buf[512];
  for (const auto& cell : e.cells) {
    double rate = 0.0;
    for (const auto& r : e.per_eps)
      if (r.eps == cell.eps) rate = r.rate_window;
    std::snprintf(buf, sizeof(buf), "%s,%s,%.6g,%zu,%llu,%s,%.10g,%.10g\n",
                  e.system_name.c_str(), e.metric_name.c_str(), cell.eps, cell.n,
                  cell.count, cell.method == PackMethod::Exact ? "exact" : "greedy",
                  cell.log_count, rate);
    os << buf;
  }
}

}  // namespace entlab
