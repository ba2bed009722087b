#include "entlab/space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace entlab {

namespace {

constexpr double kPi = std::numbers::pi_v<double>;

// m^L with an overflow/budget guard; returns 0 on overflow.
std::size_t checked_pow(std::size_t m, std::size_t L) {
  std::size_t v = 1;
  for (std::size_t i = 0; i < L; ++i) {
    if (v > std::numeric_limits<std::size_t>::max() / m) return 0;
    v *= m;
  }
  return v;
}

void require_budget(std::size_t needed, std::size_t budget, const char* what) {
  if (needed == 0 || needed > budget)
    throw ResourceError(std::string("sample_grid: ") + what + " needs " +
                        (needed == 0 ? std::string("more than 2^64")
                                     : std::to_string(needed)) +
                        " points, budget is " + std::to_string(budget));
}

}  // namespace

bool SampledSpace::all_core() const {
  if (core_.empty()) return true;
  return std::all_of(core_.begin(), core_.end(), [](std::uint8_t f) { return f != 0; });
}

std::optional<SampledSpace::WordsInfo> SampledSpace::words_info() const {
  if (kind_ != GridKind::Words) return std::nullopt;
  return words_;
}

std::optional<std::vector<SampledSpace::WordsInfo>> SampledSpace::product_words_info() const {
  if (kind_ != GridKind::ProductWords) return std::nullopt;
  return product_words_;
}

std::optional<SampledSpace::TorusInfo> SampledSpace::torus_info() const {
  if (kind_ != GridKind::TorusLattice) return std::nullopt;
  return torus_;
}

std::optional<SampledSpace::LineInfo> SampledSpace::line_info() const {
  if (kind_ != GridKind::ArctanLine && kind_ != GridKind::IntervalLine &&
      kind_ != GridKind::ContinuumInterval)
    return std::nullopt;
  return line_;
}

std::size_t SampledSpace::locate(StateView x) const {
  switch (kind_) {
    case GridKind::Words: {
      std::size_t idx = 0;
      for (std::size_t j = 0; j < words_.length; ++j) {
        double v = j < x.size() ? x[j] : 0.0;
        long long s = llround(v);
        s = std::clamp<long long>(s, 0, (long long)words_.alphabet - 1);
        idx = idx * words_.alphabet + std::size_t(s);
      }
      return idx;
    }
    case GridKind::ProductWords: {
      std::size_t idx = 0, off = 0;
      for (const auto& w : product_words_) {
        for (std::size_t j = 0; j < w.length; ++j) {
          double v = off + j < x.size() ? x[off + j] : 0.0;
          long long s = llround(v);
          s = std::clamp<long long>(s, 0, (long long)w.alphabet - 1);
          idx = idx * w.alphabet + std::size_t(s);
        }
        off += w.length;
      }
      return idx;
    }
    case GridKind::TorusLattice: {
      const std::size_t R = torus_.resolution;
      std::size_t idx = 0;
      for (std::size_t i = 0; i < torus_.dims; ++i) {
        double v = x[i] - std::floor(x[i]);
        long long c = llround(v * double(R));
        idx = idx * R + std::size_t(c % (long long)R);
      }
      return idx;
    }
    case GridKind::ArctanLine: {
      const double lo = std::atan(-line_.halfwidth);
      const double hi = std::atan(line_.halfwidth);
      const double t = (std::atan(x[0]) - lo) / (hi - lo) * double(line_.count - 1);
      long long c = llround(t);
      return std::size_t(std::clamp<long long>(c, 0, (long long)line_.count - 1));
    }
    case GridKind::IntervalLine: {
      const double t =
          (x[0] + line_.halfwidth) / (2.0 * line_.halfwidth) * double(line_.count - 1);
      long long c = llround(t);
      return std::size_t(std::clamp<long long>(c, 0, (long long)line_.count - 1));
    }
    case GridKind::Explicit: {
      std::size_t best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < size_; ++i) {
        const double d = metric_(point(i), x);
        if (d < bd) {
          bd = d;
          best = i;
        }
      }
      return best;
    }
    case GridKind::ContinuumInterval:
      throw UsageError("locate: continuum interval has no sample points");
  }
  throw UsageError("locate: unknown grid kind");
}

SampledSpace SampledSpace::explicit_points(std::vector<State> points, Metric metric,
                                           double mesh,
                                           std::vector<std::uint8_t> core_flags) {
  if (points.empty()) throw ValidationError("explicit_points: empty point list");
  SampledSpace s;
  s.kind_ = GridKind::Explicit;
  s.size_ = points.size();
  s.dim_ = points[0].size();
  s.mesh_ = mesh;
  s.metric_ = std::move(metric);
  s.core_ = std::move(core_flags);
  if (!s.core_.empty() && s.core_.size() != s.size_)
    throw ValidationError("explicit_points: core flag count mismatch");
  s.coords_.reserve(s.size_ * s.dim_);
  for (const auto& p : points) {
    if (p.size() != s.dim_) throw DimensionError("explicit_points: ragged point list");
    s.coords_.insert(s.coords_.end(), p.begin(), p.end());
  }
  return s;
}

SampledSpace SampledSpace::continuum_interval(double halfwidth, Metric metric) {
  if (!(halfwidth > 0.0)) throw ValidationError("continuum_interval: halfwidth must be positive");
  SampledSpace s;
  s.kind_ = GridKind::ContinuumInterval;
  s.size_ = 0;
  s.dim_ = 1;
  s.mesh_ = 0.0;
  s.metric_ = std::move(metric);
  s.line_ = {halfwidth, 0};
  return s;
}

namespace {

void fill_words(SampledSpace::WordsInfo w, std::vector<double>& coords) {
  // Lexicographic enumeration, first symbol most significant.
  const std::size_t total = checked_pow(w.alphabet, w.length);
  coords.reserve(coords.size() + total * w.length);
  std::vector<std::size_t> digits(w.length, 0);
  for (std::size_t i = 0; i < total; ++i) {
    for (std::size_t j = 0; j < w.length; ++j) coords.push_back(double(digits[j]));
    for (std::size_t j = w.length; j-- > 0;) {
      if (++digits[j] < w.alphabet) break;
      digits[j] = 0;
    }
  }
}

}  // namespace

SampledSpace sample_grid(const System& system, double delta, const GridOptions& options) {
  if (delta < 0.0) throw RangeError("sample_grid: delta must be nonnegative");

  SampledSpace s;
  s.metric_ = system.canonical_metric();

  switch (system.kind()) {
    case System::Kind::FullShift: {
      std::size_t L = options.truncation;
      if (L == 0) {
        if (!(delta > 0.0)) throw RangeError("sample_grid: need delta > 0 or a truncation");
        L = std::size_t(std::ceil(1.0 / delta)) - 1;  // tail weight 1/(L+1) <= delta
        L = std::max<std::size_t>(L, 1);
      }
      const std::size_t m = system.alphabet();
      const std::size_t total = checked_pow(m, L);
      require_budget(total, options.max_points, "word lattice");
      s.kind_ = GridKind::Words;
      s.words_ = {m, L};
      s.size_ = total;
      s.dim_ = L;
      s.mesh_ = 1.0 / double(L + 1);
      fill_words(s.words_, s.coords_);
      return s;
    }
    case System::Kind::Product: {
      const auto& factors = system.factors();
      const auto& dims = system.factor_dims();
      std::size_t total = 1, dim = 0;
      double mesh = 0.0;
      s.product_words_.clear();
      for (std::size_t f = 0; f < factors.size(); ++f) {
        if (factors[f].kind() != System::Kind::FullShift)
          throw UsageError("sample_grid: only products of full shifts are gridded");
        const std::size_t Lf = dims[f];
        const std::size_t cnt = checked_pow(factors[f].alphabet(), Lf);
        if (cnt == 0 || total > options.max_points / cnt)
          require_budget(0, options.max_points, "product word lattice");
        total *= cnt;
        dim += Lf;
        mesh = std::max(mesh, (1.0 / double(f + 1)) * (1.0 / double(Lf + 1)));
        s.product_words_.push_back({factors[f].alphabet(), Lf});
      }
      require_budget(total, options.max_points, "product word lattice");
      if (delta > 0.0 && mesh > delta)
        throw ValidationError("sample_grid: factor truncations too shallow for delta");
      s.kind_ = GridKind::ProductWords;
      s.size_ = total;
      s.dim_ = dim;
      s.mesh_ = mesh;
      // Mixed-radix enumeration across factors, factor 1 most significant.
      s.coords_.reserve(total * dim);
      std::vector<std::vector<std::size_t>> digits;
      for (const auto& w : s.product_words_) digits.emplace_back(w.length, 0);
      for (std::size_t i = 0; i < total; ++i) {
        for (std::size_t f = 0; f < digits.size(); ++f)
          for (std::size_t j = 0; j < digits[f].size(); ++j)
            s.coords_.push_back(double(digits[f][j]));
        for (std::size_t f = digits.size(); f-- > 0;) {
          bool carried = true;
          const std::size_t m = s.product_words_[f].alphabet;
          for (std::size_t j = digits[f].size(); j-- > 0;) {
            if (++digits[f][j] < m) {
              carried = false;
              break;
            }
            digits[f][j] = 0;
          }
          if (!carried) break;
        }
      }
      return s;
    }
    case System::Kind::Torus: {
      if (!(delta > 0.0)) throw RangeError("sample_grid: need delta > 0");
      const std::size_t g = system.dim();
      const std::size_t R = std::max<std::size_t>(1, std::size_t(llround(1.0 / delta)));
      const std::size_t total = checked_pow(R, g);
      require_budget(total, options.max_points, "torus lattice");
      s.kind_ = GridKind::TorusLattice;
      s.torus_ = {g, R};
      s.size_ = total;
      s.dim_ = g;
      s.mesh_ = 1.0 / double(R);
      s.coords_.reserve(total * g);
      std::vector<std::size_t> idx(g, 0);
      for (std::size_t i = 0; i < total; ++i) {
        for (std::size_t c = 0; c < g; ++c) s.coords_.push_back(double(idx[c]) / double(R));
        for (std::size_t c = g; c-- > 0;) {
          if (++idx[c] < R) break;
          idx[c] = 0;
        }
      }
      return s;
    }
    case System::Kind::Linear: {
      if (!(delta > 0.0)) throw RangeError("sample_grid: need delta > 0");
      if (system.dim() != 1)
        throw UsageError("sample_grid: only one-dimensional linear maps are gridded");
      if (system.linear_metric_choice() == LinearMetric::Arctan) {
        const double W = options.core_halfwidth;
        const double lo = std::atan(-W), hi = std::atan(W);
        const double span = (hi - lo) / kPi;  // metric length of the core
        const std::size_t count = std::size_t(std::ceil(span / delta)) + 1;
        require_budget(count, options.max_points, "arctan lattice");
        s.kind_ = GridKind::ArctanLine;
        s.line_ = {W, count};
        s.size_ = count;
        s.dim_ = 1;
        s.mesh_ = delta;
        s.coords_.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
          const double theta = lo + (hi - lo) * double(i) / double(count - 1);
          s.coords_.push_back(std::tan(theta));
        }
      } else {
        const double W = system.window_halfwidth();
        const std::size_t count = std::size_t(std::ceil(W / delta)) + 1;
        require_budget(count, options.max_points, "interval lattice");
        s.kind_ = GridKind::IntervalLine;
        s.line_ = {W, count};
        s.size_ = count;
        s.dim_ = 1;
        s.mesh_ = delta;
        s.coords_.reserve(count);
        for (std::size_t i = 0; i < count; ++i)
          s.coords_.push_back(-W + 2.0 * W * double(i) / double(count - 1));
      }
      return s;
    }
    case System::Kind::RealShift: {
      if (!(delta > 0.0)) throw RangeError("sample_grid: need delta > 0");
      // Coordinate j (1-based) lives on [0,1] and only needs mesh j*delta.
      const std::size_t L = truncation_depth(delta, DepthMode::Spanning);
      std::vector<std::size_t> counts(L);
      std::size_t total = 1;
      for (std::size_t j = 1; j <= L; ++j) {
        counts[j - 1] = std::size_t(std::ceil(1.0 / (double(j) * delta))) + 1;
        if (total > options.max_points / counts[j - 1])
          require_budget(0, options.max_points, "real sequence lattice");
        total *= counts[j - 1];
      }
      require_budget(total, options.max_points, "real sequence lattice");
      s.kind_ = GridKind::Explicit;  // no lattice arithmetic; locate scans
      s.size_ = total;
      s.dim_ = L;
      s.mesh_ = delta;
      s.coords_.reserve(total * L);
      std::vector<std::size_t> idx(L, 0);
      for (std::size_t i = 0; i < total; ++i) {
        for (std::size_t j = 0; j < L; ++j)
          s.coords_.push_back(double(idx[j]) / double(counts[j] - 1));
        for (std::size_t j = L; j-- > 0;) {
          if (++idx[j] < counts[j]) break;
          idx[j] = 0;
        }
      }
      return s;
    }
    default:
      throw UsageError("sample_grid: system '" + system.name() +
                       "' has no bounded fundamental domain or declared core");
  }
}

DiscreteMap discretize(const SampledSpace& space, const System& system) {
  DiscreteMap map;
  map.next.resize(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    const State image = system.step(space.point(i));
    map.next[i] = std::uint32_t(space.locate(image));
  }
  return map;
}

OrbitTable::OrbitTable(const SampledSpace& space, const System& system, std::size_t horizon)
    : horizon_(horizon), dim_(space.dim()) {
  if (horizon == 0) throw RangeError("orbit table: horizon must be >= 1");
  data_.resize(space.size() * horizon_ * dim_);
  for (std::size_t i = 0; i < space.size(); ++i) {
    State cur = to_state(space.point(i));
    for (std::size_t j = 0; j < horizon_; ++j) {
      std::copy(cur.begin(), cur.end(), data_.begin() + (i * horizon_ + j) * dim_);
      if (j + 1 < horizon_) cur = system.step(cur);
    }
  }
}

}  // namespace entlab
