#include "entlab/metric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "entlab/system.hpp"

namespace entlab {

double coordinate_weight(WeightScheme scheme, std::size_t j) {
  switch (scheme) {
    case WeightScheme::Harmonic:
      return 1.0 / double(j);
    case WeightScheme::Geometric:
      return std::ldexp(1.0, -int(j));
  }
  return 0.0;
}

std::size_t truncation_depth(double eps, DepthMode mode, WeightScheme scheme) {
  if (!(eps > 0.0) || eps > 1.0)
    throw RangeError("truncation_depth: eps must lie in (0, 1], got " + std::to_string(eps));
  // Scan outward from the floating-point estimate so boundary cases such as
  // eps = 1/10 resolve by the exact comparison, not by rounding.
  const bool strict = (mode == DepthMode::Separation);
  auto keeps = [&](std::size_t j) {
    const double w = coordinate_weight(scheme, j);
    return strict ? (w > eps) : (w >= eps);
  };
  std::size_t k = 1;
  if (scheme == WeightScheme::Harmonic) {
    k = std::max<std::size_t>(1, std::size_t(std::floor(1.0 / eps)));
  } else {
    k = std::max<std::size_t>(1, std::size_t(std::floor(std::log2(1.0 / eps))) + 1);
  }
  while (k > 1 && !keeps(k)) --k;
  while (keeps(k + 1)) ++k;
  if (!keeps(k)) return 0;  // even the first coordinate cannot decide
  return k;
}

namespace {

constexpr double kPi = std::numbers::pi_v<double>;

double coord_distance(SequenceCoord c, double a, double b) {
  switch (c) {
    case SequenceCoord::Discrete:
      return a == b ? 0.0 : 1.0;
    case SequenceCoord::CappedAbs:
      return std::min(std::abs(a - b), 1.0);
    case SequenceCoord::Arctan:
      return std::abs(std::atan(a) - std::atan(b)) / kPi;
  }
  return 0.0;
}

class SequenceMetric final : public MetricBase {
public:
  SequenceMetric(SequenceCoord coord, WeightScheme scheme) : coord_(coord), scheme_(scheme) {}

  double eval(StateView a, StateView b) const override {
    if (a.size() != b.size())
      throw DimensionError("sequence metric: prefix lengths differ (" +
                           std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    double best = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
      const double w = coordinate_weight(scheme_, j + 1);
      if (w <= best) break;  // weights decrease; nothing deeper can win
      const double d = w * coord_distance(coord_, a[j], b[j]);
      if (d > best) best = d;
    }
    return best;
  }

  MetricResult eval_with_bound(StateView a, StateView b) const override {
    return {eval(a, b), coordinate_weight(scheme_, a.size() + 1)};
  }

  double diameter() const override { return coordinate_weight(scheme_, 1); }

  std::string name() const override {
    std::string c = coord_ == SequenceCoord::Discrete  ? "discrete"
                    : coord_ == SequenceCoord::CappedAbs ? "capped_abs"
                                                         : "arctan";
    return "seq_" + c + (scheme_ == WeightScheme::Harmonic ? "_1/j" : "_2^-j");
  }

  SequenceCoord coord() const { return coord_; }
  WeightScheme scheme() const { return scheme_; }

private:
  SequenceCoord coord_;
  WeightScheme scheme_;
};

class TorusSupMetric final : public MetricBase {
public:
  double eval(StateView a, StateView b) const override {
    if (a.size() != b.size()) throw DimensionError("torus metric: dimension mismatch");
    double best = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      double d = std::abs(a[i] - b[i]);
      d -= std::floor(d);  // displacements may exceed one full turn
      d = std::min(d, 1.0 - d);
      best = std::max(best, d);
    }
    return best;
  }
  double diameter() const override { return 0.5; }
  std::string name() const override { return "torus_sup"; }
};

class WindowMetric final : public MetricBase {
public:
  explicit WindowMetric(double cap) : cap_(cap) {
    if (!(cap > 0.0)) throw ValidationError("window metric: cap must be positive");
  }
  double eval(StateView a, StateView b) const override {
    if (a.size() != b.size()) throw DimensionError("window metric: dimension mismatch");
    double best = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) best = std::max(best, std::abs(a[i] - b[i]));
    return std::min(best, cap_);
  }
  double diameter() const override { return cap_; }
  std::string name() const override { return "window"; }
  double cap() const { return cap_; }

private:
  double cap_;
};

class ArctanLineMetric final : public MetricBase {
public:
  double eval(StateView a, StateView b) const override {
    if (a.size() != 1 || b.size() != 1) throw DimensionError("arctan metric is one-dimensional");
    return std::abs(std::atan(a[0]) - std::atan(b[0])) / kPi;
  }
  double diameter() const override { return 1.0; }
  std::string name() const override { return "arctan"; }
};

class EuclideanCappedMetric final : public MetricBase {
public:
  explicit EuclideanCappedMetric(double cap) : cap_(cap) {}
  double eval(StateView a, StateView b) const override {
    if (a.size() != b.size()) throw DimensionError("euclidean metric: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::min(std::sqrt(s), cap_);
  }
  double diameter() const override { return cap_; }
  std::string name() const override { return "euclidean"; }

private:
  double cap_;
};

class FactorProductMetric final : public MetricBase {
public:
  FactorProductMetric(std::vector<Metric> factors, std::vector<std::size_t> dims)
      : factors_(std::move(factors)), dims_(std::move(dims)) {
    if (factors_.size() != dims_.size())
      throw ValidationError("factor product metric: factor/dim count mismatch");
    for (const auto& f : factors_)
      if (f.diameter() > 1.0 + 1e-12)
        throw ValidationError("factor product metric: factor '" + f.name() +
                              "' has diameter above 1");
    offsets_.reserve(dims_.size() + 1);
    offsets_.push_back(0);
    for (std::size_t d : dims_) offsets_.push_back(offsets_.back() + d);
  }

  double eval(StateView a, StateView b) const override {
    if (a.size() != offsets_.back() || b.size() != offsets_.back())
      throw DimensionError("factor product metric: tuple length mismatch");
    double best = 0.0;
    for (std::size_t f = 0; f < factors_.size(); ++f) {
      const double w = 1.0 / double(f + 1);
      if (w <= best) break;
      const double d = w * factors_[f](slice(a, f), slice(b, f));
      if (d > best) best = d;
    }
    return best;
  }

  MetricResult eval_with_bound(StateView a, StateView b) const override {
    return {eval(a, b), 1.0 / double(factors_.size() + 1)};
  }

  double diameter() const override { return factors_.empty() ? 0.0 : factors_[0].diameter(); }

  std::string name() const override {
    return "product_1/j(" + std::to_string(factors_.size()) + ")";
  }

  const std::vector<Metric>& factors() const { return factors_; }
  const std::vector<std::size_t>& dims() const { return dims_; }

private:
  StateView slice(StateView x, std::size_t f) const {
    return x.subspan(offsets_[f], dims_[f]);
  }

  std::vector<Metric> factors_;
  std::vector<std::size_t> dims_;
  std::vector<std::size_t> offsets_;
};

}  // namespace

std::optional<SequenceMetricInfo> sequence_metric_info(const Metric& m) {
  if (auto* p = dynamic_cast<const SequenceMetric*>(m.impl()))
    return SequenceMetricInfo{p->coord(), p->scheme()};
  return std::nullopt;
}

std::optional<FactorProductInfo> factor_product_info(const Metric& m) {
  if (auto* p = dynamic_cast<const FactorProductMetric*>(m.impl()))
    return FactorProductInfo{p->factors(), p->dims()};
  return std::nullopt;
}

std::optional<double> window_metric_cap(const Metric& m) {
  if (auto* p = dynamic_cast<const WindowMetric*>(m.impl())) return p->cap();
  return std::nullopt;
}

namespace metrics {

Metric sequence(SequenceCoord coord, WeightScheme scheme) {
  return Metric(std::make_shared<SequenceMetric>(coord, scheme));
}
Metric torus_sup() { return Metric(std::make_shared<TorusSupMetric>()); }
Metric window(double cap) { return Metric(std::make_shared<WindowMetric>(cap)); }
Metric arctan_line() { return Metric(std::make_shared<ArctanLineMetric>()); }
Metric euclidean_capped(double cap) {
  return Metric(std::make_shared<EuclideanCappedMetric>(cap));
}
Metric factor_product(std::vector<Metric> factors, std::vector<std::size_t> factor_dims) {
  return Metric(std::make_shared<FactorProductMetric>(std::move(factors), std::move(factor_dims)));
}

}  // namespace metrics

IteratedMetric::IteratedMetric(Metric base, const System& system, std::size_t horizon)
    : base_(std::move(base)), system_(&system), horizon_(horizon) {
  if (horizon_ == 0) throw RangeError("iterated metric: horizon must be >= 1");
}

double IteratedMetric::eval(StateView x, StateView y) const {
  State a = to_state(x), b = to_state(y);
  double best = base_(a, b);
  for (std::size_t j = 1; j < horizon_; ++j) {
    a = system_->step(a);
    b = system_->step(b);
    best = std::max(best, base_(a, b));
  }
  return best;
}

bool IteratedMetric::exceeds(StateView x, StateView y, double threshold) const {
  State a = to_state(x), b = to_state(y);
  if (base_(a, b) > threshold) return true;
  for (std::size_t j = 1; j < horizon_; ++j) {
    a = system_->step(a);
    b = system_->step(b);
    if (base_(a, b) > threshold) return true;
  }
  return false;
}

}  // namespace entlab
