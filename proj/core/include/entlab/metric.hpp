#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "entlab/error.hpp"
#include "entlab/state.hpp"

namespace entlab {

class System;

// Coordinate weights of a product-type metric. Harmonic is the canonical
// 1/j rule; Geometric (2^-j) exists to compare two compactification metrics.
enum class WeightScheme { Harmonic, Geometric };

enum class DepthMode { Separation, Spanning };

// Weight of coordinate j (1-based).
double coordinate_weight(WeightScheme scheme, std::size_t j);

// Deepest coordinate that can still decide a radius-eps question:
// Separation keeps j with weight(j) > eps (strict, matching d_n > eps),
// Spanning keeps j with weight(j) >= eps (open balls d_n < eps).
// Requires 0 < eps <= 1.
std::size_t truncation_depth(double eps, DepthMode mode,
                             WeightScheme scheme = WeightScheme::Harmonic);

// Metric value on truncated representatives plus the certified bound on what
// the discarded tail could contribute.
struct MetricResult {
  double value = 0.0;
  double tail_bound = 0.0;
};

class MetricBase {
public:
  virtual ~MetricBase() = default;
  virtual double eval(StateView a, StateView b) const = 0;
  virtual MetricResult eval_with_bound(StateView a, StateView b) const {
    return {eval(a, b), 0.0};
  }
  virtual double diameter() const = 0;
  virtual std::string name() const = 0;
};

// Immutable value handle; evaluation is pure and thread-safe.
class Metric {
public:
  Metric() = default;
  explicit Metric(std::shared_ptr<const MetricBase> impl) : impl_(std::move(impl)) {}

  double operator()(StateView a, StateView b) const { return impl_->eval(a, b); }
  MetricResult eval_with_bound(StateView a, StateView b) const {
    return impl_->eval_with_bound(a, b);
  }
  double diameter() const { return impl_->diameter(); }
  std::string name() const { return impl_ ? impl_->name() : std::string("none"); }
  const MetricBase* impl() const { return impl_.get(); }
  explicit operator bool() const { return impl_ != nullptr; }

private:
  std::shared_ptr<const MetricBase> impl_;
};

enum class SequenceCoord {
  Discrete,   // 0/1 per slot (shift alphabets)
  CappedAbs,  // min(|a-b|, 1)
  Arctan      // |atan a - atan b| / pi
};

namespace metrics {

// sup_j weight(j) * coord(x_j, y_j) over the stored prefix. Diameter <= 1.
Metric sequence(SequenceCoord coord, WeightScheme scheme = WeightScheme::Harmonic);

// max_i min(|dx_i|, 1 - |dx_i|) on [0,1)^dims; diameter 1/2.
Metric torus_sup();

// min(sup-norm, cap); the bounded-window view of Euclidean space.
Metric window(double cap = 1.0);

// |atan x - atan y| / pi on the real line (1-d compactification restriction).
Metric arctan_line();

// Euclidean distance capped at `cap`; for explicitly listed point sets.
Metric euclidean_capped(double cap = 1.0);

// sup over factors f (1-based) of (1/f) * factor_f(slice_f(x), slice_f(y)).
// Every factor must have diameter <= 1; factor_dims gives the slice widths.
Metric factor_product(std::vector<Metric> factors, std::vector<std::size_t> factor_dims);

}  // namespace metrics

// Structure queries, used to select closed-form evaluation paths.
struct SequenceMetricInfo {
  SequenceCoord coord;
  WeightScheme scheme;
};
std::optional<SequenceMetricInfo> sequence_metric_info(const Metric& m);

struct FactorProductInfo {
  std::vector<Metric> factors;
  std::vector<std::size_t> dims;
};
std::optional<FactorProductInfo> factor_product_info(const Metric& m);

std::optional<double> window_metric_cap(const Metric& m);

// d_n(x, y) = max over 0 <= j < n of base(T^j x, T^j y). Orbits are computed
// exactly from the system's step map.
class IteratedMetric {
public:
  IteratedMetric(Metric base, const System& system, std::size_t horizon);

  double eval(StateView x, StateView y) const;
  // Early exit: true as soon as the running max exceeds `threshold`, in which
  // case the exact value is not computed ("> threshold").
  bool exceeds(StateView x, StateView y, double threshold) const;
  std::size_t horizon() const { return horizon_; }
  const Metric& base() const { return base_; }

private:
  Metric base_;
  const System* system_;
  std::size_t horizon_;
};

}  // namespace entlab
