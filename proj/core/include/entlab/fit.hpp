#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace entlab {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
  std::size_t points = 0;
};

// Least-squares line through (x, y). With fewer than two points the slope is 0
// and the intercept is the mean.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Index range [lo, count) of the trailing half of an ascending grid; for odd
// counts the window gets the extra entry.
std::pair<std::size_t, std::size_t> trailing_half(std::size_t count);

inline double nats_to_bits(double nats) { return nats / 0.6931471805599453; }

}  // namespace entlab
