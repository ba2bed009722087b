#include "entlab/fit.hpp"

#include <cmath>

namespace entlab {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit fit;
  fit.points = std::min(x.size(), y.size());
  if (fit.points == 0) return fit;

  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < fit.points; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= double(fit.points);
  my /= double(fit.points);

  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < fit.points; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (fit.points < 2 || sxx == 0.0) {
    fit.intercept = my;
    return fit;
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;

  double se = 0.0;
  for (std::size_t i = 0; i < fit.points; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    se += r * r;
  }
  fit.residual_rms = std::sqrt(se / double(fit.points));
  return fit;
}

std::pair<std::size_t, std::size_t> trailing_half(std::size_t count) {
  return {count / 2, count};
}

}  // namespace entlab
