#include "fractint/fit.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "fractint/error.hpp"

namespace fractint {

DecayFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("fit inputs differ in length");
  if (x.size() < 4) throw InvalidArgument(fmt::format("fit needs at least 4 scales, got {}", x.size()));
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw InvalidArgument("fit input is not finite");
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw InvalidArgument("fit scales are all equal");
  DecayFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    f.residual = std::max(f.residual, std::abs(y[i] - (f.intercept + f.slope * x[i])));
  }
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  f.scale_lo = std::exp2(*lo);
  f.scale_hi = std::exp2(*hi);
  f.n_points = static_cast<int>(x.size());
  return f;
}

}  // namespace fractint
