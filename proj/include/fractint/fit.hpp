#pragma once

#include <span>

namespace fractint {

// Straight-line fit of log2 data. residual is the largest absolute deviation
// of a point from the fitted line, in log2 units.
struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
  double scale_lo = 0.0;
  double scale_hi = 0.0;
  int n_points = 0;
};

// Unweighted least squares of y on x (both already in log2 units).
// scale_lo/hi are set to 2^min(x), 2^max(x). Needs at least 4 points.
DecayFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace fractint
