#pragma once

#include <cstddef>
#include <span>
#include <utility>

namespace fracspde {

/// Straight-line fit y = intercept + exponent * x over a window of x.
struct FitReport {
  double exponent = 0.0;
  double intercept = 0.0;
  std::pair<double, double> window{0.0, 0.0};
  double r_squared = 0.0;
  double std_error = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares. `sigma_y`, when given, holds per-point standard
/// errors of y; they are propagated into the slope error and added in
/// quadrature to the residual-based error.
FitReport fit_line(std::span<const double> x, std::span<const double> y,
                   std::span<const double> sigma_y = {});

}  // namespace fracspde
