#include "fracspde/fit.hpp"

#include <algorithm>
#include <cmath>

#include "fracspde/error.hpp"

namespace fracspde {

FitReport fit_line(std::span<const double> x, std::span<const double> y, std::span<const double> sigma_y) {
  if (x.size() != y.size()) throw InvalidArgument("fit_line: x and y differ in length");
  if (!sigma_y.empty() && sigma_y.size() != x.size()) throw InvalidArgument("fit_line: sigma_y has the wrong length");
  if (x.size() < 2) throw InvalidArgument("fit_line: need at least two points");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw InvalidArgument("fit_line: non-finite data");

  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw InvalidArgument("fit_line: window is degenerate (all x equal)");

  FitReport r;
  r.points = x.size();
  r.exponent = sxy / sxx;
  r.intercept = my - r.exponent * mx;
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  r.window = {*lo, *hi};

  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - r.intercept - r.exponent * x[i];
    sse += e * e;
  }
  r.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
  double var = x.size() > 2 ? sse / (n - 2.0) / sxx : 0.0;
  if (!sigma_y.empty()) {
    double v = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double w = (x[i] - mx) / sxx;
      v += w * w * sigma_y[i] * sigma_y[i];
    }
    var += v;
  }
  r.std_error = std::sqrt(var);
  return r;
}

}  // namespace fracspde
