#pragma once

#include <span>
#include <vector>

namespace fracspde {

struct PowerSumParams {
  double rho = 1.0;
  double b = 1.0;

  void validate() const;
};

/// A positive series summed in log space. `log_value` is authoritative: `value`
/// is exp(log_value) and overflows to +inf for large arguments.
struct SeriesValue {
  double value = 0.0;
  double log_value = 0.0;
  long terms_used = 0;
  /// Certified bound on the omitted remainder, relative to value.
  double truncation_bound = 0.0;
};

/// sum_{j>=0} b^j / Gamma(j rho + 1). Throws ConvergenceError (best partial sum
/// attached) if the term budget runs out before the remainder certificate.
SeriesValue mittag_leffler_sum(double rho, double b, double tol = 1e-12);

/// 1 + sum_{j>=1} (b / j^rho)^j.
SeriesValue power_sum(double rho, double b, double tol = 1e-12);
SeriesValue power_sum(const PowerSumParams& p, double tol = 1e-12);

/// min over the grid of log(power_sum(rho, b)) / b^{1/rho}; every b must be
/// at least (e/rho)^rho.
double fit_lower_bound_constant(double rho, std::span<const double> b_grid);

/// Constants of  E_rho(b) <= c1 exp(c2 b^{1/rho})  on a grid: c2 is the
/// least-squares slope of log E_rho against b^{1/rho}, c1 the smallest factor
/// that makes the bound hold at every grid point.
struct UpperBoundFit {
  double c1 = 0.0;
  double c2 = 0.0;
};
UpperBoundFit fit_upper_bound_constants(double rho, std::span<const double> b_grid);

struct IteratedIntegral {
  /// k-fold simplex integral of [(t-s_1)(s_1-s_2)...(s_{k-1}-s_k)]^{-1/alpha}
  /// from the Beta chain.
  double lhs = 0.0;
  /// (t/k)^{k(alpha-1)/alpha}
  double rhs_scaled = 0.0;
  /// lhs^{1/k} / (t/k)^{(alpha-1)/alpha}
  double ratio = 0.0;
  /// Independent nested quadrature of the same integral for k <= 3, NaN otherwise.
  double lhs_quadrature = 0.0;
};

/// 1 <= k <= 5, alpha > 1, t > 0.
IteratedIntegral iterated_integral_lower_check(double alpha, double t, int k);

}  // namespace fracspde
