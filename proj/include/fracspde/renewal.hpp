#pragma once

#include <vector>

#include "fracspde/fit.hpp"
#include "fracspde/series.hpp"

namespace fracspde {

/// f(t) = c1 + kappa int_0^t (t-s)^{rho-1} f(s) ds, and the inequality versions of it.
struct RenewalProblem {
  double c1 = 1.0;
  double kappa = 1.0;
  double rho = 1.0;

  /// kappa = 0 is accepted (the trivial equation f = c1).
  void validate() const;
};

/// c1 E_rho(Gamma(rho) kappa t^rho), the exact solution of the equality.
double resolvent_series(const RenewalProblem& p, double t);
double log_resolvent_series(const RenewalProblem& p, double t);

struct VolterraSolution {
  std::vector<double> t;
  std::vector<double> f;
  /// Relative change of f(t_end) when the step count is doubled.
  double doubling_change = 0.0;
  /// false when doubling_change exceeds 1%.
  bool converged = true;
};

/// Product integration on a uniform grid: f held at its left value on each
/// panel, the singular weight integrated exactly. The error is O(1/n_steps)
/// with a constant that grows quickly with the rate (Gamma(rho) kappa)^{1/rho}.
VolterraSolution solve_volterra(const RenewalProblem& p, double t_end, int n_steps);

/// T* = (e/rho) (Gamma(rho) kappa)^{-1/rho}.
double renewal_threshold(const RenewalProblem& p);

/// Slope of log resolvent_series over [T*, 2T*]. The exact asymptotic rate is
/// (Gamma(rho) kappa)^{1/rho}.
FitReport envelope_rate(const RenewalProblem& p, int samples = 64);

/// g^2 sum_k (c_geom lam l_sigma)^{2k} (t/k)^{k(alpha-beta)/alpha}, k = 0 term 1.
/// beta = 1 stands for white noise in d = 1.
struct ChaosSeriesParams {
  double g = 1.0;
  double lam = 1.0;
  double l_sigma = 1.0;
  double c_geom = 1.0;
  double alpha = 2.0;
  double beta = 1.0;

  /// lam = 0 is accepted.
  void validate() const;
  double rho() const { return (alpha - beta) / alpha; }
};

SeriesValue chaos_lower_bound(const ChaosSeriesParams& p, double t, double tol = 1e-12);

/// Slope of log chaos_lower_bound against t over [t_lo, t_hi].
FitReport chaos_growth_rate(const ChaosSeriesParams& p, double t_lo, double t_hi, int samples = 32);

}  // namespace fracspde
