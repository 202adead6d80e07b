#include "fracspde/renewal.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "fracspde/error.hpp"

namespace fracspde {

void RenewalProblem::validate() const {
  if (!(c1 > 0.0) || !std::isfinite(c1)) throw InvalidArgument("RenewalProblem: c1 must be positive");
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw InvalidArgument("RenewalProblem: kappa must be nonnegative");
  if (!(rho > 0.0 && rho <= 1.0)) {
    std::ostringstream os;
    os << "RenewalProblem: rho must lie in (0, 1], got " << rho;
    throw InvalidArgument(os.str());
  }
}

double log_resolvent_series(const RenewalProblem& p, double t) {
  p.validate();
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("resolvent_series: t must be nonnegative");
  const double b = std::tgamma(p.rho) * p.kappa * std::pow(t, p.rho);
  return std::log(p.c1) + mittag_leffler_sum(p.rho, b).log_value;
}

double resolvent_series(const RenewalProblem& p, double t) { return std::exp(log_resolvent_series(p, t)); }

namespace {

std::vector<double> product_integration(const RenewalProblem& p, double t_end, int n) {
  const double h = t_end / n;
  // w[m] = int over the panel m steps back of (t_n - s)^{rho-1} ds
  std::vector<double> w(n + 1, 0.0);
  const double scale = std::pow(h, p.rho) / p.rho;
  for (int m = 1; m <= n; ++m) w[m] = scale * (std::pow(m, p.rho) - std::pow(m - 1, p.rho));
  std::vector<double> f(n + 1, p.c1);
  for (int i = 1; i <= n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < i; ++j) acc += f[j] * w[i - j];
    f[i] = p.c1 + p.kappa * acc;
  }
  return f;
}

}  // namespace

VolterraSolution solve_volterra(const RenewalProblem& p, double t_end, int n_steps) {
  p.validate();
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw InvalidArgument("solve_volterra: t_end must be positive");
  if (n_steps < 8) throw InvalidArgument("solve_volterra: n_steps must be at least 8");

  VolterraSolution out;
  out.f = product_integration(p, t_end, n_steps);
  out.t.resize(out.f.size());
  for (int i = 0; i <= n_steps; ++i) out.t[i] = t_end * i / n_steps;

  const double fine = product_integration(p, t_end, 2 * n_steps).back();
  if (!std::isfinite(fine) || !std::isfinite(out.f.back()))
    throw ConvergenceError("solve_volterra: solution overflowed", out.f.back(), std::numeric_limits<double>::infinity());
  out.doubling_change = std::abs(fine - out.f.back()) / fine;
  out.converged = out.doubling_change <= 0.01;
  return out;
}

double renewal_threshold(const RenewalProblem& p) {
  p.validate();
  if (!(p.kappa > 0.0)) throw InvalidArgument("renewal_threshold: kappa must be positive");
  return std::exp(1.0) / p.rho * std::pow(std::tgamma(p.rho) * p.kappa, -1.0 / p.rho);
}

FitReport envelope_rate(const RenewalProblem& p, int samples) {
  const double ts = renewal_threshold(p);
  if (samples < 5) throw InvalidArgument("envelope_rate: need at least 5 samples");
  std::vector<double> t(samples);
  std::vector<double> y(samples);
  for (int i = 0; i < samples; ++i) {
    t[i] = ts * (1.0 + static_cast<double>(i) / (samples - 1));
    y[i] = log_resolvent_series(p, t[i]);
  }
  FitReport fit = fit_line(t, y);
  if (fit.r_squared < 0.999) {
    std::ostringstream os;
    os << "envelope_rate: log resolvent is not linear on [T*, 2T*] (r^2 = " << fit.r_squared << ")";
    throw ConvergenceError(os.str(), fit.exponent, fit.std_error);
  }
  return fit;
}

void ChaosSeriesParams::validate() const {
  if (!(g > 0.0)) throw InvalidArgument("ChaosSeriesParams: g must be positive");
  if (!(lam >= 0.0)) throw InvalidArgument("ChaosSeriesParams: lam must be nonnegative");
  if (!(l_sigma > 0.0)) throw InvalidArgument("ChaosSeriesParams: l_sigma must be positive");
  if (!(c_geom > 0.0)) throw InvalidArgument("ChaosSeriesParams: c_geom must be positive");
  if (!(alpha > 0.0) || !(beta > 0.0)) throw InvalidArgument("ChaosSeriesParams: alpha and beta must be positive");
  if (!(beta < alpha)) throw InvalidArgument("ChaosSeriesParams: beta must be < alpha");
}

SeriesValue chaos_lower_bound(const ChaosSeriesParams& p, double t, double tol) {
  p.validate();
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("chaos_lower_bound: t must be positive");
  const double log_g2 = 2.0 * std::log(p.g);
  if (p.lam == 0.0) return SeriesValue{p.g * p.g, log_g2, 1, 0.0};
  const double a = p.c_geom * p.lam * p.l_sigma;
  // (a^2 (t/k)^rho)^k = (b / k^rho)^k with b = a^2 t^rho
  SeriesValue s = power_sum(p.rho(), a * a * std::pow(t, p.rho()), tol);
  s.log_value += log_g2;
  s.value = std::exp(s.log_value);
  return s;
}

FitReport chaos_growth_rate(const ChaosSeriesParams& p, double t_lo, double t_hi, int samples) {
  if (!(t_lo > 0.0 && t_hi > t_lo)) throw InvalidArgument("chaos_growth_rate: need 0 < t_lo < t_hi");
  if (samples < 5) throw InvalidArgument("chaos_growth_rate: need at least 5 samples");
  std::vector<double> t(samples);
  std::vector<double> y(samples);
  for (int i = 0; i < samples; ++i) {
    t[i] = t_lo + (t_hi - t_lo) * i / (samples - 1);
    y[i] = chaos_lower_bound(p, t[i]).log_value;
  }
  return fit_line(t, y);
}

}  // namespace fracspde
