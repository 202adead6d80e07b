#include "fracspde/series.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "fracspde/error.hpp"

namespace fracspde {
namespace {

constexpr long kTermBudget = 100'000'000;

// Sums exp(log_term(j)) for j = 0, 1, ... where log_term is concave in j. Past
// the largest term the ratios t_{j+1}/t_j only shrink, so once the ratio r is
// below 1 the remainder is at most t_{j+1} / (1 - r).
SeriesValue sum_log_concave(const std::function<double(long)>& log_term, double tol, const char* who) {
  double m = log_term(0);
  double s = 1.0;  // sum of exp(l_j - m)
  double prev = m;
  long j = 1;
  for (; j <= kTermBudget; ++j) {
    const double l = log_term(j);
    if (l > m) {
      s = s * std::exp(m - l) + 1.0;
      m = l;
    } else {
      s += std::exp(l - m);
    }
    const double log_ratio = l - prev;
    prev = l;
    if (log_ratio < 0.0) {
      const double next = log_term(j + 1);
      const double r = std::exp(std::min(next - l, 0.0));
      const double bound = std::exp(next - m - std::log(s)) / (1.0 - r);
      if (r < 1.0 && bound <= tol) {
        SeriesValue out;
        out.log_value = m + std::log(s);
        out.value = std::exp(out.log_value);
        out.terms_used = j + 1;
        out.truncation_bound = bound;
        return out;
      }
    }
  }
  std::ostringstream os;
  os << who << ": remainder not certified within " << kTermBudget << " terms";
  throw ConvergenceError(os.str(), std::exp(m + std::log(s)), std::numeric_limits<double>::infinity());
}

void require_rho(double rho, const char* who) {
  if (!(rho > 0.0 && rho <= 1.0)) {
    std::ostringstream os;
    os << who << ": rho must lie in (0, 1], got " << rho;
    throw InvalidArgument(os.str());
  }
}

void require_tol(double tol, const char* who) {
  if (!(tol > 0.0 && tol < 1.0)) throw InvalidArgument(std::string(who) + ": tol must lie in (0, 1)");
}

}  // namespace

void PowerSumParams::validate() const {
  require_rho(rho, "PowerSumParams");
  if (!(b > 0.0) || !std::isfinite(b)) throw InvalidArgument("PowerSumParams: b must be positive");
}

SeriesValue mittag_leffler_sum(double rho, double b, double tol) {
  require_rho(rho, "mittag_leffler_sum");
  require_tol(tol, "mittag_leffler_sum");
  if (!(b >= 0.0) || !std::isfinite(b)) throw InvalidArgument("mittag_leffler_sum: b must be nonnegative");
  if (b == 0.0) return SeriesValue{1.0, 0.0, 1, 0.0};
  const double lb = std::log(b);
  return sum_log_concave([&](long j) { return j * lb - std::lgamma(j * rho + 1.0); }, tol, "mittag_leffler_sum");
}

SeriesValue power_sum(double rho, double b, double tol) { return power_sum(PowerSumParams{rho, b}, tol); }

SeriesValue power_sum(const PowerSumParams& p, double tol) {
  p.validate();
  require_tol(tol, "power_sum");
  const double lb = std::log(p.b);
  // j = 0 contributes 1 by convention
  return sum_log_concave(
      [&](long j) { return j == 0 ? 0.0 : j * (lb - p.rho * std::log(static_cast<double>(j))); }, tol,
      "power_sum");
}

double fit_lower_bound_constant(double rho, std::span<const double> b_grid) {
  require_rho(rho, "fit_lower_bound_constant");
  if (b_grid.empty()) throw InvalidArgument("fit_lower_bound_constant: empty grid");
  const double threshold = std::pow(std::exp(1.0) / rho, rho);
  double c = std::numeric_limits<double>::infinity();
  for (double b : b_grid) {
    if (!(b >= threshold * (1.0 - 1e-12))) {
      std::ostringstream os;
      os << "fit_lower_bound_constant: b = " << b << " is below the threshold (e/rho)^rho = " << threshold;
      throw InvalidArgument(os.str());
    }
    c = std::min(c, power_sum(rho, b).log_value / std::pow(b, 1.0 / rho));
  }
  return c;
}

UpperBoundFit fit_upper_bound_constants(double rho, std::span<const double> b_grid) {
  require_rho(rho, "fit_upper_bound_constants");
  if (b_grid.size() < 2) throw InvalidArgument("fit_upper_bound_constants: need at least two grid points");
  std::vector<double> x;
  std::vector<double> y;
  for (double b : b_grid) {
    if (!(b > 0.0)) throw InvalidArgument("fit_upper_bound_constants: b must be positive");
    x.push_back(std::pow(b, 1.0 / rho));
    y.push_back(mittag_leffler_sum(rho, b).log_value);
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (!(sxx > 0.0)) throw InvalidArgument("fit_upper_bound_constants: grid points must differ");
  UpperBoundFit fit;
  fit.c2 = sxy / sxx;
  double log_c1 = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i) log_c1 = std::max(log_c1, y[i] - fit.c2 * x[i]);
  fit.c1 = std::exp(log_c1);
  return fit;
}

namespace {

// I_m(s) = int_0^s (s - r)^{-1/alpha} I_{m-1}(r) dr, I_0 = 1.
double nested_layer(double alpha, double s, int m) {
  if (m == 0) return 1.0;
  if (!(s > 0.0)) return 0.0;
  boost::math::quadrature::tanh_sinh<double> q;
  auto f = [&](double r, double rc) {
    // rc is the distance to the nearer endpoint, negative near 0
    const double gap = rc > 0.0 ? rc : s - r;
    if (!(gap > 0.0)) return 0.0;
    return std::pow(gap, -1.0 / alpha) * nested_layer(alpha, r, m - 1);
  };
  return q.integrate(f, 0.0, s, 1e-10);
}

}  // namespace

IteratedIntegral iterated_integral_lower_check(double alpha, double t, int k) {
  if (!(alpha > 1.0)) throw InvalidArgument("iterated_integral_lower_check: alpha must exceed 1");
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("iterated_integral_lower_check: t must be positive");
  if (k < 1) throw InvalidArgument("iterated_integral_lower_check: k must be at least 1");
  if (k > 5) throw InvalidArgument("iterated_integral_lower_check: k > 5 is not supported (cost)");

  const double g = 1.0 - 1.0 / alpha;
  double log_lhs = k * g * std::log(t);
  for (int i = 1; i <= k; ++i) log_lhs += std::log(boost::math::beta(g, 1.0 + (i - 1) * g));

  IteratedIntegral out;
  out.lhs = std::exp(log_lhs);
  out.rhs_scaled = std::pow(t / k, k * g);
  out.ratio = std::exp(log_lhs / k) / std::pow(t / k, g);
  out.lhs_quadrature = k <= 3 ? nested_layer(alpha, t, k) : std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace fracspde
