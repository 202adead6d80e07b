#include "fracspde/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fracspde/error.hpp"
#include "fracspde/fft.hpp"

namespace fracspde {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFourierTailBound = 1e-12;
// Scaled distance r t^{-1/a} beyond which the Zolotarev route takes over.
constexpr double kRouteSwitch = 2.0;

using boost::math::quadrature::gauss_kronrod;

void require_density_args(const StableKernelParams& params, double t, double r) {
  params.validate();
  if (params.dim != 1) throw InvalidArgument("kernel_density: direct evaluation supports dim = 1 only");
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("kernel_density: t must be positive");
  if (!(r >= 0.0) || !std::isfinite(r)) throw InvalidArgument("kernel_density: r must be nonnegative");
}

// Leading coefficients of p_1(x) ~ (1/pi) sum_k (-1)^{k+1} Gamma(ak+1)/k! sin(pi a k/2) x^{-ak-1}.
double tail_coefficient(double a, int k) {
  const double sign = (k % 2 == 1) ? 1.0 : -1.0;
  return sign * std::exp(std::lgamma(a * k + 1.0) - std::lgamma(k + 1.0)) *
         std::sin(kPi * a * k / 2.0) / kPi;
}

}  // namespace

void StableKernelParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    std::ostringstream os;
    os << "kernel: alpha must lie in (0, 2], got " << alpha;
    throw InvalidArgument(os.str());
  }
  if (dim < 1) throw InvalidArgument("kernel: dim must be >= 1");
}

double kernel_fourier(const StableKernelParams& params, double t, double xi) {
  params.validate();
  if (!(t >= 0.0)) throw InvalidArgument("kernel_fourier: t must be nonnegative");
  if (!(xi >= 0.0)) throw InvalidArgument("kernel_fourier: xi must be nonnegative");
  if (xi == 0.0) return 1.0;
  return std::exp(-t * std::pow(xi, params.alpha));
}

DensityEstimate density_by_fourier_inversion(const StableKernelParams& params, double t, double r) {
  require_density_args(params, t, r);
  const double a = params.alpha;

  // Cutoff: e^{-t X^a} / (pi t a X^{a-1}) < 1e-12.
  auto tail = [&](double x) { return std::exp(-t * std::pow(x, a)) / (kPi * t * a * std::pow(x, a - 1.0)); };
  double cutoff = std::pow(30.0 / t, 1.0 / a);
  while (tail(cutoff) > kFourierTailBound) cutoff *= 1.25;

  double width = std::min(cutoff / 32.0, std::pow(t, -1.0 / a));
  if (r > 0.0) width = std::min(width, kPi / (2.0 * r));

  auto f = [&](double xi) { return std::exp(-t * std::pow(xi, a)) * std::cos(xi * r); };

  double sum = 0.0;
  double err_sum = 0.0;
  auto panel = [&](double lo, double hi) {
    double err = 0.0;
    sum += gauss_kronrod<double, 61>::integrate(f, lo, hi, 0, 0.0, &err);
    err_sum += err;
  };
  // xi^a is not smooth at 0 for a < 2: grade the first panel geometrically.
  double lo = 0.0;
  for (int k = 40; k >= 1; --k) {
    const double hi = std::ldexp(width, -k);
    panel(lo, hi);
    lo = hi;
  }
  while (lo < cutoff) {
    const double hi = std::min(lo + width, cutoff);
    panel(lo, hi);
    lo = hi;
  }

  DensityEstimate out;
  out.value = sum / kPi;
  out.abs_error = err_sum / kPi + kFourierTailBound;
  out.log_value = out.value > 0.0 ? std::log(out.value) : -std::numeric_limits<double>::infinity();
  out.route = DensityEstimate::Route::fourier;
  if (!(out.abs_error < 1e-9 + 1e-8 * std::abs(out.value)))
    throw ConvergenceError("kernel_density: Fourier quadrature missed tolerance", out.value, out.abs_error);
  return out;
}

DensityEstimate density_by_zolotarev_integral(const StableKernelParams& params, double t, double r) {
  require_density_args(params, t, r);
  const double a = params.alpha;
  if (a == 1.0) throw InvalidArgument("kernel_density: integral representation needs alpha != 1");
  if (r == 0.0) throw InvalidArgument("kernel_density: integral representation needs r > 0");

  // p_t(r) = t^{-1/a} f(x), x = r t^{-1/a};
  // f(x) = a x^{1/(a-1)} / (pi |a-1|) int_0^{pi/2} V e^{-c V} d theta,  c = x^{a/(a-1)}.
  // Written in u = pi/2 - theta so cos(theta) = sin(u) keeps full precision near theta = pi/2.
  const double x = r * std::pow(t, -1.0 / a);
  const double e = a / (a - 1.0);
  const double log_c = e * std::log(x);
  const double half_pi = kPi / 2.0;
  // sin(a theta) and cos((a-1) theta) expanded around theta = pi/2 with the constant
  // phases written through (2-a) pi/2, which is exactly 0 at a = 2.
  const double s2 = std::sin((2.0 - a) * half_pi);
  const double c2 = std::cos((2.0 - a) * half_pi);
  auto log_cv = [&](double u) {
    const double cos_th = std::sin(u);
    // the expansion cancels as theta -> 0, where theta itself is accurate
    const bool near_pi2 = u < half_pi / 2.0;
    const double th = half_pi - u;
    const double sin_a_th = near_pi2 ? s2 * std::cos(a * u) + c2 * std::sin(a * u) : std::sin(a * th);
    const double cos_a1_th =
        near_pi2 ? s2 * std::cos((a - 1.0) * u) + c2 * std::sin((a - 1.0) * u) : std::cos((a - 1.0) * th);
    return log_c + e * (std::log(cos_th) - std::log(sin_a_th)) + std::log(cos_a1_th) - std::log(cos_th);
  };
  auto h = [&](double u) {
    const double l = log_cv(u);
    return l - std::exp(l);
  };

  // c V is monotone in u: increasing for a > 1, decreasing for a < 1. h peaks where c V = 1,
  // or at the u = 0 end when c V stays above 1 there (a = 2 far tail).
  const bool increasing = a > 1.0;
  double peak;
  double peak_h;
  const double at_zero = log_cv(1e-300);
  if (increasing && at_zero >= 0.0) {
    peak = 0.0;
    peak_h = h(std::numeric_limits<double>::min());
  } else {
    // in log u for a > 1, where the peak runs into u ~ x^{-a}
    auto at = [&](double s) { return increasing ? std::exp(s) : s; };
    double lo = increasing ? std::log(1e-300) : 0.0;
    double hi = increasing ? std::log(half_pi) : half_pi;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if ((log_cv(at(mid)) < 0.0) == increasing)
        lo = mid;
      else
        hi = mid;
    }
    peak = at(0.5 * (lo + hi));
    peak_h = -1.0;
  }
  auto g = [&](double u) {
    const double v = std::exp(h(u) - peak_h);
    return std::isfinite(v) ? v : 0.0;
  };

  // Panels grow geometrically away from the peak, starting from a fraction of the
  // distance over which h drops by one unit on the narrower side.
  auto drop_distance = [&](double toward) {
    const double span = std::abs(toward - peak);
    const double dir = toward > peak ? 1.0 : -1.0;
    if (h(toward) - peak_h > -1.0) return span;
    // bisect on log distance: the peak can sit at u ~ 1e-60 with a comparable width
    double near = std::log(1e-300);
    double far = std::log(span);
    for (int it = 0; it < 64; ++it) {
      const double mid = 0.5 * (near + far);
      if (h(peak + dir * std::exp(mid)) - peak_h > -1.0)
        near = mid;
      else
        far = mid;
    }
    return std::exp(near);
  };
  double w0 = drop_distance(half_pi);
  if (peak > 0.0) w0 = std::min(w0, drop_distance(0.0));
  w0 = std::clamp(0.25 * w0, 1e-300, half_pi / 16.0);
  double j = 0.0;
  double err = 0.0;
  auto sweep = [&](double from, double to) {
    const double dir = to > from ? 1.0 : -1.0;
    double lo = from;
    double w = w0;
    while (dir * (to - lo) > 0.0) {
      double hi = dir * (to - (lo + dir * w)) <= 0.0 ? to : lo + dir * w;
      // g can behave like a fractional power at either end, so approach ends dyadically
      const double floor_gap = to == 0.0 ? 1e-200 : 1e-13;
      if (hi == to && std::abs(to - lo) > floor_gap) hi = lo + 0.5 * (to - lo);
      // integrate on [0, 1]: the adaptive error estimate carries an absolute floor that
      // swamps panels only 1e-8 wide
      const double left = std::min(lo, hi);
      const double width = std::abs(hi - lo);
      double pe = 0.0;
      double part = gauss_kronrod<double, 31>::integrate([&](double s) { return g(left + width * s); }, 0.0, 1.0,
                                                         6, 1e-13, &pe);
      part *= width;
      pe *= width;
      j += part;
      err += pe;
      if (hi != to && g(hi) < 1e-18 && part < 1e-18 * j) break;
      lo = hi;
      w *= 2.0;
    }
  };
  if (peak > 0.0) sweep(peak, 0.0);
  sweep(peak, half_pi);

  DensityEstimate out;
  out.route = DensityEstimate::Route::integral;
  out.log_value = std::log(a / (kPi * std::abs(a - 1.0))) + std::log(x) / (a - 1.0) - log_c + peak_h +
                  std::log(j) - std::log(t) / a;
  out.value = std::exp(out.log_value);
  out.abs_error = out.value * err / j;
  // exp(h) inherits a relative rounding error of about |h| eps from the exponent
  const double floor_rel = std::max(1e-8, 1e3 * std::numeric_limits<double>::epsilon() * std::abs(peak_h));
  if (!(j > 0.0) || !(err < floor_rel * j))
    throw ConvergenceError("kernel_density: integral representation missed tolerance", out.value,
                           out.abs_error);
  return out;
}

DensityEstimate kernel_density_estimate(const StableKernelParams& params, double t, double r) {
  require_density_args(params, t, r);
  const double x = r * std::pow(t, -1.0 / params.alpha);
  if (params.alpha != 1.0 && x > kRouteSwitch) return density_by_zolotarev_integral(params, t, r);
  return density_by_fourier_inversion(params, t, r);
}

double kernel_density(const StableKernelParams& params, double t, double r) {
  return kernel_density_estimate(params, t, r).value;
}

double kernel_scaling_check(const StableKernelParams& params, double t, double r) {
  if (!(t > 0.0)) throw InvalidArgument("kernel_scaling_check: t must be positive");
  const double direct = kernel_density(params, t, r);
  const double s = std::pow(t, -1.0 / params.alpha);
  const double scaled = std::pow(s, params.dim) * kernel_density(params, 1.0, s * r);
  return std::abs(direct - scaled);
}

MassSplit kernel_mass(const StableKernelParams& params, double t, double radius) {
  require_density_args(params, t, 0.0);
  if (!(radius > 0.0)) throw InvalidArgument("kernel_mass: radius must be positive");
  const double a = params.alpha;
  const double scale = std::pow(t, 1.0 / a);

  auto p = [&](double r) { return kernel_density(params, t, r); };
  MassSplit out;
  double lo = 0.0;
  double hi = 0.5 * scale;
  while (lo < radius) {
    hi = std::min(hi, radius);
    out.core += 2.0 * gauss_kronrod<double, 15>::integrate(p, lo, hi, 10, 1e-12);
    lo = hi;
    hi *= 2.0;
  }

  if (a == 2.0) {
    out.tail = std::erfc(radius / (2.0 * std::sqrt(t)));
  } else {
    // 2 int_R^inf t^k c_k r^{-ak-1} dr = 2 c_k t^k R^{-ak} / (a k)
    for (int k = 1; k <= 3; ++k)
      out.tail += 2.0 * tail_coefficient(a, k) * std::pow(t, k) * std::pow(radius, -a * k) / (a * k);
  }
  return out;
}

KernelBoundReport verify_two_sided_bounds(const StableKernelParams& params,
                                          std::span<const double> t_grid,
                                          std::span<const double> r_grid) {
  params.validate();
  if (t_grid.empty() || r_grid.empty()) throw InvalidArgument("verify_two_sided_bounds: empty grid");
  const double a = params.alpha;
  const double d = params.dim;
  KernelBoundReport rep;
  rep.log_c_lower = std::numeric_limits<double>::infinity();
  rep.log_c_upper = -std::numeric_limits<double>::infinity();
  for (double t : t_grid) {
    if (!(t > 0.0)) throw InvalidArgument("verify_two_sided_bounds: every t must be positive");
    for (double r : r_grid) {
      const auto est = kernel_density_estimate(params, t, r);
      const double log_env = r == 0.0 ? -d / a * std::log(t)
                                      : std::min(-d / a * std::log(t), std::log(t) - (d + a) * std::log(r));
      if (!(est.value > 0.0) && !std::isfinite(est.log_value)) {
        rep.max_ratio_violation = std::max(rep.max_ratio_violation, -est.value * std::exp(-log_env));
        rep.log_c_lower = -std::numeric_limits<double>::infinity();
      } else {
        const double lr = est.log_value - log_env;
        rep.log_c_lower = std::min(rep.log_c_lower, lr);
        rep.log_c_upper = std::max(rep.log_c_upper, lr);
      }
      ++rep.sample_count;
    }
  }
  rep.c_lower = std::exp(rep.log_c_lower);
  rep.c_upper = std::exp(rep.log_c_upper);
  return rep;
}

ScalarField semigroup_apply(const ScalarField& u0, const StableKernelParams& params, double t) {
  params.validate();
  u0.grid.validate_spatial();
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("semigroup_apply: t must be nonnegative");
  if (u0.size() != u0.grid.n) throw InvalidArgument("semigroup_apply: field size differs from grid");
  for (double v : u0.values)
    if (!std::isfinite(v)) throw InvalidArgument("semigroup_apply: non-finite input");
  if (t == 0.0) return u0;

  const double hi = u0.max();
  const double lo = u0.min();
  const double scale = std::max(std::abs(hi), std::abs(lo));
  if (hi - lo <= 1e-14 * scale) return u0;

  const double a = params.alpha;
  const double half = 0.5 * u0.grid.length;
  // Kernel height at the box edge relative to its peak.
  const double wrap = a == 2.0 ? std::exp(-half * half / (4.0 * t))
                               : std::abs(tail_coefficient(a, 1)) * std::pow(t, 1.0 + 1.0 / a) *
                                     std::pow(half, -1.0 - a) * kPi / std::tgamma(1.0 + 1.0 / a);
  if (wrap > 1e-4) {
    std::ostringstream os;
    os << "semigroup_apply: kernel at t=" << t << " does not fit in a box of length " << u0.grid.length;
    throw ResolutionError(os.str());
  }

  const std::size_t n = u0.grid.n;
  RealFft fft(n);
  std::copy(u0.values.begin(), u0.values.end(), fft.real().begin());
  fft.forward();
  auto spec = fft.spectrum();
  for (std::size_t m = 0; m < spec.size(); ++m)
    spec[m] *= std::exp(-t * std::pow(u0.grid.wavenumber(m), a));
  fft.backward();

  ScalarField out(u0.grid);
  std::copy(fft.real().begin(), fft.real().end(), out.values.begin());
  if (lo >= 0.0) {
    const double floor = -1e-8 * hi;
    for (double& v : out.values) {
      if (v >= 0.0) continue;
      if (v < floor) {
        std::ostringstream os;
        os << "semigroup_apply: grid too coarse for t=" << t << " (ringing " << v << ")";
        throw ResolutionError(os.str());
      }
      v = 0.0;
    }
  }
  return out;
}

LowerBoundSeries pde_lower_bound_check(const ScalarField& u0, const StableKernelParams& params,
                                       std::span<const double> t_grid) {
  params.validate();
  if (t_grid.empty()) throw InvalidArgument("pde_lower_bound_check: empty time grid");
  if (u0.min() < 0.0) throw InvalidArgument("pde_lower_bound_check: u0 must be nonnegative");
  if (!(u0.max() > 0.0)) throw InvalidArgument("pde_lower_bound_check: u0 is identically zero");

  const double a = params.alpha;
  const double d = params.dim;
  LowerBoundSeries out;
  for (double t : t_grid) {
    if (!(t > 0.0)) throw InvalidArgument("pde_lower_bound_check: every t must be positive");
    const ScalarField g = semigroup_apply(u0, params, t);
    const double radius = std::pow(t, 1.0 / a);
    double inf = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < g.size(); ++j)
      if (std::abs(g.grid.x(j)) <= radius) inf = std::min(inf, g[j]);
    out.values.emplace_back(t, inf * std::pow(t, d / a));
  }

  std::size_t first = out.values.size();
  while (first > 0 && out.values[first - 1].second > 0.0) --first;
  if (first == out.values.size()) {
    out.threshold_t = std::numeric_limits<double>::infinity();
    return out;
  }
  out.threshold_t = out.values[first].first;
  double mn = std::numeric_limits<double>::infinity();
  double mx = 0.0;
  for (std::size_t i = first; i < out.values.size(); ++i) {
    mn = std::min(mn, out.values[i].second);
    mx = std::max(mx, out.values[i].second);
  }
  out.c_lower = mn;
  out.spread = mx / mn;
  return out;
}

double riesz_fourier_constant(int dim, double beta) {
  if (!(beta > 0.0 && beta < dim)) throw InvalidArgument("riesz_fourier_constant: need 0 < beta < dim");
  const double d = dim;
  return std::pow(kPi, d / 2.0) * std::pow(2.0, d - beta) * std::tgamma((d - beta) / 2.0) /
         std::tgamma(beta / 2.0);
}

double unit_sphere_area(int dim) {
  const double d = dim;
  return 2.0 * std::pow(kPi, d / 2.0) / std::tgamma(d / 2.0);
}

double colored_kernel_integral(const StableKernelParams& params, double beta, double t) {
  params.validate();
  if (!(beta > 0.0)) throw InvalidArgument("colored_kernel_integral: beta must be positive");
  if (!(beta < params.dim))
    throw InvalidArgument("colored_kernel_integral: beta must be < dim (non-integrable singularity)");
  if (beta > params.alpha)
    throw InvalidArgument("colored_kernel_integral: beta must be <= alpha (no random-field solution)");
  if (!(t > 0.0)) throw InvalidArgument("colored_kernel_integral: t must be positive");

  const double a = params.alpha;
  const double split = std::pow(2.0 * t, 1.0 / a);
  boost::math::quadrature::tanh_sinh<double> near;
  boost::math::quadrature::exp_sinh<double> far;

  if (params.dim == 1) {
    // 2 int_0^inf p_{2t}(r) r^{-beta} dr in real space.
    auto f = [&](double r) {
      if (!(r > 0.0)) return 0.0;
      return 2.0 * kernel_density(params, 2.0 * t, r) * std::pow(r, -beta);
    };
    double sum = near.integrate(f, 0.0, split, 1e-12);
    // doubling panels out to 2^20 kernel widths, then the power-law tail in closed form
    double lo = split;
    for (int k = 0; k < 20; ++k, lo *= 2.0) sum += gauss_kronrod<double, 31>::integrate(f, lo, 2.0 * lo, 8, 1e-13);
    if (a < 2.0)
      for (int k = 1; k <= 2; ++k)
        sum += 2.0 * tail_coefficient(a, k) * std::pow(2.0 * t, k) * std::pow(lo, -a * k - beta) / (a * k + beta);
    return sum;
  }

  // (2 pi)^{-d} int e^{-2t|xi|^a} c_{d,beta} |xi|^{beta-d} d xi, radially.
  const double pref = riesz_fourier_constant(params.dim, beta) * unit_sphere_area(params.dim) /
                      std::pow(2.0 * kPi, params.dim);
  auto g = [&](double k) { return k > 0.0 ? std::exp(-2.0 * t * std::pow(k, a)) * std::pow(k, beta - 1.0) : 0.0; };
  const double ks = 1.0 / split;
  return pref * (near.integrate(g, 0.0, ks, 1e-12) + far.integrate(g, ks, std::numeric_limits<double>::infinity(), 1e-12));
}

}  // namespace fracspde
