#include "fracspde/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fracspde/error.hpp"
#include "fracspde/kernel.hpp"

namespace fracspde {

namespace {

[[noreturn]] void invalid(const std::string& msg) { throw InvalidArgument(msg); }

void check_window(std::pair<double, double> w) {
  if (!(w.second > w.first)) invalid("growth_rate: window must satisfy t_min < t_max");
}

FitReport finish(FitReport fit, std::pair<double, double> window) {
  fit.window = window;
  return fit;
}

}  // namespace

std::pair<double, double> latter_half(const std::vector<double>& times) {
  if (times.empty()) invalid("latter_half: no times");
  const double hi = *std::max_element(times.begin(), times.end());
  return {0.5 * hi, hi};
}

FitReport growth_rate(const MomentTable& table, double probe, std::pair<double, double> window) {
  check_window(window);
  const std::size_t pi = table.probe_index(probe);
  const std::size_t oi = table.order_index(2);
  std::vector<double> x, y, s;
  for (std::size_t ti = 0; ti < table.times.size(); ++ti) {
    const double t = table.times[ti];
    if (t < window.first || t > window.second) continue;
    if (!table.is_valid(ti, pi, oi)) invalid("growth_rate: invalid estimate in the window (blow-up)");
    const double e = table.estimate(ti, pi, oi);
    if (!(e > 0.0)) invalid("growth_rate: non-positive moment in the window");
    x.push_back(t);
    y.push_back(std::log(e));
    s.push_back(table.std_error(ti, pi, oi) / e);
  }
  if (x.size() < 5) invalid("growth_rate: need at least 5 time points in the window");
  return finish(fit_line(x, y, s), window);
}

FitReport growth_rate(const MomentCurve& curve, std::pair<double, double> window) {
  check_window(window);
  std::vector<double> x, y;
  for (std::size_t i = 0; i < curve.t.size(); ++i) {
    if (curve.t[i] < window.first || curve.t[i] > window.second) continue;
    if (!std::isfinite(curve.log_value[i])) invalid("growth_rate: non-positive moment in the window");
    x.push_back(curve.t[i]);
    y.push_back(curve.log_value[i]);
  }
  if (x.size() < 5) invalid("growth_rate: need at least 5 time points in the window");
  return finish(fit_line(x, y), window);
}

FitReport excitation_index(std::span<const LambdaSample> samples, ExcitationMode mode) {
  if (samples.size() < 4) invalid("excitation_index: need at least 4 lambda values");
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  std::vector<double> x, y;
  for (const auto& s : samples) {
    if (!(s.lam > 0.0) || !std::isfinite(s.lam)) invalid("excitation_index: lambda must be positive");
    if (!(s.value > 0.0) || !std::isfinite(s.value)) {
      std::ostringstream os;
      if (mode == ExcitationMode::fixed_t_moment)
        os << "excitation_index: the moment at lambda=" << s.lam
           << " is <= 1, so log log is undefined; use larger lambda or t";
      else
        os << "excitation_index: non-positive growth rate at lambda=" << s.lam;
      invalid(os.str());
    }
    lo = std::min(lo, s.lam);
    hi = std::max(hi, s.lam);
    x.push_back(std::log(s.lam));
    y.push_back(std::log(s.value));
  }
  if (hi < 8.0 * lo * (1.0 - 1e-12)) invalid("excitation_index: lambda values must span at least a factor of 8");
  return finish(fit_line(x, y), {lo, hi});
}

double energy(const MomentTable& table, const SimGrid& grid, double t) {
  grid.validate_spatial();
  if (table.probes.size() != grid.n) invalid("energy: the table must cover every cell of the grid");
  std::vector<bool> seen(grid.n, false);
  for (double x : table.probes) {
    const std::size_t j = grid.nearest_cell(x);
    if (std::abs(grid.x(j) - x) > 1e-9 * grid.dx() || seen[j]) invalid("energy: probes must be the cell centres");
    seen[j] = true;
  }
  std::size_t ti = table.times.size();
  for (std::size_t i = 0; i < table.times.size(); ++i)
    if (std::abs(table.times[i] - t) <= 1e-12 * std::max(1.0, t)) ti = i;
  if (ti == table.times.size()) invalid("energy: time not in the table");
  const std::size_t oi = table.order_index(2);
  double sum = 0.0;
  for (std::size_t pi = 0; pi < table.probes.size(); ++pi) {
    if (!table.is_valid(ti, pi, oi)) invalid("energy: missing cells (blow-up)");
    sum += table.estimate(ti, pi, oi);
  }
  return std::sqrt(sum * grid.dx());
}

IncrementMoments increment_moments(const ModelSpec& model, const SimGrid& grid, double base_t,
                                   std::span<const double> h_list, int p, std::size_t n_paths, std::uint64_t seed,
                                   const HolderOptions& options) {
  if (!(base_t > 0.0)) invalid("increment_moments: base_t must be positive");
  if (h_list.size() < 4) invalid("increment_moments: need at least 4 lags");
  if (p < 1) invalid("increment_moments: p must be positive");
  if (n_paths < 100) invalid("increment_moments: need at least 100 paths");
  if (options.spatial_average && model.u0.kind != InitialCondition::Kind::constant)
    invalid("increment_moments: spatial averaging needs constant initial data");
  for (std::size_t i = 0; i < h_list.size(); ++i) {
    if (h_list[i] < grid.dt * (1.0 - 1e-9)) invalid("increment_moments: every h must be at least dt");
    if (i > 0 && !(h_list[i] > h_list[i - 1])) invalid("increment_moments: h values must increase");
  }

  std::vector<double> times{base_t};
  for (double h : h_list) times.push_back(base_t + h);
  const auto steps = snapshot_steps(grid, times);
  const std::size_t n = grid.n;
  const std::size_t cell = grid.nearest_cell(options.probe);

  // Snapshot 0 stores the base field in `out`; later snapshots append the increment moment.
  SnapshotVisitor visit = [&](std::size_t snap, std::span<const double> u, std::vector<double>& out) {
    if (snap == 0) {
      out.assign(u.begin(), u.end());
      return;
    }
    if (options.spatial_average) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += std::pow(std::abs(u[j] - out[j]), p);
      out.push_back(s / static_cast<double>(n));
    } else {
      out.push_back(std::pow(std::abs(u[cell] - out[cell]), p));
    }
  };
  const EnsembleRun run = run_ensemble(model, grid, steps, n_paths, seed, visit, options.threads);
  if (!run.failures.empty()) {
    const auto& f = run.failures.front();
    std::ostringstream os;
    os << "increment_moments: path " << f.path << " blew up at t=" << f.time;
    throw BlowUpError(os.str(), f.time, f.step, f.seed);
  }

  IncrementMoments result;
  const double count = static_cast<double>(n_paths);
  for (std::size_t i = 0; i < h_list.size(); ++i) {
    double sum = 0.0;
    for (const auto& out : run.outputs) sum += out[n + i];
    const double mean = sum / count;
    double ss = 0.0;
    for (const auto& out : run.outputs) ss += (out[n + i] - mean) * (out[n + i] - mean);
    if (!(mean > 0.0)) invalid("increment_moments: increments vanish; the path is deterministic and constant");
    result.h.push_back(h_list[i]);
    result.moment.push_back(mean);
    result.std_error.push_back(std::sqrt(ss / (count - 1.0) / count));
  }
  return result;
}

FitReport holder_fit(const IncrementMoments& m, int p) {
  if (p < 1) invalid("holder_fit: p must be positive");
  if (m.h.size() < 4) invalid("holder_fit: need at least 4 lags");
  std::vector<double> x, y, s;
  for (std::size_t i = 0; i < m.h.size(); ++i) {
    if (!(m.moment[i] > 0.0)) invalid("holder_fit: non-positive increment moment");
    x.push_back(std::log(m.h[i]));
    y.push_back(std::log(m.moment[i]));
    s.push_back(m.std_error[i] / m.moment[i]);
  }
  FitReport fit = fit_line(x, y, s);
  fit.exponent /= p;
  fit.std_error /= p;
  fit.window = {m.h.front(), m.h.back()};
  return fit;
}

FitReport holder_exponent(const ModelSpec& model, const SimGrid& grid, double base_t, std::span<const double> h_list,
                          int p, std::size_t n_paths, std::uint64_t seed, const HolderOptions& options) {
  return holder_fit(increment_moments(model, grid, base_t, h_list, p, n_paths, seed, options), p);
}

std::vector<std::pair<double, double>> increment_integral_check(double alpha, double beta, int dim, double t,
                                                                std::span<const double> h_list, double q) {
  if (dim < 1) invalid("increment_integral_check: dim must be >= 1");
  if (!(alpha > 0.0 && alpha <= 2.0)) invalid("increment_integral_check: alpha must lie in (0, 2]");
  if (!(beta > 0.0 && beta < dim)) invalid("increment_integral_check: beta must lie in (0, d)");
  if (!(beta < alpha)) invalid("increment_integral_check: beta must be below alpha");
  if (!(t > 0.0)) invalid("increment_integral_check: t must be positive");
  const double q_max = (alpha - beta) / (2.0 * alpha);
  if (!(q > 0.0 && q < q_max)) {
    std::ostringstream os;
    os << "increment_integral_check: q must lie in (0, " << q_max << ")";
    invalid(os.str());
  }
  const double area = unit_sphere_area(dim);
  std::vector<std::pair<double, double>> out;
  for (double h : h_list) {
    if (!(h > 0.0 && h < 1.0)) invalid("increment_integral_check: h must lie in (0, 1)");
    // in u = log r: integrand r * f(r)
    auto f = [&](double u) {
      const double r = std::exp(u);
      const double ra = std::pow(r, alpha);
      const double gap = -std::expm1(-h * ra);
      const double time_part = -std::expm1(-2.0 * t * ra) / (2.0 * ra);
      return gap * gap * time_part * std::pow(r, beta);
    };
    // Beyond R both exponentials are below 1e-16 and the integrand is r^{beta-1-a}/2.
    const double big = std::pow(40.0 / std::min(h, 2.0 * t), 1.0 / alpha);
    const double small = std::pow(1e-12 * std::min(h, t), 1.0 / alpha);
    const double lo = std::log(small);
    const double hi = std::log(big);
    double core = 0.0;
    const int panels = 64;
    for (int i = 0; i < panels; ++i) {
      const double a = lo + (hi - lo) * i / panels;
      const double b = lo + (hi - lo) * (i + 1) / panels;
      core += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 8, 1e-13);
    }
    const double tail = std::pow(big, beta - alpha) / (2.0 * (alpha - beta));
    out.emplace_back(h, area * (core + tail));
  }
  return out;
}

}  // namespace fracspde
