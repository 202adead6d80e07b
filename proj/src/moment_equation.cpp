#include "fracspde/moment_equation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fracspde/error.hpp"
#include "fracspde/fft.hpp"

namespace fracspde {

namespace {

/// Lag z_j in FFT order: z_0 = 0, negative lags in the upper half.
double lag(const SimGrid& g, std::size_t j) {
  const double dz = g.dx();
  return j < g.n / 2 ? static_cast<double>(j) * dz : (static_cast<double>(j) - static_cast<double>(g.n)) * dz;
}

class LagSolver {
 public:
  LagSolver(const ModelSpec& model, const SimGrid& zgrid, std::vector<double> initial)
      : grid_(zgrid), c_(std::move(initial)), fft_(zgrid.n) {
    model.validate();
    zgrid.validate();
    if (model.sigma.kind != SigmaSpec::Kind::linear)
      throw InvalidArgument("moment equation: closes only for linear sigma");
    const double coupling = model.lam * model.lam * model.sigma.a * model.sigma.a;
    const double dz = zgrid.dx();
    const double dt = zgrid.dt;
    half_.resize(zgrid.n);
    for (std::size_t j = 0; j < zgrid.n; ++j) {
      double v = 0.0;
      if (!model.noise.colored()) {
        v = j == 0 ? 1.0 / dz : 0.0;
      } else {
        const double beta = model.noise.beta;
        v = j == 0 ? std::pow(0.5 * dz, -beta) / (1.0 - beta) : std::pow(std::abs(lag(zgrid, j)), -beta);
      }
      half_[j] = std::exp(0.5 * dt * coupling * v);
    }
    kinetic_.resize(zgrid.n / 2 + 1);
    for (std::size_t m = 0; m < kinetic_.size(); ++m)
      kinetic_[m] = std::exp(-2.0 * dt * std::pow(zgrid.wavenumber(m), model.alpha));
    renormalize();
  }

  void advance() {
    auto real = fft_.real();
    for (std::size_t j = 0; j < grid_.n; ++j) real[j] = c_[j] * half_[j];
    fft_.forward();
    auto spec = fft_.spectrum();
    for (std::size_t m = 0; m < spec.size(); ++m) spec[m] *= kinetic_[m];
    fft_.backward();
    for (std::size_t j = 0; j < grid_.n; ++j) c_[j] = real[j] * half_[j];
    renormalize();
  }

  const std::vector<double>& state() const { return c_; }
  double log_scale() const { return log_scale_; }

 private:
  void renormalize() {
    double m = 0.0;
    for (double v : c_) m = std::max(m, std::abs(v));
    if (!std::isfinite(m) || m == 0.0) throw ConvergenceError("moment equation: state lost", log_scale_, 0.0);
    if (m > 1e100 || m < 1e-100) {
      for (double& v : c_) v /= m;
      log_scale_ += std::log(m);
    }
  }

  SimGrid grid_;
  std::vector<double> c_;
  std::vector<double> half_;
  std::vector<double> kinetic_;
  double log_scale_ = 0.0;
  RealFft fft_;
};

void check_record(std::size_t record_every) {
  if (record_every == 0) throw InvalidArgument("moment equation: record_every must be positive");
}

}  // namespace

MomentCurve second_moment_curve(const ModelSpec& model, const SimGrid& zgrid, double x, std::size_t record_every) {
  check_record(record_every);
  model.validate();
  zgrid.validate();
  const std::size_t total = zgrid.steps();
  MomentCurve out;
  const auto& u0 = model.u0;

  if (u0.kind == InitialCondition::Kind::constant) {
    LagSolver solver(model, zgrid, std::vector<double>(zgrid.n, u0.value * u0.value));
    for (std::size_t s = 1; s <= total; ++s) {
      solver.advance();
      if (s % record_every) continue;
      out.t.push_back(static_cast<double>(s) * zgrid.dt);
      out.log_value.push_back(std::log(solver.state()[0]) + solver.log_scale());
    }
    return out;
  }

  if (u0.kind != InitialCondition::Kind::indicator || model.alpha != 2.0)
    throw InvalidArgument("second_moment_curve: needs constant u0, or indicator u0 with alpha = 2");
  if (u0.b - u0.a > 0.25 * zgrid.length) throw InvalidArgument("second_moment_curve: lag box too small for the support");

  // Propagate the lag kernel from a unit mass at z = 0 and fold it against the
  // centre-of-mass integral  int G_t(x - R) u0(R + z/2) u0(R - z/2) dR.
  const double dz = zgrid.dx();
  std::vector<double> delta(zgrid.n, 0.0);
  delta[0] = 1.0 / dz;
  LagSolver solver(model, zgrid, std::move(delta));
  const double centre = 0.5 * (u0.a + u0.b);
  const double half_width = 0.5 * (u0.b - u0.a);
  const double offset = x - centre;
  for (std::size_t s = 1; s <= total; ++s) {
    solver.advance();
    if (s % record_every) continue;
    const double t = static_cast<double>(s) * zgrid.dt;
    const double width = std::sqrt(2.0 * t);
    double sum = 0.0;
    const auto& k = solver.state();
    for (std::size_t j = 0; j < zgrid.n; ++j) {
      const double reach = half_width - 0.5 * std::abs(lag(zgrid, j));
      if (reach <= 0.0) continue;
      const double inner = 0.5 * (std::erf((reach - offset) / width) + std::erf((reach + offset) / width));
      sum += k[j] * inner;
    }
    out.t.push_back(t);
    out.log_value.push_back(std::log(sum * dz) + solver.log_scale());
  }
  return out;
}

MomentCurve energy_squared_curve(const ModelSpec& model, const SimGrid& zgrid, std::size_t record_every) {
  check_record(record_every);
  model.validate();
  zgrid.validate();
  if (!model.u0.compactly_supported()) throw InvalidArgument("energy_squared_curve: u0 must be compactly supported");

  // autocorrelation of u0 on the lag grid, by FFT
  const ScalarField u = model.u0.materialize(zgrid);
  const double dz = zgrid.dx();
  RealFft fft(zgrid.n);
  std::copy(u.values.begin(), u.values.end(), fft.real().begin());
  fft.forward();
  for (auto& c : fft.spectrum()) c = std::norm(c);
  fft.backward();
  std::vector<double> corr(fft.real().begin(), fft.real().end());
  for (double& v : corr) v = std::max(0.0, v * dz);

  // The autocorrelation must not wrap: its support is twice that of u0.
  double reach = 0.0;
  for (std::size_t j = 0; j < zgrid.n; ++j)
    if (u[j] != 0.0) reach = std::max(reach, std::abs(zgrid.x(j)));
  if (4.0 * reach > 0.5 * zgrid.length) throw InvalidArgument("energy_squared_curve: lag box too small for the support");

  LagSolver solver(model, zgrid, std::move(corr));
  MomentCurve out;
  const std::size_t total = zgrid.steps();
  for (std::size_t s = 1; s <= total; ++s) {
    solver.advance();
    if (s % record_every) continue;
    out.t.push_back(static_cast<double>(s) * zgrid.dt);
    out.log_value.push_back(std::log(solver.state()[0]) + solver.log_scale());
  }
  return out;
}

}  // namespace fracspde
