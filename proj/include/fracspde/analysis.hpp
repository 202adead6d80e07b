#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "fracspde/fit.hpp"
#include "fracspde/moment_equation.hpp"
#include "fracspde/spde.hpp"

namespace fracspde {

/// Slope of log E|u_t(probe)|^2 against t over [window.first, window.second].
/// Needs >= 5 valid, positive points in the window. The slope error combines
/// the residual scatter with the MC standard errors (sigma of log E is SE/E).
FitReport growth_rate(const MomentTable& table, double probe, std::pair<double, double> window);
/// Same fit on a curve that already holds log values.
FitReport growth_rate(const MomentCurve& curve, std::pair<double, double> window);
/// Default window: the latter half of the recorded horizon.
std::pair<double, double> latter_half(const std::vector<double>& times);

enum class ExcitationMode {
  /// value = log of the quantity at fixed t; fits log(value) against log lam.
  fixed_t_moment,
  /// value = a growth rate; fits log(value) against log lam.
  growth_rate,
};

struct LambdaSample {
  double lam = 0.0;
  double value = 0.0;
};

/// Needs >= 4 samples whose lam span at least a factor of 8. In fixed_t_moment
/// mode a value <= 0 (quantity <= 1) has no log log and is rejected.
FitReport excitation_index(std::span<const LambdaSample> samples, ExcitationMode mode);

struct EnergyCurve {
  std::vector<double> lambdas;
  std::vector<double> energies;
  double t = 0.0;
};

/// sqrt(sum_x E|u_t(x)|^2 dx) from a table whose probes are every cell of `grid`.
double energy(const MomentTable& table, const SimGrid& grid, double t);

struct HolderOptions {
  int threads = 0;
  /// Average the increments over all cells; constant u0 only.
  bool spatial_average = false;
  double probe = 0.0;
};

struct IncrementMoments {
  std::vector<double> h;
  std::vector<double> moment;
  std::vector<double> std_error;
};

/// MC estimate of E|u_{t+h}(x) - u_t(x)|^p for each h. base_t + h must be on the time grid.
IncrementMoments increment_moments(const ModelSpec& model, const SimGrid& grid, double base_t,
                                   std::span<const double> h_list, int p, std::size_t n_paths, std::uint64_t seed,
                                   const HolderOptions& options = {});
/// Slope of log moment against log h, divided by p.
FitReport holder_fit(const IncrementMoments& m, int p);
/// increment_moments followed by holder_fit.
FitReport holder_exponent(const ModelSpec& model, const SimGrid& grid, double base_t, std::span<const double> h_list,
                          int p, std::size_t n_paths, std::uint64_t seed, const HolderOptions& options = {});

/// int_0^t int_{R^d} |hat p_{t-s+h}(xi) - hat p_{t-s}(xi)|^2 |xi|^{-(d-beta)} dxi ds
/// for each h. The s-integral is done in closed form,
///   int_0^t e^{-2(t-s)r^a} ds = (1 - e^{-2t r^a}) / (2 r^a),
/// and the radial integral in r = |xi| by Gauss-Kronrod on a log scale with
/// the r^{beta-1-a} tail added analytically.
std::vector<std::pair<double, double>> increment_integral_check(double alpha, double beta, int dim, double t,
                                                                std::span<const double> h_list, double q);

}  // namespace fracspde
