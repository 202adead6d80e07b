#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "fracspde/grid.hpp"

namespace fracspde {

/// Symmetric alpha-stable semigroup generated by -(-Delta)^{alpha/2} on R^dim.
struct StableKernelParams {
  double alpha = 2.0;
  int dim = 1;

  void validate() const;
};

/// Density value together with how it was obtained. `log_value` stays finite
/// where `value` underflows (far Gaussian tails).
struct DensityEstimate {
  double value = 0.0;
  double log_value = 0.0;
  double abs_error = 0.0;
  enum class Route { fourier, integral } route = Route::fourier;
};

/// Empirical constants of the envelope
///   c_lower * (t^{-d/a} ^ t/r^{d+a}) <= p_t(r) <= c_upper * (...)
/// over a sampled (t, r) grid. The log fields are authoritative when the
/// ratio underflows.
struct KernelBoundReport {
  double c_lower = 0.0;
  double c_upper = 0.0;
  double log_c_lower = 0.0;
  double log_c_upper = 0.0;
  /// Largest amount by which a sampled ratio was non-positive (0 when every
  /// sampled density is strictly positive).
  double max_ratio_violation = 0.0;
  std::size_t sample_count = 0;
};

/// exp(-t xi^alpha).
double kernel_fourier(const StableKernelParams& params, double t, double xi);

/// Transition density p_t(r) in d = 1. Near the origin it is computed from
/// (1/pi) int_0^Xi e^{-t xi^a} cos(xi r) d xi with Xi chosen so the analytic
/// tail bound is below 1e-12; for r t^{-1/a} > 2 and a != 1 the Zolotarev
/// integral representation is used instead, which keeps relative accuracy in
/// the tails. Throws ConvergenceError if either quadrature misses tolerance.
double kernel_density(const StableKernelParams& params, double t, double r);
DensityEstimate kernel_density_estimate(const StableKernelParams& params, double t, double r);

/// The two routes individually, for cross-checking.
DensityEstimate density_by_fourier_inversion(const StableKernelParams& params, double t, double r);
DensityEstimate density_by_zolotarev_integral(const StableKernelParams& params, double t, double r);

/// |p_t(r) - t^{-d/a} p_1(t^{-1/a} r)|, both sides evaluated by separate quadratures.
double kernel_scaling_check(const StableKernelParams& params, double t, double r);

/// Mass of p_t split into 2*int_0^R p_t dr by quadrature and the analytic tail
/// 2*int_R^inf p_t dr from the large-r expansion of the density.
struct MassSplit {
  double core = 0.0;
  double tail = 0.0;
  double total() const { return core + tail; }
};
MassSplit kernel_mass(const StableKernelParams& params, double t, double radius);

KernelBoundReport verify_two_sided_bounds(const StableKernelParams& params,
                                          std::span<const double> t_grid,
                                          std::span<const double> r_grid);

/// (G u)_t: convolution with p_t on the periodic grid, done mode by mode.
/// Negative ringing above -1e-8 * max(u0) is clamped to 0 for nonnegative u0;
/// anything deeper, or a kernel that does not fit in the box, is a ResolutionError.
ScalarField semigroup_apply(const ScalarField& u0, const StableKernelParams& params, double t);

struct LowerBoundSeries {
  /// (t, t^{d/a} * inf_{|x| <= t^{1/a}} (G u)_t(x)).
  std::vector<std::pair<double, double>> values;
  /// First sampled t from which every later value is positive.
  double threshold_t = 0.0;
  /// min of the values from threshold_t on.
  double c_lower = 0.0;
  /// max / min of the values from threshold_t on.
  double spread = 0.0;
};

LowerBoundSeries pde_lower_bound_check(const ScalarField& u0, const StableKernelParams& params,
                                       std::span<const double> t_grid);

/// int p_{2t}(w) |w|^{-beta} dw, the worst case of the double kernel integral
/// against the Riesz kernel. Scales exactly as t^{-beta/alpha}.
double colored_kernel_integral(const StableKernelParams& params, double beta, double t);

}  // namespace fracspde

namespace fracspde {

/// c_{d,beta} in  FT[|x|^{-beta}](xi) = c_{d,beta} |xi|^{beta-d}, 0 < beta < d.
double riesz_fourier_constant(int dim, double beta);

/// Area of the unit sphere S^{d-1} (2 for d = 1).
double unit_sphere_area(int dim);

}  // namespace fracspde
