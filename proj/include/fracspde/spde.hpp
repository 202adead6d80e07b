#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fracspde/fft.hpp"
#include "fracspde/grid.hpp"
#include "fracspde/noise.hpp"

namespace fracspde {

struct SigmaSpec {
  enum class Kind { linear, pinched };
  Kind kind = Kind::linear;
  /// Slope for linear: sigma(x) = a x.
  double a = 1.0;
  /// Envelope for pinched: sigma(x) = x (l + (L - l) e^{-x^2}).
  double l_sigma = 1.0;
  double L_sigma = 1.0;

  static SigmaSpec linear(double a) { return {Kind::linear, a, 1.0, 1.0}; }
  static SigmaSpec pinched(double l, double L) { return {Kind::pinched, 1.0, l, L}; }

  double operator()(double x) const;
  /// Constants with lower() |x| <= |sigma(x)| <= upper() |x|.
  double lower() const;
  double upper() const;
  void validate() const;
};

struct InitialCondition {
  enum class Kind { constant, indicator, bump, point_mass };
  Kind kind = Kind::constant;
  /// constant: the value; bump: the height; point_mass: the mass.
  double value = 1.0;
  /// indicator: [a, b]; bump: centre a, half-width b; point_mass: location a.
  double a = 0.0;
  double b = 0.0;

  static InitialCondition constant(double v) { return {Kind::constant, v, 0.0, 0.0}; }
  static InitialCondition indicator(double lo, double hi) { return {Kind::indicator, 1.0, lo, hi}; }
  /// height * exp(1 - 1 / (1 - ((x - centre) / width)^2)) inside the support.
  static InitialCondition bump(double centre, double width, double height) {
    return {Kind::bump, height, centre, width};
  }
  static InitialCondition point_mass(double mass, double location) {
    return {Kind::point_mass, mass, location, 0.0};
  }

  bool compactly_supported() const { return kind != Kind::constant; }
  /// Pointwise value; not defined for point_mass.
  double operator()(double x) const;
  /// Cell averages on the grid (point_mass: mass/dx in the nearest cell).
  ScalarField materialize(const SimGrid& grid) const;
  void validate() const;
};

struct ModelSpec {
  double alpha = 2.0;
  NoiseSpec noise;
  /// lam = 0 is accepted and gives the deterministic heat flow.
  double lam = 1.0;
  SigmaSpec sigma;
  InitialCondition u0;
  int dim = 1;

  void validate() const;
};

/// Throws InvalidArgument unless the grid is usable for `model`: dt <= dx^alpha / 4
/// and L >= 8 t_end^{1/alpha}.
void check_simulation_grid(const ModelSpec& model, const SimGrid& grid);

/// Exponential-Euler stepper with its own FFT workspace and noise generator.
/// One instance per thread.
class Stepper {
 public:
  Stepper(const ModelSpec& model, const SimGrid& grid);

  /// v = u + lam sigma(u) * increment, then u = e^{-dt |k|^alpha} v mode by mode.
  void advance(std::span<double> u, std::span<const double> increment);
  /// Draws the increment for `seed` and advances.
  void advance_seeded(std::span<double> u, std::uint64_t seed);

  const ModelSpec& model() const { return model_; }
  const SimGrid& grid() const { return grid_; }

 private:
  ModelSpec model_;
  SimGrid grid_;
  std::vector<double> multiplier_;
  std::vector<double> increment_;
  RealFft fft_;
  NoiseGenerator noise_;
};

ScalarField step(const ScalarField& u, const ModelSpec& model, const SimGrid& grid,
                 const NoiseIncrement& increment);

struct Trajectory {
  std::vector<double> times;
  std::vector<ScalarField> snapshots;
};

/// Snapshots at `times`, each a multiple of dt in [0, t_end]. Step m draws
/// its noise from derive_seed(seed, m).
Trajectory simulate_path(const ModelSpec& model, const SimGrid& grid, std::uint64_t seed,
                         std::span<const double> times);

/// Step indices for snapshot times; throws unless each is a multiple of dt in [0, t_end].
std::vector<std::size_t> snapshot_steps(const SimGrid& grid, std::span<const double> times);

struct PathFailure {
  std::size_t path = 0;
  std::uint64_t seed = 0;
  double time = 0.0;
  std::int64_t step = 0;
};

/// Called at each snapshot with the current field; appends per-path
/// statistics to `out`. Must be safe to call concurrently.
using SnapshotVisitor =
    std::function<void(std::size_t snapshot, std::span<const double> u, std::vector<double>& out)>;

struct EnsembleRun {
  /// outputs[p] holds what the visitor appended for path p, in snapshot order.
  std::vector<std::vector<double>> outputs;
  /// snapshots_done[p] < number of snapshots when path p blew up.
  std::vector<std::size_t> snapshots_done;
  std::vector<PathFailure> failures;
};

/// Path p uses seed derive_seed(master_seed, p). `threads` <= 0 uses the
/// OpenMP default. Outputs do not depend on the thread count or schedule.
EnsembleRun run_ensemble(const ModelSpec& model, const SimGrid& grid, std::span<const std::size_t> steps,
                         std::size_t n_paths, std::uint64_t master_seed, const SnapshotVisitor& visit,
                         int threads = 0);
/// Single-threaded reference with identical results.
EnsembleRun run_ensemble_serial(const ModelSpec& model, const SimGrid& grid, std::span<const std::size_t> steps,
                                std::size_t n_paths, std::uint64_t master_seed, const SnapshotVisitor& visit);

struct MomentTable {
  std::vector<double> times;
  std::vector<double> probes;
  std::vector<int> p_orders;
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
  /// Indexed [time][probe][order]; see index().
  std::vector<double> estimates;
  std::vector<double> std_errors;
  std::vector<bool> valid;
  std::vector<PathFailure> failures;

  std::size_t index(std::size_t ti, std::size_t pi, std::size_t oi) const {
    return (ti * probes.size() + pi) * p_orders.size() + oi;
  }
  double estimate(std::size_t ti, std::size_t pi, std::size_t oi) const { return estimates[index(ti, pi, oi)]; }
  double std_error(std::size_t ti, std::size_t pi, std::size_t oi) const { return std_errors[index(ti, pi, oi)]; }
  bool is_valid(std::size_t ti, std::size_t pi, std::size_t oi) const { return valid[index(ti, pi, oi)]; }
  /// Position of order p, or throws.
  std::size_t order_index(int p) const;
  std::size_t probe_index(double x) const;
};

struct McOptions {
  int threads = 0;
  /// Average |u|^p over every cell instead of reading the probe cell. Only
  /// allowed for constant u0, where the law of u_t(x) does not depend on x;
  /// every probe then reports the same value.
  bool spatial_average = false;
};

/// Means of |u_t(x)|^p over n_paths seeded paths with standard errors.
/// Per-path results are buffered and reduced in path-index order. Cells at or
/// after a blow-up are marked invalid and hold NaN.
MomentTable mc_moments(const ModelSpec& model, const SimGrid& grid, std::span<const double> times,
                       std::span<const double> probes, std::span<const int> p_orders, std::size_t n_paths,
                       std::uint64_t master_seed, const McOptions& options = {});
MomentTable mc_moments_serial(const ModelSpec& model, const SimGrid& grid, std::span<const double> times,
                              std::span<const double> probes, std::span<const int> p_orders,
                              std::size_t n_paths, std::uint64_t master_seed, const McOptions& options = {});

/// (G u0)_t on the grid.
ScalarField deterministic_part(const ModelSpec& model, const SimGrid& grid, double t);

}  // namespace fracspde
