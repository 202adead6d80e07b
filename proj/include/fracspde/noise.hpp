#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fracspde/fft.hpp"
#include "fracspde/grid.hpp"

namespace fracspde {

struct NoiseSpec {
  enum class Kind { white, riesz };
  Kind kind = Kind::white;
  /// Riesz exponent, used only when kind == riesz.
  double beta = 0.0;

  static NoiseSpec white() { return {}; }
  static NoiseSpec riesz(double beta) { return {Kind::riesz, beta}; }
  bool colored() const { return kind == Kind::riesz; }
  /// 0 < beta < 1 for riesz.
  void validate() const;
};

/// Noise integrated over one time slab, one value per cell.
struct NoiseIncrement {
  SimGrid grid;
  std::vector<double> values;
};

/// Stream seeds. A path's seed depends only on (master, path) and a step's
/// seed only on (path seed, step), so any schedule reproduces the same noise.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index);

/// Reusable generator for one grid and noise kind: holds the FFT workspace and
/// the spectral amplitudes so that per-step generation does not allocate.
///
/// White: i.i.d. N(0, dt/dx) per cell.
/// Riesz: eta i.i.d. N(0, 1), W = IFFT(g_m FFT(eta)) with
///   g_m^2 = c_{1,beta} |k_m|^{beta-1} dt / dx and g_0 = 0,
/// so that Cov(W_i, W_j) ~ dt |x_i - x_j|^{-beta} for lags well inside the box.
class NoiseGenerator {
 public:
  NoiseGenerator(const SimGrid& grid, const NoiseSpec& spec);

  void fill(std::uint64_t seed, std::span<double> out);
  NoiseIncrement draw(std::uint64_t seed);

  const SimGrid& grid() const { return grid_; }
  const NoiseSpec& spec() const { return spec_; }

 private:
  SimGrid grid_;
  NoiseSpec spec_;
  std::vector<double> amplitude_;
  RealFft fft_;
};

NoiseIncrement white_increment(const SimGrid& grid, std::uint64_t seed);
NoiseIncrement riesz_increment(const SimGrid& grid, double beta, std::uint64_t seed);

struct CovarianceEstimate {
  long lag = 0;
  double value = 0.0;
  double std_error = 0.0;
};

/// E[W_j W_{j+lag}] averaged over j (the fields have zero mean by
/// construction, so no mean is subtracted and the estimate is unbiased).
/// Standard errors come from the spread of the per-sample spatial averages.
std::vector<CovarianceEstimate> empirical_covariance(std::span<const NoiseIncrement> samples,
                                                     std::span<const long> lags);

}  // namespace fracspde
