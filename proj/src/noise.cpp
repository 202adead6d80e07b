#include "fracspde/noise.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "fracspde/error.hpp"
#include "fracspde/kernel.hpp"

namespace fracspde {

void NoiseSpec::validate() const {
  if (kind == Kind::riesz && !(beta > 0.0 && beta < 1.0)) {
    std::ostringstream os;
    os << "noise: riesz beta must lie in (0, 1) in one dimension, got " << beta;
    throw InvalidArgument(os.str());
  }
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
  // splitmix64 finaliser applied to a golden-ratio walk from the parent
  std::uint64_t z = parent + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

NoiseGenerator::NoiseGenerator(const SimGrid& grid, const NoiseSpec& spec)
    : grid_(grid), spec_(spec), fft_(spec.colored() ? grid.n : 16) {
  grid_.validate();
  spec_.validate();
  if (spec_.colored()) {
    const double c = riesz_fourier_constant(1, spec_.beta);
    const double scale = grid_.dt / grid_.dx();
    amplitude_.assign(grid_.n / 2 + 1, 0.0);
    for (std::size_t m = 1; m < amplitude_.size(); ++m)
      amplitude_[m] = std::sqrt(c * std::pow(grid_.wavenumber(m), spec_.beta - 1.0) * scale);
  }
}

void NoiseGenerator::fill(std::uint64_t seed, std::span<double> out) {
  if (out.size() != grid_.n) throw InvalidArgument("NoiseGenerator::fill: output size differs from grid");
  std::mt19937_64 rng(seed);
  if (!spec_.colored()) {
    std::normal_distribution<double> normal(0.0, std::sqrt(grid_.dt / grid_.dx()));
    for (double& v : out) v = normal(rng);
    return;
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  auto real = fft_.real();
  for (double& v : real) v = normal(rng);
  fft_.forward();
  auto spec = fft_.spectrum();
  for (std::size_t m = 0; m < spec.size(); ++m) spec[m] *= amplitude_[m];
  fft_.backward();
  std::copy(real.begin(), real.end(), out.begin());
}

NoiseIncrement NoiseGenerator::draw(std::uint64_t seed) {
  NoiseIncrement inc{grid_, std::vector<double>(grid_.n)};
  fill(seed, inc.values);
  return inc;
}

NoiseIncrement white_increment(const SimGrid& grid, std::uint64_t seed) {
  return NoiseGenerator(grid, NoiseSpec::white()).draw(seed);
}

NoiseIncrement riesz_increment(const SimGrid& grid, double beta, std::uint64_t seed) {
  return NoiseGenerator(grid, NoiseSpec::riesz(beta)).draw(seed);
}

std::vector<CovarianceEstimate> empirical_covariance(std::span<const NoiseIncrement> samples,
                                                     std::span<const long> lags) {
  if (samples.size() < 100) throw InvalidArgument("empirical_covariance: need at least 100 samples");
  const std::size_t n = samples.front().values.size();
  for (const auto& s : samples)
    if (s.values.size() != n) throw InvalidArgument("empirical_covariance: samples differ in size");

  std::vector<CovarianceEstimate> out;
  const double count = static_cast<double>(samples.size());
  for (long lag : lags) {
    const std::size_t shift = static_cast<std::size_t>(((lag % static_cast<long>(n)) + static_cast<long>(n)) % static_cast<long>(n));
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const auto& s : samples) {
      double a = 0.0;
      for (std::size_t j = 0; j < n; ++j) a += s.values[j] * s.values[(j + shift) % n];
      a /= static_cast<double>(n);
      sum += a;
      sum_sq += a * a;
    }
    const double mean = sum / count;
    const double var = std::max(0.0, (sum_sq - count * mean * mean) / (count - 1.0));
    out.push_back({lag, mean, std::sqrt(var / count)});
  }
  return out;
}

}  // namespace fracspde
