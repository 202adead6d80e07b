#include "fracspde/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "fracspde/error.hpp"

namespace fracspde {

std::size_t SimGrid::nearest_cell(double pos) const {
  const double nd = static_cast<double>(n);
  double idx = std::round(pos / dx()) + static_cast<double>(n / 2);
  idx = std::fmod(idx, nd);
  if (idx < 0) idx += nd;
  return static_cast<std::size_t>(idx) % n;
}

double SimGrid::wavenumber(std::size_t m) const {
  const std::size_t mm = m <= n / 2 ? m : n - m;
  return 2.0 * std::numbers::pi * static_cast<double>(mm) / length;
}

std::size_t SimGrid::steps() const {
  return static_cast<std::size_t>(std::llround(t_end / dt));
}

void SimGrid::validate_spatial() const {
  if (n < 16 || (n & (n - 1)) != 0) {
    std::ostringstream os;
    os << "grid: n must be a power of two >= 16, got " << n;
    throw InvalidArgument(os.str());
  }
  if (!(length > 0.0) || !std::isfinite(length)) throw InvalidArgument("grid: length must be positive");
}

void SimGrid::validate() const {
  validate_spatial();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("grid: dt must be positive");
  if (!(t_end >= dt) || !std::isfinite(t_end)) throw InvalidArgument("grid: t_end must be >= dt");
}

ScalarField::ScalarField(const SimGrid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.n) throw InvalidArgument("ScalarField: value count differs from grid size");
  for (double x : values)
    if (!std::isfinite(x)) throw InvalidArgument("ScalarField: non-finite value");
}

double ScalarField::max() const { return *std::max_element(values.begin(), values.end()); }
double ScalarField::min() const { return *std::min_element(values.begin(), values.end()); }
double ScalarField::mean() const {
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

}  // namespace fracspde
