#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fracspde {

/// Periodic 1-d lattice of `n` cells on [-length/2, length/2) plus the time
/// step used by the simulator. Cell j sits at x_j = (j - n/2) * dx, so x = 0 is
/// always a grid point.
struct SimGrid {
  double length = 0.0;
  std::size_t n = 0;
  double dt = 0.0;
  double t_end = 0.0;

  double dx() const { return length / static_cast<double>(n); }
  double x(std::size_t j) const {
    return (static_cast<double>(j) - static_cast<double>(n / 2)) * dx();
  }
  /// Index of the cell whose centre is nearest to `pos` (wrapped onto the torus).
  std::size_t nearest_cell(double pos) const;
  /// Angular wavenumber of DFT mode m, in [0, pi/dx].
  double wavenumber(std::size_t m) const;
  std::size_t steps() const;

  /// Throws InvalidArgument unless n >= 16 is a power of two, dx > 0, dt > 0 and t_end >= dt.
  void validate() const;
  /// Same checks minus the time-stepping fields; for purely spatial uses.
  void validate_spatial() const;
};

/// Values of a real function on a SimGrid.
struct ScalarField {
  SimGrid grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const SimGrid& g, double fill = 0.0) : grid(g), values(g.n, fill) {}
  ScalarField(const SimGrid& g, std::vector<double> v);

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t j) { return values[j]; }
  double operator[](std::size_t j) const { return values[j]; }
  std::span<const double> view() const { return values; }

  double max() const;
  double min() const;
  double mean() const;
  /// Value at the cell nearest to `pos`.
  double at(double pos) const { return values[grid.nearest_cell(pos)]; }
};

}  // namespace fracspde
