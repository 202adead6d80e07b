#pragma once

#include <cstddef>
#include <vector>

#include "fracspde/grid.hpp"
#include "fracspde/spde.hpp"

namespace fracspde {

/// Second moments of the linear-sigma equation from the closed equation for
/// C_t(x, y) = E[u_t(x) u_t(y)] instead of from sampling:
///   d/dt C = (A_x + A_y) C + (lam a)^2 f(x - y) C,   A = -(-Delta)^{alpha/2},
/// with f = delta for white noise and |z|^{-beta} for Riesz noise.
/// Integrating over x + y, or reading the diagonal when u0 is constant,
/// leaves the one-dimensional problem in the lag z = x - y
///   d/dt c = -2 (-Delta_z)^{alpha/2} c + (lam a)^2 f(z) c,
/// which is solved on a periodic z-grid by Strang splitting (half potential,
/// exact kinetic step in Fourier space, half potential). The delta becomes
/// 1/dz in the z = 0 cell and |z|^{-beta} its cell average there. The
/// solution is renormalized as it grows so that log values far beyond the
/// double range are tracked.
struct MomentCurve {
  std::vector<double> t;
  std::vector<double> log_value;
};

/// log E|u_t(x)|^2 every `record_every` steps of `zgrid` (length, n, dt, t_end
/// of the lag grid). Constant u0 works for every alpha. Indicator u0 needs
/// alpha = 2, where the centre-of-mass coordinate separates and is a Gaussian
/// of variance t.
MomentCurve second_moment_curve(const ModelSpec& model, const SimGrid& zgrid, double x,
                                std::size_t record_every);

/// log of E_t^2 = int E|u_t(x)|^2 dx for compactly supported u0 (any alpha):
/// the lag equation started from the autocorrelation int u0(y + z) u0(y) dy.
MomentCurve energy_squared_curve(const ModelSpec& model, const SimGrid& zgrid, std::size_t record_every);

}  // namespace fracspde
