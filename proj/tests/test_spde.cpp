#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "fracspde/error.hpp"
#include "fracspde/kernel.hpp"
#include "fracspde/renewal.hpp"
#include "fracspde/spde.hpp"

using namespace fracspde;

namespace {

ModelSpec anderson(double lam, InitialCondition u0 = InitialCondition::constant(1.0)) {
  ModelSpec m;
  m.alpha = 2.0;
  m.noise = NoiseSpec::white();
  m.lam = lam;
  m.sigma = SigmaSpec::linear(1.0);
  m.u0 = u0;
  return m;
}

SimGrid grid_for(double length, std::size_t n, double t_end, double alpha = 2.0) {
  const double dx = length / static_cast<double>(n);
  const double dt = std::pow(dx, alpha) / 4.0;
  // t_end rounded to whole steps
  return SimGrid{length, n, dt, std::round(t_end / dt) * dt};
}

// e^{lam^4 t / 8} erfc(-lam^2 sqrt(t/8)): second moment of the white-noise
// parabolic Anderson model with u0 = 1.
double anderson_second_moment(double lam, double t) {
  return std::exp(std::pow(lam, 4) * t / 8.0) * std::erfc(-lam * lam * std::sqrt(t / 8.0));
}

}  // namespace

TEST_CASE("sigma envelopes") {
  const std::vector<SigmaSpec> cases{SigmaSpec::linear(1.5), SigmaSpec::linear(-0.7), SigmaSpec::pinched(0.5, 2.0),
                                     SigmaSpec::pinched(1.0, 1.0)};
  for (const auto& s : cases) {
    CHECK(s(0.0) == 0.0);
    for (double x = -6.0; x <= 6.0; x += 0.173) {
      CHECK(std::abs(s(x)) >= s.lower() * std::abs(x) * (1.0 - 1e-14));
      CHECK(std::abs(s(x)) <= s.upper() * std::abs(x) * (1.0 + 1e-14));
    }
  }
  // the pinched nonlinearity is really nonlinear
  const auto p = SigmaSpec::pinched(0.5, 2.0);
  CHECK(p(0.01) / 0.01 == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(p(5.0) / 5.0 == doctest::Approx(0.5).epsilon(1e-9));
  CHECK_THROWS_AS(SigmaSpec::pinched(2.0, 1.0).validate(), InvalidArgument);
  CHECK_THROWS_AS(SigmaSpec::pinched(0.0, 1.0).validate(), InvalidArgument);
  CHECK_THROWS_AS(SigmaSpec::linear(0.0).validate(), InvalidArgument);
}

TEST_CASE("initial conditions") {
  const SimGrid g{16.0, 256, 1e-3, 1.0};
  const auto ind = InitialCondition::indicator(-1.0, 1.0).materialize(g);
  double mass = 0.0;
  for (double v : ind.values) mass += v * g.dx();
  CHECK(mass == doctest::Approx(2.0).epsilon(1e-12));
  const auto odd = InitialCondition::indicator(-0.3, 0.71).materialize(g);
  mass = 0.0;
  for (double v : odd.values) mass += v * g.dx();
  CHECK(mass == doctest::Approx(1.01).epsilon(1e-12));

  const auto pm = InitialCondition::point_mass(2.5, 0.0).materialize(g);
  CHECK(pm[g.nearest_cell(0.0)] == doctest::Approx(2.5 / g.dx()));
  CHECK(pm.max() == pm[g.nearest_cell(0.0)]);

  const auto bump = InitialCondition::bump(1.0, 0.5, 3.0);
  CHECK(bump(1.0) == doctest::Approx(3.0));
  CHECK(bump(1.5) == 0.0);
  CHECK(bump(0.6) > 0.0);

  CHECK_THROWS_AS(InitialCondition::indicator(1.0, 1.0).validate(), InvalidArgument);
  CHECK_THROWS_AS(InitialCondition::constant(0.0).validate(), InvalidArgument);
  CHECK_THROWS_AS(InitialCondition::point_mass(-1.0, 0.0).validate(), InvalidArgument);

  ModelSpec m = anderson(1.0, InitialCondition::point_mass(1.0, 0.0));
  CHECK_NOTHROW(m.validate());
  m.noise = NoiseSpec::riesz(0.5);
  CHECK_THROWS_AS(m.validate(), InvalidArgument);
}

TEST_CASE("model and grid validation") {
  ModelSpec m = anderson(1.0);
  m.alpha = 1.0;
  CHECK_THROWS_AS(m.validate(), InvalidArgument);
  m.alpha = 2.1;
  CHECK_THROWS_AS(m.validate(), InvalidArgument);
  m = anderson(-1.0);
  CHECK_THROWS_AS(m.validate(), InvalidArgument);

  m = anderson(1.0);
  CHECK_NOTHROW(check_simulation_grid(m, grid_for(16.0, 128, 1.0)));
  CHECK_THROWS_AS(check_simulation_grid(m, SimGrid{16.0, 128, 0.01, 1.0}), InvalidArgument);  // dt too large
  CHECK_THROWS_AS(check_simulation_grid(m, grid_for(4.0, 64, 1.0)), InvalidArgument);         // box too small
}

TEST_CASE("single steps") {
  const SimGrid g = grid_for(16.0, 128, 1.0);
  const ModelSpec flat = anderson(0.0);
  const ScalarField one(g, 1.0);
  const NoiseIncrement inc = white_increment(g, 3);
  const auto same = step(one, flat, g, inc);
  for (double v : same.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));

  // lam = 0 is the heat multiplier e^{-dt k^2}, here applied by a naive DFT.
  // (semigroup_apply itself refuses a step this short on this grid because
  // the band-limited kernel rings below its clamp threshold.)
  const ModelSpec ind = anderson(0.0, InitialCondition::indicator(-1.0, 1.0));
  const auto u0 = ind.u0.materialize(g);
  const auto a = step(u0, ind, g, inc);
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t j = 0; j < g.n; ++j) {
    double acc = 0.0;
    for (std::size_t m = 0; m < g.n; ++m) {
      double re = 0.0, im = 0.0;
      for (std::size_t l = 0; l < g.n; ++l) {
        const double ph = two_pi * static_cast<double>(m * l % g.n) / static_cast<double>(g.n);
        re += u0[l] * std::cos(ph);
        im -= u0[l] * std::sin(ph);
      }
      const double damp = std::exp(-g.dt * std::pow(g.wavenumber(m), 2.0));
      const double ph = two_pi * static_cast<double>(m * j % g.n) / static_cast<double>(g.n);
      acc += damp * (re * std::cos(ph) - im * std::sin(ph));
    }
    CHECK(a[j] == doctest::Approx(acc / static_cast<double>(g.n)).epsilon(1e-11).scale(1.0));
  }

  // zero increment with lam > 0 is the same as lam = 0
  const NoiseIncrement zero{g, std::vector<double>(g.n, 0.0)};
  const auto c = step(u0, anderson(3.0, ind.u0), g, zero);
  for (std::size_t j = 0; j < g.n; ++j) CHECK(c[j] == a[j]);

  // one explicit step by hand: v = u + lam u dW, then the heat multiplier
  const ModelSpec lin = anderson(0.7);
  const auto d = step(one, lin, g, inc);
  double mean_v = 0.0;
  for (double w : inc.values) mean_v += 1.0 + 0.7 * w;
  mean_v /= static_cast<double>(g.n);
  CHECK(d.mean() == doctest::Approx(mean_v).epsilon(1e-13));

  CHECK_THROWS_AS(step(ScalarField(SimGrid{16.0, 64, g.dt, 1.0}), lin, g, inc), InvalidArgument);
}

TEST_CASE("paths") {
  const SimGrid g = grid_for(16.0, 128, 1.0);
  const std::vector<double> times{0.0, 0.25, 0.5, 1.0};

  const ModelSpec det = anderson(0.0, InitialCondition::indicator(-1.0, 1.0));
  const auto traj = simulate_path(det, g, 1, times);
  REQUIRE(traj.snapshots.size() == times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto ref = deterministic_part(det, g, times[i]);
    for (std::size_t j = 0; j < g.n; ++j) CHECK(traj.snapshots[i][j] == doctest::Approx(ref[j]).scale(1.0).epsilon(1e-11));
  }

  const ModelSpec pam = anderson(1.0);
  const auto p1 = simulate_path(pam, g, 99, times);
  const auto p2 = simulate_path(pam, g, 99, times);
  for (std::size_t i = 0; i < times.size(); ++i) CHECK(p1.snapshots[i].values == p2.snapshots[i].values);
  CHECK(simulate_path(pam, g, 100, times).snapshots.back().values != p1.snapshots.back().values);

  // positivity of the parabolic Anderson model over 100 paths
  double lowest = 1e300;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto p = simulate_path(pam, g, derive_seed(2024, s), std::vector<double>{0.5, 1.0});
    for (const auto& f : p.snapshots) lowest = std::min(lowest, f.min());
  }
  MESSAGE("lowest value over 100 paths: " << lowest);
  CHECK(lowest > 0.0);

  CHECK_THROWS_AS(simulate_path(pam, g, 1, std::vector<double>{0.3 * g.dt}), InvalidArgument);
  CHECK_THROWS_AS(simulate_path(pam, g, 1, std::vector<double>{2.0}), InvalidArgument);
}

TEST_CASE("deterministic part") {
  // cell-averaged indicator: the error is O(dx^2), 3e-7 at dx = 1/256
  const SimGrid g{32.0, 8192, 1e-4, 1.0};
  CHECK(deterministic_part(anderson(0.0, InitialCondition::constant(2.5)), g, 3.0).at(0.7) ==
        doctest::Approx(2.5).epsilon(1e-14));
  CHECK(deterministic_part(anderson(0.0, InitialCondition::indicator(-1.0, 1.0)), g, 1.0).at(0.0) ==
        doctest::Approx(std::erf(0.5)).epsilon(1e-6));

  // point mass: p_t(0) = t^{-1/alpha} p_1(0)
  for (double alpha : {1.5, 2.0}) {
    ModelSpec m = anderson(0.0, InitialCondition::point_mass(1.0, 0.0));
    m.alpha = alpha;
    const SimGrid wide{alpha == 2.0 ? 32.0 : 512.0, alpha == 2.0 ? 4096u : 65536u, 1e-4, 1.0};
    std::vector<double> lx, ly;
    for (double t : {0.05, 0.1, 0.2, 0.4}) {
      lx.push_back(std::log(t));
      ly.push_back(std::log(deterministic_part(m, wide, t).at(0.0)));
    }
    const double slope = (ly.back() - ly.front()) / (lx.back() - lx.front());
    CAPTURE(alpha);
    CHECK(slope == doctest::Approx(-1.0 / alpha).epsilon(0.01));
  }
}

TEST_CASE("moment tables") {
  const SimGrid g = grid_for(16.0, 128, 1.0);
  const std::vector<double> times{0.25, 0.5, 1.0};
  const std::vector<double> probes{0.0, 0.5, 1.5};
  const std::vector<int> orders{1, 2};

  SUBCASE("deterministic runs have zero spread") {
    const ModelSpec det = anderson(0.0, InitialCondition::indicator(-1.0, 1.0));
    const auto t = mc_moments(det, g, times, probes, orders, 100, 5);
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
      const auto ref = deterministic_part(det, g, times[ti]);
      for (std::size_t pi = 0; pi < probes.size(); ++pi) {
        CHECK(t.estimate(ti, pi, 1) == doctest::Approx(std::pow(ref.at(probes[pi]), 2)).epsilon(1e-10));
        CHECK(t.std_error(ti, pi, 1) == 0.0);
        CHECK(t.std_error(ti, pi, 0) == 0.0);
      }
    }
  }

  SUBCASE("mean identity and moment ordering") {
    const ModelSpec m = anderson(1.0, InitialCondition::indicator(-1.0, 1.0));
    const auto t = mc_moments(m, g, times, probes, orders, 400, 17);
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
      const auto ref = deterministic_part(m, g, times[ti]);
      for (std::size_t pi = 0; pi < probes.size(); ++pi) {
        CAPTURE(ti);
        CAPTURE(pi);
        // u > 0 here, so E|u| = E u
        CHECK(std::abs(t.estimate(ti, pi, 0) - ref.at(probes[pi])) < 3.0 * t.std_error(ti, pi, 0));
        CHECK(t.estimate(ti, pi, 1) >= t.estimate(ti, pi, 0) * t.estimate(ti, pi, 0));
        CHECK(t.is_valid(ti, pi, 1));
      }
    }
  }

  SUBCASE("thread count does not change results") {
    const ModelSpec m = anderson(1.0, InitialCondition::indicator(-1.0, 1.0));
    const auto serial = mc_moments_serial(m, g, times, probes, orders, 120, 8);
    for (int threads : {1, 3}) {
      const auto par = mc_moments(m, g, times, probes, orders, 120, 8, McOptions{threads, false});
      CHECK(par.estimates == serial.estimates);
      CHECK(par.std_errors == serial.std_errors);
    }
  }

  SUBCASE("second moment is increasing in lam") {
    std::vector<double> est;
    std::vector<double> err;
    for (double lam : {0.5, 1.0, 2.0}) {
      const auto t = mc_moments(anderson(lam), g, times, std::vector<double>{0.0}, std::vector<int>{2}, 200, 4,
                                McOptions{0, true});
      est.push_back(t.estimate(2, 0, 0));
      err.push_back(t.std_error(2, 0, 0));
    }
    CHECK(est[0] + err[0] < est[1] - err[1]);
    CHECK(est[1] + err[1] < est[2] - err[2]);
  }

  SUBCASE("blow-up is reported and marks cells invalid") {
    const auto t = mc_moments(anderson(1e4), g, times, probes, orders, 100, 2);
    CHECK_FALSE(t.failures.empty());
    CHECK(t.failures.front().time > 0.0);
    CHECK_FALSE(t.is_valid(2, 0, 1));
    CHECK(std::isnan(t.estimate(2, 0, 1)));
    CHECK_THROWS_AS(simulate_path(anderson(1e4), g, derive_seed(2, t.failures.front().path), times), BlowUpError);
  }

  CHECK_THROWS_AS(mc_moments(anderson(1.0), g, times, probes, orders, 99, 1), InvalidArgument);
  CHECK_THROWS_AS(mc_moments(anderson(1.0), g, times, probes, std::vector<int>{1}, 100, 1), InvalidArgument);
  CHECK_THROWS_AS(mc_moments(anderson(1.0, InitialCondition::indicator(-1, 1)), g, times, probes, orders, 100, 1,
                             McOptions{0, true}),
                  InvalidArgument);
}

TEST_CASE("calibration case against the exact second moment") {
  // u0 = 1, white noise, alpha = 2, lam = 1: E u_t^2 = e^{t/8} erfc(-sqrt(t/8))
  const std::vector<double> times{0.5, 1.0};
  const std::vector<double> probe{0.0};
  const std::vector<int> orders{2};
  std::vector<double> at_one;
  for (std::size_t n : {64u, 128u}) {
    const SimGrid g = grid_for(8.0, n, 1.0);
    const auto t = mc_moments(anderson(1.0), g, times, probe, orders, 400, 11, McOptions{0, true});
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
      const double exact = anderson_second_moment(1.0, times[ti]);
      MESSAGE("n=" << n << " t=" << times[ti] << " mc=" << t.estimate(ti, 0, 0) << " +- " << t.std_error(ti, 0, 0)
                   << " exact=" << exact);
      CHECK(std::abs(t.estimate(ti, 0, 0) - exact) < 3.0 * t.std_error(ti, 0, 0) + 0.02 * exact);
    }
    at_one.push_back(t.estimate(1, 0, 0));
  }
  // grid convergence: halving dx (and dt with it) moves the moment by < 10%
  CHECK(std::abs(at_one[1] / at_one[0] - 1.0) < 0.1);
}

TEST_CASE("second moment stays below the renewal envelope") {
  // F(t) <= 1 + (lam L_sigma)^2 int p_{2(t-s)}(0) F(s) ds, i.e. kappa = (lam L)^2 / sqrt(8 pi), rho = 1/2
  const SimGrid g = grid_for(8.0, 128, 1.0);
  ModelSpec m = anderson(1.5);
  m.sigma = SigmaSpec::pinched(0.5, 1.0);
  const std::vector<double> times{0.25, 0.5, 0.75, 1.0};
  const auto t = mc_moments(m, g, times, std::vector<double>{0.0}, std::vector<int>{2}, 300, 21, McOptions{0, true});
  const double kappa = std::pow(m.lam * m.sigma.upper(), 2) / std::sqrt(8.0 * std::numbers::pi);
  const auto env = solve_volterra({1.0, kappa, 0.5}, 1.0, 1024);
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    const double bound = env.f[static_cast<std::size_t>(std::llround(times[ti] * 1024))];
    CAPTURE(times[ti]);
    CHECK(t.estimate(ti, 0, 0) <= bound + 3.0 * t.std_error(ti, 0, 0));
  }
}
