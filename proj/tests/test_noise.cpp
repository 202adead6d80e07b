#include "doctest.h"

#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "fracspde/error.hpp"
#include "fracspde/noise.hpp"

using namespace fracspde;

namespace {

std::vector<NoiseIncrement> draws(const SimGrid& g, const NoiseSpec& spec, std::uint64_t master, int count) {
  NoiseGenerator gen(g, spec);
  std::vector<NoiseIncrement> out;
  for (int i = 0; i < count; ++i) out.push_back(gen.draw(derive_seed(master, i)));
  return out;
}

}  // namespace

TEST_CASE("seed derivation") {
  CHECK(derive_seed(42, 0) == derive_seed(42, 0));
  CHECK(derive_seed(42, 0) != derive_seed(42, 1));
  CHECK(derive_seed(42, 0) != derive_seed(43, 0));
  // path 1, step 0 must not collide with path 0, step 1
  CHECK(derive_seed(derive_seed(7, 1), 0) != derive_seed(derive_seed(7, 0), 1));
}

TEST_CASE("white increments") {
  const SimGrid g{8.0, 64, 0.01, 1.0};
  const auto a = white_increment(g, 123);
  const auto b = white_increment(g, 123);
  CHECK(a.values == b.values);
  CHECK(white_increment(g, 124).values != a.values);

  // one cell over 1e5 independent draws
  const double var = g.dt / g.dx();
  NoiseGenerator gen(g, NoiseSpec::white());
  std::vector<double> buf(g.n);
  const int count = 100000;
  double s1 = 0.0, s2 = 0.0, s4 = 0.0;
  for (int i = 0; i < count; ++i) {
    gen.fill(derive_seed(99, i), buf);
    const double v = buf[17];
    s1 += v;
    s2 += v * v;
    s4 += v * v * v * v;
  }
  const double mean = s1 / count;
  const double m2 = s2 / count;
  const double m4 = s4 / count;
  // Var(W^2) = 2 var^2, Var(W^4) = 96 var^4 for a Gaussian
  CHECK(std::abs(mean) < 3.0 * std::sqrt(var / count));
  CHECK(std::abs(m2 - var) < 3.0 * std::sqrt(2.0 * var * var / count));
  const double kurt = m4 / (m2 * m2);
  CHECK(std::abs(kurt - 3.0) < 3.0 * std::sqrt(24.0 / count));
}

TEST_CASE("white increments are uncorrelated in space and time") {
  const SimGrid g{8.0, 64, 0.01, 1.0};
  const auto s = draws(g, NoiseSpec::white(), 5, 2000);
  const std::vector<long> lags{0, 1, 5};
  const auto cov = empirical_covariance(s, lags);
  CHECK(std::abs(cov[0].value - g.dt / g.dx()) < 3.0 * cov[0].std_error);
  CHECK(std::abs(cov[1].value) < 3.0 * cov[1].std_error);
  CHECK(std::abs(cov[2].value) < 3.0 * cov[2].std_error);

  // consecutive steps of one path
  const std::uint64_t path = derive_seed(11, 3);
  NoiseGenerator gen(g, NoiseSpec::white());
  double cross = 0.0;
  const int steps = 2000;
  for (int k = 0; k < steps; ++k) {
    const auto u = gen.draw(derive_seed(path, 2 * k));
    const auto v = gen.draw(derive_seed(path, 2 * k + 1));
    cross += u.values[0] * v.values[0];
  }
  const double var = g.dt / g.dx();
  CHECK(std::abs(cross / steps) < 3.0 * var / std::sqrt(steps));
}

TEST_CASE("riesz increments") {
  // Wide box: the removed zero mode shifts the covariance by about
  // (L/2)^{-beta} / (1 - beta), which must stay small next to lag^{-beta}.
  const SimGrid g{512.0, 8192, 0.01, 1.0};
  for (double beta : {0.3, 0.5, 0.8}) {
    CAPTURE(beta);
    const auto a = riesz_increment(g, beta, 77);
    CHECK(riesz_increment(g, beta, 77).values == a.values);
    const double mean = std::accumulate(a.values.begin(), a.values.end(), 0.0) / g.n;
    double rms = 0.0;
    for (double v : a.values) rms += v * v;
    rms = std::sqrt(rms / g.n);
    CHECK(std::abs(mean) < 1e-12 * rms);

    const int count = beta == 0.5 ? 2000 : 1000;
    const auto s = draws(g, NoiseSpec::riesz(beta), 1000 + static_cast<std::uint64_t>(beta * 10), count);
    const std::vector<long> lags{2, 4, 8, 16};
    const auto cov = empirical_covariance(s, lags);

    // exact covariance of the synthesized field by a direct cosine sum
    const double c = 2.0 * std::tgamma(1.0 - beta) * std::sin(std::numbers::pi * beta / 2.0);
    for (const auto& e : cov) {
      double sum = 0.0;
      for (std::size_t m = 1; m < g.n; ++m) {
        const double mm = static_cast<double>(m <= g.n / 2 ? m : g.n - m);
        const double k = 2.0 * std::numbers::pi * mm / g.length;
        sum += c * std::pow(k, beta - 1.0) * std::cos(k * static_cast<double>(e.lag) * g.dx());
      }
      const double exact = g.dt / g.dx() * sum / static_cast<double>(g.n);
      CAPTURE(e.lag);
      CHECK(std::abs(e.value - exact) < 4.0 * e.std_error);
    }

    for (std::size_t i = 0; i + 1 < cov.size(); ++i) {
      const double ratio = cov[i].value / cov[i + 1].value;
      CHECK(ratio == doctest::Approx(std::pow(2.0, beta)).epsilon(0.1));
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      const double x = std::log(static_cast<double>(cov[i].lag));
      const double y = std::log(cov[i].value);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double slope = (3.0 * sxy - sx * sy) / (3.0 * sxx - sx * sx);
    CHECK(std::abs(slope + beta) < 0.1);
  }
}

TEST_CASE("near-white riesz noise decorrelates across the box") {
  const SimGrid g{512.0, 8192, 0.01, 1.0};
  const double beta = 0.95;
  const auto s = draws(g, NoiseSpec::riesz(beta), 31, 400);
  const std::vector<long> lags{1, static_cast<long>(g.n / 8)};
  const auto cov = empirical_covariance(s, lags);
  const double decay = std::pow(static_cast<double>(g.n / 8), -beta);
  CHECK(cov[1].value <= cov[0].value * decay * 0.5);
}

TEST_CASE("noise argument checks") {
  const SimGrid g{8.0, 64, 0.01, 1.0};
  CHECK_THROWS_AS(riesz_increment(g, 0.0, 1), InvalidArgument);
  CHECK_THROWS_AS(riesz_increment(g, 1.0, 1), InvalidArgument);
  const auto few = draws(g, NoiseSpec::white(), 1, 50);
  const std::vector<long> lags{0};
  CHECK_THROWS_AS(empirical_covariance(few, lags), InvalidArgument);
  NoiseGenerator gen(g, NoiseSpec::white());
  std::vector<double> wrong(10);
  CHECK_THROWS_AS(gen.fill(1, wrong), InvalidArgument);
}
