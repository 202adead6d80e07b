#include "fracspde/spde.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>

#include "fracspde/error.hpp"
#include "fracspde/kernel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fracspde {

namespace {

[[noreturn]] void invalid(const std::string& msg) { throw InvalidArgument(msg); }

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

double SigmaSpec::operator()(double x) const {
  if (kind == Kind::linear) return a * x;
  return x * (l_sigma + (L_sigma - l_sigma) * std::exp(-x * x));
}

double SigmaSpec::lower() const { return kind == Kind::linear ? std::abs(a) : l_sigma; }
double SigmaSpec::upper() const { return kind == Kind::linear ? std::abs(a) : L_sigma; }

void SigmaSpec::validate() const {
  if (kind == Kind::linear) {
    if (!std::isfinite(a) || a == 0.0) invalid("sigma: linear slope must be finite and nonzero");
    return;
  }
  if (!finite_positive(l_sigma) || !finite_positive(L_sigma) || l_sigma > L_sigma) {
    std::ostringstream os;
    os << "sigma: pinched needs 0 < l_sigma <= L_sigma, got l_sigma=" << l_sigma << " L_sigma=" << L_sigma;
    invalid(os.str());
  }
}

double InitialCondition::operator()(double x) const {
  switch (kind) {
    case Kind::constant:
      return value;
    case Kind::indicator:
      return (x >= a && x <= b) ? 1.0 : 0.0;
    case Kind::bump: {
      const double s = (x - a) / b;
      if (std::abs(s) >= 1.0) return 0.0;
      return value * std::exp(1.0 - 1.0 / (1.0 - s * s));
    }
    case Kind::point_mass:
      break;
  }
  invalid("initial condition: a point mass has no pointwise values");
}

ScalarField InitialCondition::materialize(const SimGrid& grid) const {
  validate();
  grid.validate_spatial();
  ScalarField u(grid);
  const double dx = grid.dx();
  switch (kind) {
    case Kind::constant:
      std::fill(u.values.begin(), u.values.end(), value);
      break;
    case Kind::indicator:
      if (b - a > grid.length) invalid("initial condition: indicator wider than the box");
      for (std::size_t j = 0; j < grid.n; ++j) {
        const double lo = std::max(a, grid.x(j) - 0.5 * dx);
        const double hi = std::min(b, grid.x(j) + 0.5 * dx);
        u[j] = std::max(0.0, hi - lo) / dx;
      }
      break;
    case Kind::bump:
      if (2.0 * b > grid.length) invalid("initial condition: bump wider than the box");
      for (std::size_t j = 0; j < grid.n; ++j) u[j] = (*this)(grid.x(j));
      break;
    case Kind::point_mass:
      u[grid.nearest_cell(a)] = value / dx;
      break;
  }
  return u;
}

void InitialCondition::validate() const {
  switch (kind) {
    case Kind::constant:
      if (!finite_positive(value)) invalid("initial condition: constant must be positive");
      break;
    case Kind::indicator:
      if (!std::isfinite(a) || !std::isfinite(b) || !(b > a))
        invalid("initial condition: indicator needs a < b");
      break;
    case Kind::bump:
      if (!finite_positive(value) || !finite_positive(b) || !std::isfinite(a))
        invalid("initial condition: bump needs positive height and width");
      break;
    case Kind::point_mass:
      if (!finite_positive(value) || !std::isfinite(a)) invalid("initial condition: point mass needs positive mass");
      break;
  }
}

void ModelSpec::validate() const {
  if (!(alpha > 1.0 && alpha <= 2.0)) {
    std::ostringstream os;
    os << "model: alpha must lie in (1, 2], got " << alpha;
    invalid(os.str());
  }
  noise.validate();
  if (noise.colored() && noise.beta > alpha) invalid("model: beta must not exceed alpha");
  if (!(lam >= 0.0) || !std::isfinite(lam)) invalid("model: lam must be nonnegative");
  sigma.validate();
  u0.validate();
  if (u0.kind == InitialCondition::Kind::point_mass && noise.colored())
    invalid("model: point-mass initial data is only supported with white noise");
  if (dim != 1) invalid("model: only dim = 1 is simulated");
}

void check_simulation_grid(const ModelSpec& model, const SimGrid& grid) {
  model.validate();
  grid.validate();
  const double limit = std::pow(grid.dx(), model.alpha) / 4.0;
  if (grid.dt > limit * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "grid: dt=" << grid.dt << " exceeds dx^alpha/4=" << limit;
    invalid(os.str());
  }
  const double need = 8.0 * std::pow(grid.t_end, 1.0 / model.alpha);
  if (grid.length < need * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "grid: length " << grid.length << " is below 8 t_end^{1/alpha} = " << need;
    invalid(os.str());
  }
}

Stepper::Stepper(const ModelSpec& model, const SimGrid& grid)
    : model_(model), grid_(grid), increment_(grid.n), fft_(grid.n), noise_(grid, model.noise) {
  model_.validate();
  grid_.validate();
  multiplier_.resize(grid_.n / 2 + 1);
  for (std::size_t m = 0; m < multiplier_.size(); ++m)
    multiplier_[m] = std::exp(-grid_.dt * std::pow(grid_.wavenumber(m), model_.alpha));
}

void Stepper::advance(std::span<double> u, std::span<const double> increment) {
  if (u.size() != grid_.n || increment.size() != grid_.n) invalid("step: field and increment sizes must match the grid");
  auto real = fft_.real();
  const double lam = model_.lam;
  for (std::size_t j = 0; j < grid_.n; ++j) real[j] = u[j] + lam * model_.sigma(u[j]) * increment[j];
  fft_.forward();
  auto spec = fft_.spectrum();
  for (std::size_t m = 0; m < spec.size(); ++m) spec[m] *= multiplier_[m];
  fft_.backward();
  std::copy(real.begin(), real.end(), u.begin());
}

void Stepper::advance_seeded(std::span<double> u, std::uint64_t seed) {
  if (model_.lam == 0.0) {
    std::fill(increment_.begin(), increment_.end(), 0.0);
  } else {
    noise_.fill(seed, increment_);
  }
  advance(u, increment_);
}

ScalarField step(const ScalarField& u, const ModelSpec& model, const SimGrid& grid, const NoiseIncrement& increment) {
  if (u.size() != grid.n || increment.values.size() != grid.n) invalid("step: shapes do not match the grid");
  Stepper s(model, grid);
  ScalarField out = u;
  s.advance(out.values, increment.values);
  for (double v : out.values)
    if (!std::isfinite(v)) throw BlowUpError("step: non-finite value", grid.dt, 0, 0);
  return out;
}

std::vector<std::size_t> snapshot_steps(const SimGrid& grid, std::span<const double> times) {
  grid.validate();
  std::vector<std::size_t> out;
  out.reserve(times.size());
  const std::size_t total = grid.steps();
  for (double t : times) {
    const double k = t / grid.dt;
    const double r = std::round(k);
    if (!(t >= 0.0) || std::abs(k - r) > 1e-6 || static_cast<std::size_t>(r) > total) {
      std::ostringstream os;
      os << "snapshot time " << t << " is not a multiple of dt=" << grid.dt << " within [0, t_end]";
      invalid(os.str());
    }
    out.push_back(static_cast<std::size_t>(r));
  }
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i] < out[i - 1]) invalid("snapshot times must be nondecreasing");
  return out;
}

namespace {

/// Runs one path, calling `visit` at each requested step. Returns the number of
/// snapshots delivered; on blow-up fills `failure`.
std::size_t run_path(Stepper& stepper, const ScalarField& u0, std::span<const std::size_t> steps,
                     std::uint64_t path_seed, const SnapshotVisitor& visit, std::vector<double>& out,
                     PathFailure& failure, bool& failed) {
  std::vector<double> u = u0.values;
  const double dt = stepper.grid().dt;
  std::size_t done = 0;
  std::size_t current = 0;
  failed = false;
  for (std::size_t target : steps) {
    while (current < target) {
      stepper.advance_seeded(u, derive_seed(path_seed, current));
      ++current;
      for (double v : u) {
        if (!std::isfinite(v)) {
          failed = true;
          failure.time = static_cast<double>(current) * dt;
          failure.step = static_cast<std::int64_t>(current);
          failure.seed = path_seed;
          return done;
        }
      }
    }
    visit(done, u, out);
    ++done;
  }
  return done;
}

EnsembleRun prepare_run(std::size_t n_paths) {
  EnsembleRun run;
  run.outputs.resize(n_paths);
  run.snapshots_done.assign(n_paths, 0);
  return run;
}

void collect_failures(EnsembleRun& run, const std::vector<PathFailure>& fails, const std::vector<char>& failed) {
  for (std::size_t p = 0; p < failed.size(); ++p)
    if (failed[p]) run.failures.push_back(fails[p]);
}

}  // namespace

Trajectory simulate_path(const ModelSpec& model, const SimGrid& grid, std::uint64_t seed, std::span<const double> times) {
  check_simulation_grid(model, grid);
  const auto steps = snapshot_steps(grid, times);
  Stepper stepper(model, grid);
  Trajectory traj;
  std::vector<double> unused;
  PathFailure failure;
  bool failed = false;
  const ScalarField u0 = model.u0.materialize(grid);
  run_path(
      stepper, u0, steps, seed,
      [&](std::size_t i, std::span<const double> u, std::vector<double>&) {
        traj.times.push_back(times[i]);
        traj.snapshots.emplace_back(grid, std::vector<double>(u.begin(), u.end()));
      },
      unused, failure, failed);
  if (failed) {
    std::ostringstream os;
    os << "simulate_path: non-finite value at t=" << failure.time << " (step " << failure.step << ", seed " << seed << ")";
    throw BlowUpError(os.str(), failure.time, failure.step, seed);
  }
  return traj;
}

EnsembleRun run_ensemble_serial(const ModelSpec& model, const SimGrid& grid, std::span<const std::size_t> steps,
                                std::size_t n_paths, std::uint64_t master_seed, const SnapshotVisitor& visit) {
  check_simulation_grid(model, grid);
  EnsembleRun run = prepare_run(n_paths);
  std::vector<PathFailure> fails(n_paths);
  std::vector<char> failed(n_paths, 0);
  const ScalarField u0 = model.u0.materialize(grid);
  Stepper stepper(model, grid);
  for (std::size_t p = 0; p < n_paths; ++p) {
    bool f = false;
    run.snapshots_done[p] =
        run_path(stepper, u0, steps, derive_seed(master_seed, p), visit, run.outputs[p], fails[p], f);
    fails[p].path = p;
    failed[p] = f;
  }
  collect_failures(run, fails, failed);
  return run;
}

EnsembleRun run_ensemble(const ModelSpec& model, const SimGrid& grid, std::span<const std::size_t> steps,
                         std::size_t n_paths, std::uint64_t master_seed, const SnapshotVisitor& visit, int threads) {
  check_simulation_grid(model, grid);
  EnsembleRun run = prepare_run(n_paths);
  std::vector<PathFailure> fails(n_paths);
  std::vector<char> failed(n_paths, 0);
  const ScalarField u0 = model.u0.materialize(grid);
  std::exception_ptr error;

#ifdef _OPENMP
  const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel num_threads(nt)
#else
  (void)threads;
#endif
  {
    try {
      Stepper stepper(model, grid);
#ifdef _OPENMP
#pragma omp for schedule(dynamic, 1)
#endif
      for (std::int64_t pi = 0; pi < static_cast<std::int64_t>(n_paths); ++pi) {
        const auto p = static_cast<std::size_t>(pi);
        bool f = false;
        try {
          run.snapshots_done[p] =
              run_path(stepper, u0, steps, derive_seed(master_seed, p), visit, run.outputs[p], fails[p], f);
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical(fracspde_ensemble_error)
#endif
          if (!error) error = std::current_exception();
        }
        fails[p].path = p;
        failed[p] = f;
      }
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical(fracspde_ensemble_error)
#endif
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  collect_failures(run, fails, failed);
  return run;
}

std::size_t MomentTable::order_index(int p) const {
  for (std::size_t i = 0; i < p_orders.size(); ++i)
    if (p_orders[i] == p) return i;
  throw InvalidArgument("MomentTable: moment order not recorded");
}

std::size_t MomentTable::probe_index(double x) const {
  for (std::size_t i = 0; i < probes.size(); ++i)
    if (probes[i] == x) return i;
  throw InvalidArgument("MomentTable: probe not recorded");
}

namespace {

MomentTable moments_impl(const ModelSpec& model, const SimGrid& grid, std::span<const double> times,
                         std::span<const double> probes, std::span<const int> p_orders, std::size_t n_paths,
                         std::uint64_t master_seed, const McOptions& options, bool serial) {
  if (n_paths < 100) invalid("mc_moments: need at least 100 paths");
  if (times.empty() || probes.empty()) invalid("mc_moments: times and probes must be nonempty");
  if (std::find(p_orders.begin(), p_orders.end(), 2) == p_orders.end()) invalid("mc_moments: order 2 is mandatory");
  for (int p : p_orders)
    if (p < 1) invalid("mc_moments: moment orders must be positive");
  if (options.spatial_average && model.u0.kind != InitialCondition::Kind::constant)
    invalid("mc_moments: spatial averaging needs constant initial data");
  check_simulation_grid(model, grid);
  const auto steps = snapshot_steps(grid, times);

  std::vector<std::size_t> cells;
  for (double x : probes) cells.push_back(grid.nearest_cell(x));
  const std::vector<int> orders(p_orders.begin(), p_orders.end());
  const std::size_t per_snapshot = cells.size() * orders.size();

  SnapshotVisitor visit = [&](std::size_t, std::span<const double> u, std::vector<double>& out) {
    if (options.spatial_average) {
      for (std::size_t c = 0; c < cells.size(); ++c)
        for (int p : orders) {
          double s = 0.0;
          for (double v : u) s += std::pow(std::abs(v), p);
          out.push_back(s / static_cast<double>(u.size()));
        }
      return;
    }
    for (std::size_t c : cells)
      for (int p : orders) out.push_back(std::pow(std::abs(u[c]), p));
  };

  const EnsembleRun run = serial ? run_ensemble_serial(model, grid, steps, n_paths, master_seed, visit)
                                 : run_ensemble(model, grid, steps, n_paths, master_seed, visit, options.threads);

  MomentTable table;
  table.times.assign(times.begin(), times.end());
  table.probes.assign(probes.begin(), probes.end());
  table.p_orders = orders;
  table.n_paths = n_paths;
  table.seed = master_seed;
  table.failures = run.failures;
  const std::size_t total = times.size() * per_snapshot;
  table.estimates.assign(total, std::numeric_limits<double>::quiet_NaN());
  table.std_errors.assign(total, std::numeric_limits<double>::quiet_NaN());
  table.valid.assign(total, false);

  const double count = static_cast<double>(n_paths);
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    bool complete = true;
    for (std::size_t p = 0; p < n_paths; ++p)
      if (run.snapshots_done[p] <= ti) complete = false;
    if (!complete) continue;
    for (std::size_t k = 0; k < per_snapshot; ++k) {
      const std::size_t slot = ti * per_snapshot + k;
      double sum = 0.0;
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (std::size_t p = 0; p < n_paths; ++p) {
        const double v = run.outputs[p][slot];
        sum += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      const double mean = sum / count;
      double ss = 0.0;
      if (hi > lo)
        for (std::size_t p = 0; p < n_paths; ++p) {
          const double d = run.outputs[p][slot] - mean;
          ss += d * d;
        }
      table.estimates[slot] = hi > lo ? mean : lo;
      table.std_errors[slot] = std::sqrt(ss / (count - 1.0) / count);
      table.valid[slot] = true;
    }
  }
  return table;
}

}  // namespace

MomentTable mc_moments(const ModelSpec& model, const SimGrid& grid, std::span<const double> times,
                       std::span<const double> probes, std::span<const int> p_orders, std::size_t n_paths,
                       std::uint64_t master_seed, const McOptions& options) {
  return moments_impl(model, grid, times, probes, p_orders, n_paths, master_seed, options, false);
}

MomentTable mc_moments_serial(const ModelSpec& model, const SimGrid& grid, std::span<const double> times,
                              std::span<const double> probes, std::span<const int> p_orders, std::size_t n_paths,
                              std::uint64_t master_seed, const McOptions& options) {
  return moments_impl(model, grid, times, probes, p_orders, n_paths, master_seed, options, true);
}

ScalarField deterministic_part(const ModelSpec& model, const SimGrid& grid, double t) {
  model.validate();
  grid.validate_spatial();
  if (!(t >= 0.0) || !std::isfinite(t)) invalid("deterministic_part: t must be nonnegative");
  return semigroup_apply(model.u0.materialize(grid), StableKernelParams{model.alpha, 1}, t);
}

}  // namespace fracspde
