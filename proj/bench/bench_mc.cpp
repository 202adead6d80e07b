// Serial reference against the OpenMP ensemble on the same moment table.
#include <benchmark/benchmark.h>

#include <omp.h>

#include <vector>

#include "fracspde/spde.hpp"

using namespace fracspde;

namespace {

ModelSpec pam() {
  ModelSpec m;
  m.alpha = 2.0;
  m.noise = NoiseSpec::white();
  m.lam = 1.0;
  m.sigma = SigmaSpec::linear(1.0);
  m.u0 = InitialCondition::constant(1.0);
  return m;
}

const SimGrid grid{16.0, 256, 1.0 / 1024, 0.5};
const std::vector<double> times{0.25, 0.5};
const std::vector<double> probes{0.0};
const std::vector<int> orders{2};

void BM_serial(benchmark::State& state) {
  for (auto _ : state) {
    auto t = mc_moments_serial(pam(), grid, times, probes, orders, static_cast<std::size_t>(state.range(0)), 1);
    benchmark::DoNotOptimize(t.estimates.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_openmp(benchmark::State& state) {
  McOptions o;
  o.threads = static_cast<int>(state.range(1));
  for (auto _ : state) {
    auto t = mc_moments(pam(), grid, times, probes, orders, static_cast<std::size_t>(state.range(0)), 1, o);
    benchmark::DoNotOptimize(t.estimates.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = static_cast<double>(state.range(1));
}

}  // namespace

BENCHMARK(BM_serial)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_openmp)
    ->ArgsProduct({{128}, {1, 2, 4, 8}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

BENCHMARK_MAIN();
