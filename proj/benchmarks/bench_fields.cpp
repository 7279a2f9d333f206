#include <benchmark/benchmark.h>

#include <vector>

#include "dipspin/dynamics.hpp"
#include "dipspin/experiments.hpp"
#include "dipspin/geometry.hpp"

using namespace dipspin;

namespace {

SpinSystem cube(int side) {
  return prepare_initial(build_cubic_lattice(side, side, side, true), InitialState{});
}

void BM_SecularFields(benchmark::State& state) {
  const SpinSystem sys = cube(static_cast<int>(state.range(0)));
  const CouplingTable table = build_couplings(sys);
  std::vector<Vec3> out(sys.size());
  for (auto _ : state) {
    dipole_fields_secular(table, sys.moments, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(sys.size() * sys.size()));
}

void BM_FullFields(benchmark::State& state) {
  const SpinSystem sys = cube(static_cast<int>(state.range(0)));
  const CouplingTable table = build_couplings(sys);
  std::vector<Vec3> out(sys.size());
  for (auto _ : state) {
    dipole_fields_full(table, sys.moments, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(sys.size() * sys.size()));
}

// Ten RK4 steps including sampling overhead.
void BM_Rk4TenSteps(benchmark::State& state) {
  const SpinSystem sys = cube(static_cast<int>(state.range(0)));
  const CouplingTable table = build_couplings(sys);
  SimPlan plan;
  plan.dt = 0.0025;
  plan.t_end = 0.025;
  plan.sample_interval = 0.025;
  for (auto _ : state) {
    Trajectory t = integrate(plan, table, sys);
    benchmark::DoNotOptimize(t.final_moments.data());
  }
}

void BM_BuildCouplings(benchmark::State& state) {
  const SpinSystem sys = cube(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    CouplingTable table = build_couplings(sys);
    benchmark::DoNotOptimize(&table);
  }
}

}  // namespace

BENCHMARK(BM_SecularFields)->Arg(5)->Arg(10);
BENCHMARK(BM_FullFields)->Arg(5)->Arg(10);
BENCHMARK(BM_Rk4TenSteps)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildCouplings)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
