#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "blowlab/nonlinearity.hpp"
#include "blowlab/solver.hpp"

using namespace blowlab;

static void BM_log_F_continued_fraction(benchmark::State& state) {
  const Nonlinearity nl = Nonlinearity::super_exponential(2, 0);
  double u = 5.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(nl.log_F(u).log_magnitude);
    u = 5.0 + (u - 4.9) * 0.1; // defeat caching without changing the regime
  }
}
BENCHMARK(BM_log_F_continued_fraction);

static void BM_log_F_small_u(benchmark::State& state) {
  const Nonlinearity nl = Nonlinearity::super_exponential(2, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(nl.log_F(0.3).log_magnitude);
  }
}
BENCHMARK(BM_log_F_small_u);

static void BM_F_inverse(benchmark::State& state) {
  const Nonlinearity nl = Nonlinearity::super_exponential(2, 0);
  double logy = -50.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(nl.F_inverse_log(logy));
    logy = logy < -400.0 ? -50.0 : logy - 1.0;
  }
}
BENCHMARK(BM_F_inverse);

static void BM_one_minus_fprime_F(benchmark::State& state) {
  const Nonlinearity nl = Nonlinearity::super_exponential(2, 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(nl.one_minus_fprime_F(12.0));
  }
}
BENCHMARK(BM_one_minus_fprime_F);

static void BM_coefficient_table_build(benchmark::State& state) {
  const Nonlinearity nl = Nonlinearity::super_exponential(2, 0);
  for (auto _ : state) {
    CoefficientTable table(nl, 400.0);
    benchmark::DoNotOptimize(table(100.0));
  }
}
BENCHMARK(BM_coefficient_table_build);

static void BM_rhs_phi_J256(benchmark::State& state) {
  const Nonlinearity nl = Nonlinearity::super_exponential(2, 0);
  RadialGrid grid(1, 2.0, 256);
  CoefficientTable table(nl, 50.0);
  std::vector<double> phi(grid.nodes());
  for (int j = 0; j <= grid.J; ++j) {
    const double x = grid.r(j) / grid.R;
    phi[j] = 0.2 + 6.0 * (1.0 - x * x);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        rhs_phi_tabulated(table, grid, phi, BoundaryMode::PhiSpace));
  }
}
BENCHMARK(BM_rhs_phi_J256);

static void BM_step_J256(benchmark::State& state) {
  const Nonlinearity nl = Nonlinearity::super_exponential(2, 0);
  RadialGrid grid(1, 2.0, 256);
  CoefficientTable table(nl, 50.0);
  InitialData init = make_initial_data(nl, grid, 1.8, true);
  Snapshot snap;
  snap.phi = init.phi0;
  snap.phi_center = snap.phi[0];
  StepController ctrl;
  for (auto _ : state) {
    Snapshot local = snap;
    benchmark::DoNotOptimize(
        step(nl, table, grid, local, ctrl, BoundaryMode::PhiSpace));
  }
}
BENCHMARK(BM_step_J256);

BENCHMARK_MAIN();
