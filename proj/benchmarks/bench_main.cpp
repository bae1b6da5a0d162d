#include <benchmark/benchmark.h>

#include "ionxy/experiment.hpp"

using namespace ionxy;

namespace {

TrapConfig trap(int n) {
  TrapConfig t = default_trap(n);
  t.omega_z = 0.9 * critical_axial_frequency(t);
  return t;
}

void BM_Equilibrium(benchmark::State& state) {
  const TrapConfig t = trap(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_equilibrium(t));
}
BENCHMARK(BM_Equilibrium)->Arg(10)->Arg(52)->Arg(100);

void BM_Couplings(benchmark::State& state) {
  TrapConfig t = trap(static_cast<int>(state.range(0)));
  const ChainSolution c = solve_chain(t);
  t.detuning_mu = 1.0005 * c.mode_freqs(0);
  for (auto _ : state) benchmark::DoNotOptimize(build_coupling_model(t, c));
}
BENCHMARK(BM_Couplings)->Arg(10)->Arg(52);

void BM_SectorEvolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0)), s = static_cast<int>(state.range(1));
  const Eigen::MatrixXd k = power_law_walk(n, 0.2);
  const XYSector sec = build_sector(k, Eigen::VectorXd::Zero(n), s);
  const StateVector psi = basis_state(sec, sec.basis.front());
  for (auto _ : state) benchmark::DoNotOptimize(evolve(sec, psi, 1.0));
}
BENCHMARK(BM_SectorEvolve)->Args({10, 1})->Args({12, 3})->Args({16, 6})->Unit(benchmark::kMillisecond);

void BM_LeakageSimulation(benchmark::State& state) {
  SetupOptions so;
  so.trap = default_trap(10);
  so.axial.safety_factor = 1.0;
  const ChainSetup setup = setup_chain(so);
  LeakageOptions lo;
  lo.excitations = static_cast<int>(state.range(0));
  lo.samples = 500;
  for (auto _ : state) benchmark::DoNotOptimize(run_leakage_experiment(setup, lo));
}
BENCHMARK(BM_LeakageSimulation)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_Optimizer(benchmark::State& state) {
  Eigen::MatrixXd w = power_law_walk(static_cast<int>(state.range(0)), 0.2);
  w /= analytic_gamma(w).lambda_max;
  const ProtocolConfig seed = seed_protocol(w);
  for (auto _ : state) benchmark::DoNotOptimize(optimize_protocol(w, seed));
}
BENCHMARK(BM_Optimizer)->Arg(8)->Arg(52)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
