// Serial reference kernels against their OpenMP counterparts.
// Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "siri/scenario.hpp"
#include "siri/solver.hpp"
#include "siri/sweep.hpp"

using namespace siri;

namespace {

template <bool Parallel>
void BM_BracketSweep(benchmark::State& state) {
  const Scenario sc = preset(1);
  const auto states = random_states(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) {
    auto errs = Parallel ? bracket_error_sweep(states, sc.params, sc.weights)
                         : bracket_error_sweep_serial(states, sc.params, sc.weights);
    benchmark::DoNotOptimize(errs.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_FdGradient(benchmark::State& state) {
  Scenario sc = preset(2);
  sc.horizon = 20.0;
  sc.n_steps = 200;
  const auto segments = static_cast<std::size_t>(state.range(0));
  const ControlSignal u = random_controls(1, sc.horizon, segments, sc.bounds, 3).front();
  const Objective J = [&](const ControlSignal& v) { return objective(v, sc); };
  for (auto _ : state) {
    Gradient g = Parallel ? fd_gradient(J, u, 1e-6) : fd_gradient_serial(J, u, 1e-6);
    benchmark::DoNotOptimize(g.d_uP.data());
  }
}

template <bool Parallel>
void BM_SolveAll(benchmark::State& state) {
  const std::vector<Scenario> cases{preset(1), preset(2), preset(3)};
  for (auto _ : state) {
    auto r = Parallel ? solve_all(cases, {}) : solve_all_serial(cases, {});
    benchmark::DoNotOptimize(r.data());
  }
}

}  // namespace

BENCHMARK(BM_BracketSweep<false>)->Name("bracket_sweep/serial")->Arg(1000)->Arg(10000);
BENCHMARK(BM_BracketSweep<true>)->Name("bracket_sweep/omp")->Arg(1000)->Arg(10000);
BENCHMARK(BM_FdGradient<false>)->Name("fd_gradient/serial")->Arg(40)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FdGradient<true>)->Name("fd_gradient/omp")->Arg(40)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveAll<false>)->Name("solve_all/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveAll<true>)->Name("solve_all/omp")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
