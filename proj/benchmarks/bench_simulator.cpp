#include <benchmark/benchmark.h>

#include "rerm/simulator.hpp"

namespace {

// Args: dimension, optimizer (0 accelerated, 1 subgradient).
void BM_SolveRerm(benchmark::State& state) {
  rerm::ProblemConfig c;
  c.alpha = 1.0;
  c.eps = 0.2;
  c.lambda = 0.05;
  c.norms = rerm::NormOrder::make(rerm::kInf, 2.0);
  c = rerm::validate_config(c);
  const int d = static_cast<int>(state.range(0));
  auto ds = rerm::generate_dataset(c, d, 7);
  rerm::RermSettings s;
  s.method = state.range(1) ? rerm::Optimizer::subgradient : rerm::Optimizer::accelerated;
  const double ef = rerm::finite_eps(c, d);
  for (auto _ : state) benchmark::DoNotOptimize(rerm::solve_rerm(ds, c, ef, s));
}
BENCHMARK(BM_SolveRerm)->Args({100, 0})->Args({100, 1})->Args({1000, 0})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
