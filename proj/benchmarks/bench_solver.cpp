#include <benchmark/benchmark.h>

#include "rerm/channel.hpp"
#include "rerm/prior_lp.hpp"
#include "rerm/solver.hpp"

namespace {

rerm::ProblemConfig config(double r, double eps, rerm::Loss loss = rerm::Loss::logistic) {
  rerm::ProblemConfig c;
  c.alpha = 1.0;
  c.eps = eps;
  c.lambda = 0.05;
  c.loss = loss;
  c.norms = rerm::NormOrder::make(rerm::kInf, r);
  return rerm::validate_config(c);
}

void BM_HatUpdate(benchmark::State& state) {
  auto c = config(1.0, 0.2, state.range(0) ? rerm::Loss::hinge : rerm::Loss::logistic);
  rerm::Overlaps o{0.4, 0.6, 1.2, 0.8};
  for (auto _ : state) benchmark::DoNotOptimize(rerm::hat_update(o, c));
}
BENCHMARK(BM_HatUpdate)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_NonhatUpdate(benchmark::State& state) {
  auto c = config(state.range(0) / 10.0, 0.2);
  rerm::ConjugateOverlaps h;
  h.mhat = 0.5;
  h.qhat = 0.3;
  h.Vhat = 0.6;
  h.Phat = 0.1;
  for (auto _ : state) benchmark::DoNotOptimize(rerm::nonhat_update_lp(h, c));
}
BENCHMARK(BM_NonhatUpdate)->Arg(10)->Arg(20)->Unit(benchmark::kMicrosecond);

// Arg: regularisation order times ten.
void BM_SolveFixedPoint(benchmark::State& state) {
  auto c = config(state.range(0) / 10.0, 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(rerm::solve_fixed_point(c));
}
BENCHMARK(BM_SolveFixedPoint)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
