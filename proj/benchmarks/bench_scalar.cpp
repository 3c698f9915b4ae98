#include <benchmark/benchmark.h>

#include <cmath>

#include "rerm/scalar.hpp"

namespace {

void BM_ProxLogistic(benchmark::State& state) {
  auto f = rerm::ScalarFunction::logistic_loss(1.0, 0.3);
  double w = -2.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rerm::prox(f, 1.7, w));
    w = w > 2.0 ? -2.0 : w + 1e-3;
  }
}
BENCHMARK(BM_ProxLogistic);

void BM_ProxHinge(benchmark::State& state) {
  auto f = rerm::ScalarFunction::hinge_loss(1.0, 0.3);
  double w = -2.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rerm::prox(f, 1.7, w));
    w = w > 2.0 ? -2.0 : w + 1e-3;
  }
}
BENCHMARK(BM_ProxHinge);

// Arg: regularisation order times ten.
void BM_ProxPowerPenalty(benchmark::State& state) {
  const double r = state.range(0) / 10.0;
  auto f = rerm::ScalarFunction::power_penalty(0.2, r, 0.1, 1.0);
  double w = -2.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rerm::prox(f, 0.8, w));
    w = w > 2.0 ? -2.0 : w + 1e-3;
  }
}
BENCHMARK(BM_ProxPowerPenalty)->Arg(10)->Arg(15)->Arg(20)->Arg(30);

void BM_ProxCustom(benchmark::State& state) {
  auto f = rerm::ScalarFunction::custom([](double x) { return std::log(std::cosh(x)); });
  double w = -2.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rerm::prox(f, 1.7, w));
    w = w > 2.0 ? -2.0 : w + 1e-3;
  }
}
BENCHMARK(BM_ProxCustom);

}  // namespace

BENCHMARK_MAIN();
