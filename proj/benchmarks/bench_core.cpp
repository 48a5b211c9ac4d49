#include <benchmark/benchmark.h>

#include "dampwave/gcc.hpp"
#include "dampwave/solver.hpp"

using namespace dampwave;

namespace {

void BM_StrangStep1D(benchmark::State& state) {
  const auto geom = TorusGeometry::standard(1);
  auto grid = SpectralGrid::create(geom, static_cast<std::size_t>(state.range(0)));
  const auto model = DampingModel::traveling_bump(geom, 0.0, 1.0, 2.0, 0.5);
  SplitStepper stepper(grid, model);
  auto s = init_state(grid, RandomSobolev{1, 2.0});
  for (auto _ : state) {
    stepper.step(s, 1e-3);
    benchmark::DoNotOptimize(s.vhat.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_StrangStep1D)->Arg(256)->Arg(1024);

void BM_StrangStep1DConstant(benchmark::State& state) {
  const auto geom = TorusGeometry::standard(1);
  auto grid = SpectralGrid::create(geom, 1024);
  const auto model = DampingModel::constant(geom, 0.2);
  SplitStepper stepper(grid, model);
  auto s = init_state(grid, RandomSobolev{1, 2.0});
  for (auto _ : state) {
    stepper.step(s, 1e-3);
    benchmark::DoNotOptimize(s.vhat.data());
  }
}
BENCHMARK(BM_StrangStep1DConstant);

void BM_StrangStep2D(benchmark::State& state) {
  const auto geom = TorusGeometry::standard(2);
  auto grid = SpectralGrid::create(geom, 64);
  const auto model = DampingModel::rotating_bump(geom, {1.0, 2.0}, 1.0, 1.0, {0.5, 0.25});
  SplitStepper stepper(grid, model);
  auto s = init_state(grid, RandomSobolev{1, 2.0});
  for (auto _ : state) {
    stepper.step(s, 1e-3);
    benchmark::DoNotOptimize(s.vhat.data());
  }
}
BENCHMARK(BM_StrangStep2D);

void BM_RayAverage(benchmark::State& state) {
  const auto geom = TorusGeometry::standard(1);
  const auto model = DampingModel::traveling_bump(geom, 0.0, 1.0, 2.0, 0.5);
  const PhasePoint p{{0.3, 0.0}, {1.0, 0.0}};
  const double T = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ray_average(model, geom, p, 0.0, T, 0.05));
}
BENCHMARK(BM_RayAverage)->Arg(100)->Arg(400);

void BM_GccScan(benchmark::State& state) {
  const auto geom = TorusGeometry::standard(1);
  const auto model = DampingModel::traveling_bump(geom, 0.0, 1.0, 2.0, 0.5);
  const auto samples = sample_phase_space(geom, 16, 2);
  const auto alphas = default_alpha_values(model, 4, {});
  const std::vector<double> Ts{10.0, 20.0, 40.0};
  for (auto _ : state) {
    auto r = gcc_scan(model, geom, samples, alphas, Ts, {0.05, {}, 1});
    benchmark::DoNotOptimize(r.estimated_C);
  }
}
BENCHMARK(BM_GccScan);

}  // namespace

BENCHMARK_MAIN();
