#include <benchmark/benchmark.h>

#include "roughspde/kernels.hpp"
#include "roughspde/solver.hpp"

namespace {

rs::solver::SolveSpec bench_spec(rs::kernels::Kind kind, std::size_t nx,
                                 std::size_t nt) {
  rs::solver::SolveSpec spec;
  spec.grid = {4.0, nx, 1.0, nt, 0.5};
  spec.H = 0.3;
  spec.kind = kind;
  spec.sigma = {0.5, 1.0};
  spec.seed = 42;
  return spec;
}

void bench_path(benchmark::State& state, rs::kernels::Kind kind) {
  auto spec = bench_spec(kind, static_cast<std::size_t>(state.range(0)),
                         static_cast<std::size_t>(state.range(1)));
  rs::kernels::InitialDataParams ip;
  ip.family = rs::kernels::DataFamily::Weierstrass;
  ip.holder = 0.3;
  auto init = rs::kernels::make_initial_data(ip);
  auto w = rs::kernels::homogeneous_solution(spec.grid, kind, init);
  rs::noise::SpatialIncrementSampler sampler(spec.grid, spec.H);
  auto mult = rs::solver::make_step_multipliers(kind, spec.grid,
                                                spec.noise_factor);
  rs::solver::PathEngine engine(spec, w, sampler, mult);
  std::uint64_t path = 0;
  double sink = 0.0;
  for (auto _ : state) {
    engine.run(path++, [&](std::size_t, const double* u) { sink += u[0]; });
  }
  benchmark::DoNotOptimize(sink);
  state.SetItemsProcessed(state.iterations() * state.range(1));
}

void BM_heat_path(benchmark::State& state) {
  bench_path(state, rs::kernels::Kind::Heat);
}
void BM_wave_path(benchmark::State& state) {
  bench_path(state, rs::kernels::Kind::Wave);
}

BENCHMARK(BM_heat_path)->Args({1024, 256})->Args({4096, 1024})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_wave_path)->Args({1024, 1024})->Args({2048, 2048})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
