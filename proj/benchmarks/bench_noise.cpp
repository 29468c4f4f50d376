#include <benchmark/benchmark.h>

#include "roughspde/noise.hpp"

namespace {

rs::SpaceTimeGrid bench_grid(std::size_t nx) {
  return {4.0, nx, 1.0, 256, 0.5};
}

void BM_sampler_build(benchmark::State& state) {
  auto grid = bench_grid(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    rs::noise::SpatialIncrementSampler sampler(grid, 0.3);
    benchmark::DoNotOptimize(sampler.min_eigenvalue());
  }
}
BENCHMARK(BM_sampler_build)->Arg(1024)->Arg(4096)->Arg(16384);

void BM_sample_row(benchmark::State& state) {
  auto grid = bench_grid(static_cast<std::size_t>(state.range(0)));
  rs::noise::SpatialIncrementSampler sampler(grid, 0.3);
  rs::fft::RealTransform tr(sampler.embedding_size());
  std::vector<std::complex<double>> spec(sampler.embedding_size() / 2 + 1);
  std::vector<double> embed(sampler.embedding_size());
  rs::NormalStream rng(123);
  for (auto _ : state) {
    sampler.sample(rng, tr, spec.data(), embed.data(), embed.data());
    benchmark::DoNotOptimize(embed[0]);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_sample_row)->Arg(1024)->Arg(4096)->Arg(16384);

void BM_pairing(benchmark::State& state) {
  auto grid = bench_grid(1024);
  auto slab = rs::noise::sample_noise_slab(grid, 0.3, 42);
  rs::noise::TestFunction phi{rs::noise::ProfileKind::Gaussian, 0.0, 1.0, 0.0,
                              1.0};
  for (auto _ : state) {
    double v = rs::noise::pair_with_test_function(slab, grid, phi);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_pairing);

}  // namespace
