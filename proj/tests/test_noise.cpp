#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "roughspde/errors.hpp"
#include "roughspde/fft.hpp"
#include "roughspde/noise.hpp"
#include "roughspde/rng.hpp"

using namespace rs;
using noise::TestFunction;
using noise::ProfileKind;

TEST_SUITE("noise") {

TEST_CASE("spectral constant, pinned values") {
  CHECK(noise::riesz_constant(0.25) ==
        doctest::Approx(0.0997355701003582).epsilon(1e-13));
  CHECK(noise::riesz_constant(0.3) ==
        doctest::Approx(0.115048190840816).epsilon(1e-13));
  // H -> 1/2 limit is 1/(2 pi); the open-interval guard rejects 1/2 itself.
  CHECK(noise::riesz_constant(0.4999999) ==
        doctest::Approx(0.159154943091895).epsilon(1e-5));
  CHECK_THROWS_AS(noise::riesz_constant(0.5), ConfigError);
  CHECK_THROWS_AS(noise::riesz_constant(0.0), ConfigError);
}

TEST_CASE("fbm covariance, pinned values") {
  CHECK(noise::fbm_covariance(1.0, 2.0, 0.25) ==
        doctest::Approx(0.707106781186548).epsilon(1e-13));
  CHECK(noise::fbm_covariance(1.0, 1.0, 0.3) == doctest::Approx(1.0));
  CHECK(noise::fbm_increment_covariance(0, 0.3) == 1.0);
  CHECK(noise::fbm_increment_covariance(1, 0.3) ==
        doctest::Approx(-0.242141716744801).epsilon(1e-13));
  CHECK(noise::fbm_increment_covariance(-1, 0.3) ==
        noise::fbm_increment_covariance(1, 0.3));
}

TEST_CASE("increment covariance sums telescope to the fbm variance") {
  // sum_{j,l < n} rho(j - l) = n^(2H): the only identity the row covariance
  // has to satisfy for block sums to look like fBm increments.
  for (double H : {0.26, 0.3, 0.4, 0.49}) {
    std::size_t n = 16;
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t l = 0; l < n; ++l)
        s += noise::fbm_increment_covariance(static_cast<long>(j) -
                                                 static_cast<long>(l),
                                             H);
    CHECK(s == doctest::Approx(std::pow(16.0, 2.0 * H)).epsilon(1e-10));
  }
}

TEST_CASE("circulant embedding is nonnegative definite across H") {
  SpaceTimeGrid grid{1.0, 256, 1.0, 16, 0.5};
  for (double H : {0.26, 0.3, 0.4, 0.49}) {
    noise::SpatialIncrementSampler sampler(grid, H);
    CHECK(sampler.embedding_size() == 512);
    CHECK(sampler.draws_per_row() == 512);
    CHECK(sampler.min_eigenvalue() >= -1e-9);
  }
}

TEST_CASE("sampled rows reproduce the target covariance") {
  SpaceTimeGrid grid{1.0, 64, 1.0, 4, 0.5};
  double H = 0.3;
  noise::SpatialIncrementSampler sampler(grid, H);
  fft::RealTransform tr(sampler.embedding_size());
  std::vector<std::complex<double>> spec(sampler.embedding_size() / 2 + 1);
  std::vector<double> embed(sampler.embedding_size());
  std::vector<double> row(grid.nx);

  const std::size_t M = 4000;
  const std::size_t kmax = 3;
  // per-row spatially averaged products, one estimate per row
  std::vector<std::vector<double>> prod(kmax + 1);
  NormalStream rng(substream_seed(2024, 0, 0));
  for (std::size_t r = 0; r < M; ++r) {
    sampler.sample(rng, tr, spec.data(), embed.data(), row.data());
    for (std::size_t k = 0; k <= kmax; ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j + k < grid.nx; ++j) s += row[j] * row[j + k];
      prod[k].push_back(s / static_cast<double>(grid.nx - k));
    }
  }
  double scale = grid.dt() * std::pow(grid.dx(), 2.0 * H);
  for (std::size_t k = 0; k <= kmax; ++k) {
    double mean = 0.0;
    for (double v : prod[k]) mean += v;
    mean /= static_cast<double>(M);
    double var = 0.0;
    for (double v : prod[k]) var += (v - mean) * (v - mean);
    var /= static_cast<double>(M - 1);
    double se = std::sqrt(var / static_cast<double>(M));
    double target = scale * noise::fbm_increment_covariance(
                                static_cast<long>(k), H);
    CHECK(std::abs(mean - target) <= 4.0 * se + 0.02 * scale);
  }
}

TEST_CASE("slabs are deterministic in (seed, path) and differ across paths") {
  SpaceTimeGrid grid{1.0, 64, 0.5, 8, 0.5};
  auto a = noise::sample_noise_slab(grid, 0.3, 42, 7);
  auto b = noise::sample_noise_slab(grid, 0.3, 42, 7);
  REQUIRE(a.data.size() == b.data.size());
  CHECK(a.data == b.data);

  auto c = noise::sample_noise_slab(grid, 0.3, 42, 8);
  CHECK(a.data != c.data);
  auto d = noise::sample_noise_slab(grid, 0.3, 43, 7);
  CHECK(a.data != d.data);

  // rows use per-(path, row) substreams: swapping two rows of the stream is
  // impossible, so row 0 must match a fresh slab truncated to one row
  SpaceTimeGrid grid1{1.0, 64, 0.5 / 8, 1, 0.5};
  auto one = noise::sample_noise_slab(grid1, 0.3, 42, 7);
  for (std::size_t j = 0; j < grid.nx; ++j)
    CHECK(one.row(0)[j] == a.row(0)[j]);
}

TEST_CASE("pairing: corner evaluation matches the functional overload") {
  SpaceTimeGrid grid{1.0, 32, 0.5, 4, 0.5};
  auto slab = noise::sample_noise_slab(grid, 0.3, 5, 0);

  TestFunction phi;
  phi.kind = ProfileKind::Indicator;
  phi.p0 = -0.25;
  phi.p1 = 0.25;
  phi.t0 = 0.0;
  phi.t1 = 0.5;  // full horizon: every slab has overlap fraction one
  double a = noise::pair_with_test_function(slab, grid, phi);
  double b = noise::pair_with_test_function(
      slab, grid, [](double, double x) {
        return (x >= -0.25 && x < 0.25) ? 1.0 : 0.0;
      });
  CHECK(a == doctest::Approx(b).epsilon(1e-13));
}

TEST_CASE("pairing is linear") {
  SpaceTimeGrid grid{1.0, 32, 0.5, 4, 0.5};
  auto slab = noise::sample_noise_slab(grid, 0.3, 6, 1);
  auto f = [](double t, double x) { return std::cos(x) + t; };
  auto g = [](double t, double x) { return x * x - 0.5 * t; };
  double pf = noise::pair_with_test_function(slab, grid, f);
  double pg = noise::pair_with_test_function(slab, grid, g);
  double pc = noise::pair_with_test_function(
      slab, grid, [&](double t, double x) { return 2.0 * f(t, x) - 3.0 * g(t, x); });
  CHECK(pc == doctest::Approx(2.0 * pf - 3.0 * pg).epsilon(1e-11));
}

TEST_CASE("spectral covariance quadrature, pinned values") {
  double H = 0.3;

  TestFunction gauss;  // exp(-x^2/2) on [0, 1)
  gauss.kind = ProfileKind::Gaussian;
  gauss.p0 = 0.0;
  gauss.p1 = 1.0;
  gauss.t0 = 0.0;
  gauss.t1 = 1.0;
  CHECK(noise::spectral_covariance_quadrature(gauss, gauss, H) ==
        doctest::Approx(0.938324093057842).epsilon(1e-8));

  // disjoint time supports: white in time means exactly zero
  TestFunction late = gauss;
  late.t0 = 1.0;
  late.t1 = 2.0;
  CHECK(noise::spectral_covariance_quadrature(gauss, late, H) == 0.0);

  // adjacent unit indicators reproduce the fBm increment covariance
  TestFunction i01, i12;
  i01.kind = i12.kind = ProfileKind::Indicator;
  i01.p0 = 0.0;
  i01.p1 = 1.0;
  i12.p0 = 1.0;
  i12.p1 = 2.0;
  i01.t0 = i12.t0 = 0.0;
  i01.t1 = i12.t1 = 1.0;
  CHECK(noise::spectral_covariance_quadrature(i01, i12, H) ==
        doctest::Approx(-0.242141716744801).epsilon(1e-8));
  CHECK(noise::spectral_covariance_quadrature(i01, i01, H) ==
        doctest::Approx(1.0).epsilon(1e-8));

  // [0, 2) indicator: variance 2^(2H)
  TestFunction i02 = i01;
  i02.p1 = 2.0;
  CHECK(noise::spectral_covariance_quadrature(i02, i02, H) ==
        doctest::Approx(std::pow(2.0, 0.6)).epsilon(1e-8));

  // partial time overlap scales the space factor
  TestFunction half = i01;
  half.t0 = 0.5;
  half.t1 = 1.5;
  CHECK(noise::spectral_covariance_quadrature(i01, half, H) ==
        doctest::Approx(0.5).epsilon(1e-8));
}

}  // TEST_SUITE
