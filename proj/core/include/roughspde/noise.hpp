#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "roughspde/fft.hpp"
#include "roughspde/grid.hpp"
#include "roughspde/rng.hpp"

namespace rs::noise {

// Spectral density constant of the noise: the spatial covariance in Fourier
// variables is c_H |xi|^(1-2H) d(xi), normalized so that indicator pairings
// reproduce fractional Brownian motion exactly.
double riesz_constant(double H);

// E[B_H(s) B_H(t)] for standard fBm.
double fbm_covariance(double s, double t, double H);

// Covariance of unit-spaced standardized fBm increments at lag k.
double fbm_increment_covariance(long k, double H);

// Samples one time-row of cell increments X((t_n, t_{n+1}] x (x_j, x_{j+1}])
// on the periodic grid via circulant embedding of size m = 2 nx.
//
// Target covariance of a row: E[X_j X_l] = dt * dx^(2H) * rho(j - l) with rho
// the standardized fBm increment covariance. The length-m embedding sequence
// is provably nonnegative definite for H < 1/2, so a significantly negative
// eigenvalue is reported as a bug (EmbeddingError), not smoothed over.
//
// Each call consumes exactly m standard normal draws in a pinned order, which
// is what makes per-(path, row) substreams reproducible across schedules.
class SpatialIncrementSampler {
 public:
  SpatialIncrementSampler(const SpaceTimeGrid& grid, double H);

  std::size_t nx() const { return nx_; }
  std::size_t embedding_size() const { return m_; }
  std::size_t draws_per_row() const { return m_; }
  double min_eigenvalue() const { return min_eig_; }

  // `tr` must have size embedding_size(); `spec_scratch` holds
  // embedding_size()/2 + 1 complex values, `embed_scratch` embedding_size()
  // doubles. `out` receives nx() values and may alias embed_scratch.
  void sample(NormalStream& rng, fft::RealTransform& tr,
              std::complex<double>* spec_scratch, double* embed_scratch,
              double* out) const;

 private:
  std::size_t nx_;
  std::size_t m_;
  double min_eig_;
  std::vector<double> amp_;  // per-mode amplitudes for the half spectrum
};

// All rows of one noise path: row n holds the spatial increments of the time
// slab (t_n, t_{n+1}].
struct NoiseSlab {
  std::size_t nt = 0, nx = 0;
  double H = 0.0, dt = 0.0, dx = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t path = 0;
  std::vector<double> data;  // nt * nx, row-major

  double* row(std::size_t n) { return data.data() + n * nx; }
  const double* row(std::size_t n) const { return data.data() + n * nx; }
};

NoiseSlab sample_noise_slab(const SpaceTimeGrid& grid, double H,
                            std::uint64_t seed, std::uint64_t path = 0);

// Same, reusing a prebuilt sampler and transform across calls.
void fill_noise_slab(const SpatialIncrementSampler& sampler,
                     const SpaceTimeGrid& grid, double H, std::uint64_t seed,
                     std::uint64_t path, fft::RealTransform& tr,
                     NoiseSlab& slab);

// Deterministic test functions phi(t, x) = 1_{[t0,t1)}(t) * profile(x).
enum class ProfileKind { Gaussian, Indicator };

struct TestFunction {
  ProfileKind kind = ProfileKind::Gaussian;
  // Gaussian: profile(x) = exp(-(x - p0)^2 / (2 p1^2)), amplitude one.
  // Indicator: profile(x) = 1_{[p0, p1)}(x).
  double p0 = 0.0, p1 = 1.0;
  double t0 = 0.0, t1 = 1.0;

  double profile(double x) const;
};

// Discrete pairing <X, phi>: cell corners (t_n, x_j) evaluate the spatial
// profile; the time factor is the overlap fraction of the slab with [t0, t1).
double pair_with_test_function(const NoiseSlab& slab, const SpaceTimeGrid& grid,
                               const TestFunction& phi);

// General pairing sum_{n,j} phi(t_n, x_j) X_nj, used for linearity checks.
double pair_with_test_function(const NoiseSlab& slab, const SpaceTimeGrid& grid,
                               const std::function<double(double, double)>& phi);

// E[X(f) X(g)] from the closed-form Fourier transforms of the profiles and
// one half-line quadrature against c_H xi^(1-2H).
double spectral_covariance_quadrature(const TestFunction& f,
                                      const TestFunction& g, double H,
                                      double rel_tol = 1e-9);

}  // namespace rs::noise
