#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "roughspde/fft.hpp"
#include "roughspde/grid.hpp"
#include "roughspde/kernels.hpp"
#include "roughspde/noise.hpp"
#include "roughspde/rng.hpp"

namespace rs::solver {

// Affine multiplicative coefficient sigma(u) = a u + b.
struct SigmaAffine {
  double a = 0.5;
  double b = 1.0;
  double operator()(double u) const { return a * u + b; }
  bool is_additive() const { return a == 0.0; }
  bool is_zero() const { return a == 0.0 && b == 0.0; }
};

enum class Scheme { MildStep, Picard };
Scheme scheme_from_name(const std::string& s);
const char* scheme_name(Scheme s);

// How the heat semigroup weights the noise within one step. VarianceExact
// matches the exact per-mode variance of int_0^dt exp(-(dt-s) xi^2/2) dW and
// is the default; FullStep applies exp(-xi^2 dt / 2) to the whole increment,
// which systematically damps small scales (kept selectable for comparison).
enum class NoiseFactor { VarianceExact, FullStep };
NoiseFactor noise_factor_from_name(const std::string& s);
const char* noise_factor_name(NoiseFactor f);

// Per-mode update of one time step, for modes xi_k = pi k / L, k = 0..nx/2:
//   wave: (z, v) <- (uu z + uv v + fu P, vu z + vv v + fv P)
//   heat:  z     <-  uu z          + fu P            (uv, vu, vv unused)
// where P is the DFT of sigma(u) * row. The 1/dx forcing normalization is
// folded into fu/fv.
struct StepMultipliers {
  kernels::Kind kind = kernels::Kind::Heat;
  std::size_t nk = 0;
  std::vector<double> uu, uv, vu, vv, fu, fv;
};

StepMultipliers make_step_multipliers(kernels::Kind kind,
                                      const SpaceTimeGrid& grid,
                                      NoiseFactor factor);

// Spectral state of the noise part z = u - w between steps.
struct StepState {
  std::vector<std::complex<double>> zhat, vhat;
  void reset(std::size_t nk, kernels::Kind kind);
};

struct StepWorkspace {
  explicit StepWorkspace(std::size_t nx);
  fft::RealTransform tr;                    // size nx
  std::vector<double> prod;                 // sigma(u) * row
  std::vector<std::complex<double>> phat;   // forcing spectrum
  std::vector<double> z;                    // physical z after the step
};

// Advances the state by one step given the current full solution u (length
// nx) and the noise row (length nx); leaves the new physical z in ws.z.
void step_mild(const StepMultipliers& mult, const double* u, const double* row,
               SigmaAffine sigma, StepState& state, StepWorkspace& ws);

struct SolveSpec {
  SpaceTimeGrid grid;
  double H = 0.3;
  kernels::Kind kind = kernels::Kind::Heat;
  SigmaAffine sigma;
  NoiseFactor noise_factor = NoiseFactor::VarianceExact;
  std::uint64_t seed = 0;
};

// Full solution samples of one path.
struct SolutionField {
  std::size_t nt = 0, nx = 0;
  double H = 0.0, dt = 0.0, dx = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> data;  // (nt + 1) * nx

  double* row(std::size_t n) { return data.data() + n * nx; }
  const double* row(std::size_t n) const { return data.data() + n * nx; }
};

// Called once per time level with the full solution row; the pointer is only
// valid during the call.
using RowObserver = std::function<void(std::size_t level, const double* u)>;

// Reusable per-thread machinery: transforms, sampler scratch, state. The
// homogeneous field, sampler and multipliers are shared read-only.
class PathEngine {
 public:
  PathEngine(const SolveSpec& spec, const kernels::HomogeneousField& w,
             const noise::SpatialIncrementSampler& sampler,
             const StepMultipliers& mult);

  // Runs one path of the one-step mild scheme. Noise rows for (path, n) come
  // from substream_seed(spec.seed, path, n), so any subset of paths can be
  // run on any worker with identical results.
  void run(std::uint64_t path, const RowObserver& observe);

  // Picard iteration around the same noise: u^0 = w and u^(k+1) solves the
  // linear problem with sigma frozen at u^k. Rows are regenerated from the
  // same substreams each sweep. on_iterate receives k = 0..n_iters; the field
  // reference stays owned by the engine.
  void run_picard(std::uint64_t path, int n_iters,
                  const std::function<void(int k, const SolutionField&)>& on_iterate);

 private:
  void sample_row(std::uint64_t path, std::size_t n, double* out);

  const SolveSpec& spec_;
  const kernels::HomogeneousField& w_;
  const noise::SpatialIncrementSampler& sampler_;
  const StepMultipliers& mult_;
  StepWorkspace ws_;
  fft::RealTransform tr_m_;
  NormalStream rng_;
  StepState state_;
  std::vector<std::complex<double>> spec_scratch_;
  std::vector<double> embed_scratch_;
  std::vector<double> row_, ubuf_;
  SolutionField iter_a_, iter_b_;
};

// One-call convenience wrappers.
SolutionField solve(const SolveSpec& spec, const kernels::InitialData& data,
                    std::uint64_t path = 0);
std::vector<SolutionField> picard_solve(const SolveSpec& spec,
                                        const kernels::InitialData& data,
                                        int n_iters, std::uint64_t path = 0,
                                        std::vector<double>* distances = nullptr);

// Exponent bookkeeping for the fixed-point contraction: one Picard sweep
// maps a bound of size C at regularity exponents (gamma', H') to
// coef * (c_fixed + c_bar * C), where the exponent shifts are
//   terms = { 1/2, H - 1/2 + (1/(2H) - 1) gamma }
//   c_bar = 2H - 1/2 + (1/(2H) - 1) gamma
// with gamma = H (wave) or H/2 (heat).
struct ContractionExponents {
  double gamma = 0.0;
  double term_half = 0.5;
  double term_mixed = 0.0;
  double cbar = 0.0;
};
ContractionExponents contraction_exponent_terms(kernels::Kind kind, double H);

struct ConstantRecursion {
  std::vector<double> values;  // C_0 .. C_n
  double ratio = 0.0;          // coef * cbar_factor
  double limit = 0.0;          // fixed point when contracting
  bool bounded = false;
  bool diverging = false;
};

// C_{k+1} = coef * (c_fixed + cbar_factor * C_k).
ConstantRecursion picard_constant_recursion(double coef, double c_fixed,
                                            double cbar_factor, double c0,
                                            int n);

}  // namespace rs::solver
