#include "roughspde/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "roughspde/errors.hpp"

namespace rs::solver {

namespace {
constexpr double pi = std::numbers::pi;
}

Scheme scheme_from_name(const std::string& s) {
  if (s == "mild") return Scheme::MildStep;
  if (s == "picard") return Scheme::Picard;
  throw ConfigError("unknown scheme: " + s);
}

const char* scheme_name(Scheme s) {
  return s == Scheme::MildStep ? "mild" : "picard";
}

NoiseFactor noise_factor_from_name(const std::string& s) {
  if (s == "variance_exact") return NoiseFactor::VarianceExact;
  if (s == "full_step") return NoiseFactor::FullStep;
  throw ConfigError("unknown noise factor: " + s);
}

const char* noise_factor_name(NoiseFactor f) {
  return f == NoiseFactor::VarianceExact ? "variance_exact" : "full_step";
}

StepMultipliers make_step_multipliers(kernels::Kind kind,
                                      const SpaceTimeGrid& grid,
                                      NoiseFactor factor) {
  grid.validate();
  StepMultipliers m;
  m.kind = kind;
  m.nk = grid.nx / 2 + 1;
  double dt = grid.dt();
  double inv_dx = 1.0 / grid.dx();

  if (kind == kernels::Kind::Heat) {
    m.uu.resize(m.nk);
    m.fu.resize(m.nk);
    for (std::size_t k = 0; k < m.nk; ++k) {
      double xi = pi * static_cast<double>(k) / grid.L;
      double a = xi * xi * dt;
      m.uu[k] = std::exp(-0.5 * a);
      double psi;
      if (factor == NoiseFactor::FullStep) {
        psi = std::exp(-0.5 * a);
      } else {
        // Per-mode standard deviation of int_0^dt exp(-(dt-s) xi^2/2) dW(s)
        // equals sqrt((1 - exp(-xi^2 dt)) / xi^2); dividing by sqrt(dt)
        // (already carried by the noise row) gives this factor.
        psi = a < 1e-12 ? 1.0 : std::sqrt(-std::expm1(-a) / a);
      }
      m.fu[k] = psi * inv_dx;
    }
    return m;
  }

  m.uu.resize(m.nk);
  m.uv.resize(m.nk);
  m.vu.resize(m.nk);
  m.vv.resize(m.nk);
  m.fu.resize(m.nk);
  m.fv.resize(m.nk);
  for (std::size_t k = 0; k < m.nk; ++k) {
    double xi = pi * static_cast<double>(k) / grid.L;
    double th = xi * dt;
    double c = std::cos(th);
    double sinc = k == 0 ? dt : std::sin(th) / xi;
    m.uu[k] = c;
    m.uv[k] = sinc;
    m.vu[k] = -xi * std::sin(th);
    m.vv[k] = c;
    m.fu[k] = sinc * inv_dx;
    m.fv[k] = c * inv_dx;
  }
  return m;
}

void StepState::reset(std::size_t nk, kernels::Kind kind) {
  zhat.assign(nk, {0.0, 0.0});
  if (kind == kernels::Kind::Wave)
    vhat.assign(nk, {0.0, 0.0});
  else
    vhat.clear();
}

StepWorkspace::StepWorkspace(std::size_t nx)
    : tr(nx), prod(nx), phat(nx / 2 + 1), z(nx) {}

void step_mild(const StepMultipliers& mult, const double* u, const double* row,
               SigmaAffine sigma, StepState& state, StepWorkspace& ws) {
  std::size_t nx = ws.tr.size();
  for (std::size_t j = 0; j < nx; ++j)
    ws.prod[j] = (sigma.a * u[j] + sigma.b) * row[j];
  ws.tr.forward(ws.prod.data(), ws.phat.data());

  if (mult.kind == kernels::Kind::Heat) {
    for (std::size_t k = 0; k < mult.nk; ++k)
      state.zhat[k] = mult.uu[k] * state.zhat[k] + mult.fu[k] * ws.phat[k];
  } else {
    for (std::size_t k = 0; k < mult.nk; ++k) {
      std::complex<double> z = state.zhat[k];
      std::complex<double> v = state.vhat[k];
      std::complex<double> p = ws.phat[k];
      state.zhat[k] = mult.uu[k] * z + mult.uv[k] * v + mult.fu[k] * p;
      state.vhat[k] = mult.vu[k] * z + mult.vv[k] * v + mult.fv[k] * p;
    }
  }

  ws.tr.inverse(state.zhat.data(), ws.z.data());
  double inv_nx = 1.0 / static_cast<double>(nx);
  for (std::size_t j = 0; j < nx; ++j) ws.z[j] *= inv_nx;
}

PathEngine::PathEngine(const SolveSpec& spec, const kernels::HomogeneousField& w,
                       const noise::SpatialIncrementSampler& sampler,
                       const StepMultipliers& mult)
    : spec_(spec),
      w_(w),
      sampler_(sampler),
      mult_(mult),
      ws_(spec.grid.nx),
      tr_m_(sampler.embedding_size()),
      rng_(0),
      spec_scratch_(sampler.embedding_size() / 2 + 1),
      embed_scratch_(sampler.embedding_size()),
      row_(spec.grid.nx),
      ubuf_(spec.grid.nx) {
  if (w.nx != spec.grid.nx || w.nt != spec.grid.nt)
    throw ConfigError("PathEngine: homogeneous field does not match the grid");
  if (sampler.nx() != spec.grid.nx)
    throw ConfigError("PathEngine: sampler does not match the grid");
}

void PathEngine::sample_row(std::uint64_t path, std::size_t n, double* out) {
  rng_.reseed(substream_seed(spec_.seed, path, n));
  sampler_.sample(rng_, tr_m_, spec_scratch_.data(), embed_scratch_.data(), out);
}

namespace {
void check_finite(const std::vector<double>& z, std::size_t step) {
  for (double v : z)
    if (!std::isfinite(v))
      throw InstabilityError("solution became non-finite", step);
}
}  // namespace

void PathEngine::run(std::uint64_t path, const RowObserver& observe) {
  std::size_t nx = spec_.grid.nx;
  std::size_t nt = spec_.grid.nt;

  observe(0, w_.row(0));
  if (spec_.sigma.is_zero()) {
    for (std::size_t n = 1; n <= nt; ++n) observe(n, w_.row(n));
    return;
  }

  state_.reset(mult_.nk, spec_.kind);
  std::copy(w_.row(0), w_.row(0) + nx, ubuf_.begin());
  for (std::size_t n = 0; n < nt; ++n) {
    sample_row(path, n, row_.data());
    step_mild(mult_, ubuf_.data(), row_.data(), spec_.sigma, state_, ws_);
    check_finite(ws_.z, n + 1);
    const double* wnext = w_.row(n + 1);
    for (std::size_t j = 0; j < nx; ++j) ubuf_[j] = wnext[j] + ws_.z[j];
    observe(n + 1, ubuf_.data());
  }
}

void PathEngine::run_picard(
    std::uint64_t path, int n_iters,
    const std::function<void(int, const SolutionField&)>& on_iterate) {
  if (n_iters < 1) throw ConfigError("picard: need n_iters >= 1");
  std::size_t nx = spec_.grid.nx;
  std::size_t nt = spec_.grid.nt;

  auto init_field = [&](SolutionField& f) {
    f.nt = nt;
    f.nx = nx;
    f.H = spec_.H;
    f.dt = spec_.grid.dt();
    f.dx = spec_.grid.dx();
    f.seed = spec_.seed;
    f.data.resize((nt + 1) * nx);
  };
  init_field(iter_a_);
  init_field(iter_b_);

  std::copy(w_.data.begin(), w_.data.end(), iter_a_.data.begin());
  on_iterate(0, iter_a_);

  for (int k = 1; k <= n_iters; ++k) {
    state_.reset(mult_.nk, spec_.kind);
    std::copy(w_.row(0), w_.row(0) + nx, iter_b_.row(0));
    for (std::size_t n = 0; n < nt; ++n) {
      sample_row(path, n, row_.data());
      step_mild(mult_, iter_a_.row(n), row_.data(), spec_.sigma, state_, ws_);
      check_finite(ws_.z, n + 1);
      const double* wnext = w_.row(n + 1);
      double* out = iter_b_.row(n + 1);
      for (std::size_t j = 0; j < nx; ++j) out[j] = wnext[j] + ws_.z[j];
    }
    on_iterate(k, iter_b_);
    std::swap(iter_a_.data, iter_b_.data);
  }
}

SolutionField solve(const SolveSpec& spec, const kernels::InitialData& data,
                    std::uint64_t path) {
  spec.grid.validate();
  auto w = kernels::homogeneous_solution(spec.grid, spec.kind, data);
  noise::SpatialIncrementSampler sampler(spec.grid, spec.H);
  auto mult = make_step_multipliers(spec.kind, spec.grid, spec.noise_factor);
  PathEngine engine(spec, w, sampler, mult);

  SolutionField out;
  out.nt = spec.grid.nt;
  out.nx = spec.grid.nx;
  out.H = spec.H;
  out.dt = spec.grid.dt();
  out.dx = spec.grid.dx();
  out.seed = spec.seed;
  out.data.resize((out.nt + 1) * out.nx);
  engine.run(path, [&](std::size_t n, const double* u) {
    std::copy(u, u + out.nx, out.row(n));
  });
  return out;
}

std::vector<SolutionField> picard_solve(const SolveSpec& spec,
                                        const kernels::InitialData& data,
                                        int n_iters, std::uint64_t path,
                                        std::vector<double>* distances) {
  spec.grid.validate();
  auto w = kernels::homogeneous_solution(spec.grid, spec.kind, data);
  noise::SpatialIncrementSampler sampler(spec.grid, spec.H);
  auto mult = make_step_multipliers(spec.kind, spec.grid, spec.noise_factor);
  PathEngine engine(spec, w, sampler, mult);

  std::vector<SolutionField> iterates;
  if (distances) distances->clear();
  engine.run_picard(path, n_iters, [&](int k, const SolutionField& f) {
    if (distances && k > 0) {
      const auto& prev = iterates.back();
      double d = 0.0;
      for (std::size_t i = 0; i < f.data.size(); ++i)
        d = std::max(d, std::abs(f.data[i] - prev.data[i]));
      distances->push_back(d);
    }
    iterates.push_back(f);
  });
  return iterates;
}

ContractionExponents contraction_exponent_terms(kernels::Kind kind, double H) {
  if (!(H > 0.0 && H < 0.5))
    throw ConfigError("contraction_exponent_terms: H must lie in (0, 1/2)");
  ContractionExponents e;
  e.gamma = kind == kernels::Kind::Wave ? H : 0.5 * H;
  double mix = (1.0 / (2.0 * H) - 1.0) * e.gamma;
  e.term_half = 0.5;
  e.term_mixed = H - 0.5 + mix;
  e.cbar = 2.0 * H - 0.5 + mix;
  return e;
}

ConstantRecursion picard_constant_recursion(double coef, double c_fixed,
                                            double cbar_factor, double c0,
                                            int n) {
  if (coef < 0.0 || c_fixed < 0.0 || cbar_factor < 0.0 || c0 < 0.0)
    throw ConfigError("picard_constant_recursion: coefficients must be >= 0");
  if (n < 1) throw ConfigError("picard_constant_recursion: need n >= 1");

  ConstantRecursion r;
  r.ratio = coef * cbar_factor;
  r.values.reserve(static_cast<std::size_t>(n) + 1);
  r.values.push_back(c0);
  double v = c0;
  for (int k = 0; k < n; ++k) {
    v = coef * (c_fixed + cbar_factor * v);
    r.values.push_back(v);
  }
  if (r.ratio < 1.0) {
    r.limit = coef * c_fixed / (1.0 - r.ratio);
    r.bounded = true;
    r.diverging = false;
  } else {
    r.limit = std::numeric_limits<double>::infinity();
    r.diverging = r.ratio > 1.0 ? (c_fixed > 0.0 || c0 > 0.0)
                                : coef * c_fixed > 0.0;
    r.bounded = !r.diverging;
  }
  return r;
}

}  // namespace rs::solver
