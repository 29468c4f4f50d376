#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>

#include "roughspde/errors.hpp"
#include "roughspde/experiment.hpp"
#include "roughspde/montecarlo.hpp"

// The `verify` subcommand: self-contained checks that the implementation
// honors its own contracts on the user's configuration, as opposed to the
// unit suite which pins frozen oracle numbers.
namespace rs::ops {

namespace {

std::string rated(bool ok, const std::string& text) {
  return std::string(ok ? "[PASS] " : "[FAIL] ") + text;
}

std::string info(const std::string& text) { return "[INFO] " + text; }

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

SuiteResult suite_noise(const ExperimentConfig& cfg) {
  SuiteResult out{"noise", true, {}};
  SpaceTimeGrid g = cfg.grid();
  const double T = g.T;
  const double sigma = std::min(1.0, g.L / 4.0);
  const double b = std::min(1.0, g.L / 2.0);

  noise::TestFunction gauss{noise::ProfileKind::Gaussian, 0.0, sigma, 0.0, T};
  noise::TestFunction gauss_early = gauss, gauss_late = gauss;
  gauss_early.t1 = T / 2.0;
  gauss_late.t0 = T / 2.0;
  noise::TestFunction ind1{noise::ProfileKind::Indicator, 0.0, b, 0.0, T};
  noise::TestFunction ind2{noise::ProfileKind::Indicator, b, 2.0 * b, 0.0, T};

  std::vector<std::pair<noise::TestFunction, noise::TestFunction>> pairs = {
      {gauss, gauss},              // variance of one pairing
      {gauss_early, gauss_late},   // disjoint time supports: zero
      {ind1, ind2},                // adjacent indicators: negative correlation
  };

  auto checks = reg::verify_noise_covariance(g, cfg.H, pairs, cfg.paths,
                                             cfg.seed, 0.02,
                                             resolve_worker_count(cfg));
  for (const auto& c : checks) {
    out.pass = out.pass && c.pass;
    out.lines.push_back(rated(
        c.pass,
        fmt("noise cov %s: sample=%.6g (se %.2g) vs quadrature=%.6g, tol=%.2g",
            c.label.c_str(), c.sample, c.stderr_, c.quadrature, c.tol)));
  }
  return out;
}

SuiteResult suite_kernels(const ExperimentConfig& cfg) {
  SuiteResult out{"kernels", true, {}};
  const double H = cfg.H;
  for (double h : {cfg.h0, cfg.h0 / 2.0}) {
    double q = kernels::kernel_energy(kernels::Kind::Heat, h, H);
    double c = kernels::kernel_energy_heat_closed(h, H);
    double rel = std::abs(q - c) / c;
    bool ok = rel <= 1e-6;
    out.pass = out.pass && ok;
    out.lines.push_back(rated(
        ok, fmt("heat increment energy h=%g: quadrature=%.12g closed=%.12g "
                "rel=%.2g", h, q, c, rel)));

    double e1 = kernels::kernel_energy(kernels::Kind::Wave, h, H);
    double e2 = kernels::kernel_energy(kernels::Kind::Wave, 2.0 * h, H);
    double target = std::pow(2.0, 2.0 * H + 1.0);
    double rel2 = std::abs(e2 / e1 - target) / target;
    bool ok2 = rel2 <= 1e-3;
    out.pass = out.pass && ok2;
    out.lines.push_back(rated(
        ok2, fmt("wave increment energy ratio h=%g: E(2h)/E(h)=%.9g vs "
                 "2^(2H+1)=%.9g rel=%.2g", h, e2 / e1, target, rel2)));
  }
  return out;
}

SuiteResult suite_picard(const ExperimentConfig& cfg) {
  SuiteResult out{"picard", true, {}};
  const int n_iters = std::max(cfg.n_iters, 3);
  const std::size_t n_paths = cfg.paths;

  Experiment ex = build_experiment(cfg);
  const std::size_t nodes = (ex.grid.nt + 1) * ex.grid.nx;

  // Ensemble RMS distance profile between consecutive sweeps, accumulated
  // node-wise; serial so the sums do not depend on scheduling.
  std::vector<std::vector<double>> sumsq(
      n_iters, std::vector<double>(nodes, 0.0));
  solver::PathEngine engine(ex.spec, ex.w, ex.sampler, ex.mult);
  std::vector<double> prev;
  for (std::size_t path = 0; path < n_paths; ++path) {
    engine.run_picard(path, n_iters,
                      [&](int k, const solver::SolutionField& f) {
                        if (k > 0) {
                          auto& acc = sumsq[k - 1];
                          for (std::size_t i = 0; i < nodes; ++i) {
                            double d = f.data[i] - prev[i];
                            acc[i] += d * d;
                          }
                        }
                        prev = f.data;
                      });
  }
  std::vector<double> dist(n_iters);
  for (int k = 0; k < n_iters; ++k) {
    double worst = 0.0;
    for (std::size_t i = 0; i < nodes; ++i) worst = std::max(worst, sumsq[k][i]);
    dist[k] = std::sqrt(worst / static_cast<double>(n_paths));
  }
  std::string profile = "picard ensemble distances:";
  for (double d : dist) profile += fmt(" %.6g", d);
  out.lines.push_back(info(profile + fmt("  (paths=%zu)", n_paths)));
  bool decreasing = true;
  for (int k = 0; k + 1 < n_iters; ++k)
    decreasing = decreasing && dist[k + 1] < dist[k];
  out.pass = out.pass && decreasing;
  out.lines.push_back(
      rated(decreasing, "consecutive sweep distances strictly decrease"));

  // With a constant coefficient the second sweep reproduces the first
  // exactly, since sigma no longer depends on the iterate.
  {
    solver::SolveSpec spec0 = ex.spec;
    spec0.sigma.a = 0.0;
    std::vector<double> d;
    solver::picard_solve(spec0, ex.init, 2, 0, &d);
    bool exact = d.size() == 2 && d[1] == 0.0;
    out.pass = out.pass && exact;
    out.lines.push_back(rated(
        exact, fmt("additive coefficient: sweep 2 identical to sweep 1 "
                   "(distance %.3g)", d.size() == 2 ? d[1] : -1.0)));
  }

  auto ce = solver::contraction_exponent_terms(cfg.kind, cfg.H);
  out.lines.push_back(info(
      fmt("contraction exponents: gamma=%g terms={%g, %g} cbar=%g",
          ce.gamma, ce.term_half, ce.term_mixed, ce.cbar)));

  auto rec = solver::picard_constant_recursion(0.5, 1.0, 1.0, 0.0, 16);
  bool ok1 = rec.bounded && !rec.diverging &&
             std::abs(rec.values.back() - rec.limit) < 1e-3 * rec.limit;
  out.pass = out.pass && ok1;
  out.lines.push_back(rated(
      ok1, fmt("constant recursion at ratio %.2g settles at %.6g",
               rec.ratio, rec.limit)));
  auto rec2 = solver::picard_constant_recursion(1.25, 1.0, 1.0, 0.0, 16);
  bool ok2 = rec2.diverging && !rec2.bounded;
  out.pass = out.pass && ok2;
  out.lines.push_back(
      rated(ok2, fmt("constant recursion at ratio %.2g flagged as diverging",
                     rec2.ratio)));
  return out;
}

SuiteResult suite_property(const ExperimentConfig& cfg) {
  SuiteResult out{"property_p", true, {}};
  Experiment ex = build_experiment(cfg);
  const double p = ex.cfg.ps.front();
  const double T = ex.grid.T;
  PropertyMeasurement pm =
      measure_property_p(ex, p, cfg.paths, resolve_worker_count(cfg),
                         {T / 2.0, 0.75 * T, T});
  out.lines.push_back(info(
      fmt("kernel-weighted increment functional: nu=%.6g (path se %.2g) at "
          "t=%g", pm.result.value, pm.nu_stderr, pm.result.t_at_max)));
  out.lines.push_back(info(
      fmt("split near=%.6g far=%.6g beyond-plateau=%.6g (p=%g, h0=%g)",
          pm.result.near_part, pm.result.far_part, pm.result.beyond_part, p,
          cfg.h0)));
  bool ok = pm.result.finite && pm.result.value > 0.0;
  out.pass = out.pass && ok;
  out.lines.push_back(rated(ok, "functional is finite and positive"));
  return out;
}

}  // namespace

SuiteResult verify_suite(const ExperimentConfig& cfg, const std::string& name) {
  if (name == "noise") return suite_noise(cfg);
  if (name == "kernels") return suite_kernels(cfg);
  if (name == "picard") return suite_picard(cfg);
  if (name == "property_p") return suite_property(cfg);
  if (name == "all") {
    SuiteResult all{"all", true, {}};
    for (const char* sub : {"noise", "kernels", "picard", "property_p"}) {
      SuiteResult r = verify_suite(cfg, sub);
      all.pass = all.pass && r.pass;
      all.lines.push_back(info(std::string("--- ") + sub + " ---"));
      all.lines.insert(all.lines.end(), r.lines.begin(), r.lines.end());
    }
    return all;
  }
  throw ConfigError("unknown verify suite: " + name +
                    " (expected noise|kernels|picard|property_p|all)");
}

}  // namespace rs::ops
