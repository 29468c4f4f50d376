#include "roughspde/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <numeric>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include "roughspde/errors.hpp"
#include "roughspde/montecarlo.hpp"
#include "roughspde/rng.hpp"

namespace rs::reg {

const char* direction_name(Direction d) {
  return d == Direction::Space ? "space" : "time";
}

Direction direction_from_name(const std::string& s) {
  if (s == "space") return Direction::Space;
  if (s == "time") return Direction::Time;
  throw ConfigError("unknown direction: " + s);
}

std::vector<double> dyadic_lags(double h_min, double h_max) {
  if (!(h_min > 0.0) || !(h_max >= h_min))
    throw ConfigError("dyadic_lags: need 0 < h_min <= h_max");
  std::vector<double> lags;
  for (double h = h_max; h >= h_min * (1.0 - 1e-9); h *= 0.5) lags.push_back(h);
  std::reverse(lags.begin(), lags.end());
  return lags;
}

namespace {

std::size_t to_grid_units(double h, double unit, const char* what) {
  double ratio = h / unit;
  auto k = static_cast<long long>(std::llround(ratio));
  if (k < 1)
    throw ConfigError(std::string(what) + " lag is below the grid resolution");
  if (std::abs(ratio - static_cast<double>(k)) > 1e-6)
    throw ConfigError(std::string(what) + " lag is not a grid multiple");
  return static_cast<std::size_t>(k);
}

std::size_t gcd_all(const std::vector<std::size_t>& v) {
  std::size_t g = 0;
  for (std::size_t x : v) g = std::gcd(g, x);
  return g == 0 ? 1 : g;
}

double abs_power(double d, double p) {
  if (p == 2.0) return d * d;
  if (p == 4.0) {
    double s = d * d;
    return s * s;
  }
  return std::pow(std::abs(d), p);
}

}  // namespace

EstimatePlan EstimatePlan::make(const SpaceTimeGrid& grid,
                                std::vector<double> ps,
                                const std::vector<double>& space_lags,
                                const std::vector<double>& time_lags,
                                double ramp_frac, double space_t_min_frac) {
  grid.validate();
  if (ps.empty()) throw ConfigError("estimate: need at least one moment order p");
  for (double p : ps)
    if (!(p > 0.0)) throw ConfigError("estimate: moment orders must be positive");
  if (space_lags.empty() && time_lags.empty())
    throw ConfigError("estimate: no increment directions requested");
  if (!(ramp_frac >= 0.0 && ramp_frac < 1.0))
    throw ConfigError("estimate: ramp_frac must lie in [0, 1)");
  if (!(space_t_min_frac >= 0.0 && space_t_min_frac <= 1.0))
    throw ConfigError("estimate: space_t_min_frac must lie in [0, 1]");

  EstimatePlan plan;
  plan.grid = grid;
  plan.ps = std::move(ps);
  plan.w_lo = grid.window_lo();
  plan.w_hi = grid.window_hi();
  std::size_t win = plan.w_hi - plan.w_lo + 1;

  for (double h : space_lags) {
    std::size_t k = to_grid_units(h, grid.dx(), "space");
    if (k >= win)
      throw ConfigError("estimate: space lag exceeds the observation window");
    plan.space_lags.push_back(k);
  }
  for (double h : time_lags) {
    std::size_t q = to_grid_units(h, grid.dt(), "time");
    plan.time_lags.push_back(q);
  }

  plan.ramp_steps = static_cast<std::size_t>(
      std::llround(ramp_frac * static_cast<double>(grid.nt)));
  plan.space_t_min_step = static_cast<std::size_t>(
      std::llround(space_t_min_frac * static_cast<double>(grid.nt)));
  if (plan.space_t_min_step > grid.nt) plan.space_t_min_step = grid.nt;
  std::size_t span = grid.nt - plan.space_t_min_step;
  plan.space_slice_stride = std::max<std::size_t>(1, span / 32);

  if (!plan.time_lags.empty()) {
    plan.time_stride = gcd_all(plan.time_lags);
    std::size_t first = (plan.ramp_steps + plan.time_stride - 1) /
                        plan.time_stride * plan.time_stride;
    for (std::size_t q : plan.time_lags)
      if (first + q > grid.nt)
        throw ConfigError("estimate: time lag leaves no pairs after the ramp");
  }
  return plan;
}

std::size_t EstimatePlan::n_cells() const {
  return ps.size() * (space_lags.size() + time_lags.size());
}

MomentRow EstimatePlan::cell_meta(std::size_t cell) const {
  MomentRow r;
  std::size_t per_p = space_lags.size() + time_lags.size();
  std::size_t pi = cell / per_p;
  std::size_t rest = cell % per_p;
  r.p = ps.at(pi);
  if (rest < space_lags.size()) {
    r.dir = Direction::Space;
    r.h = static_cast<double>(space_lags[rest]) * grid.dx();
  } else {
    r.dir = Direction::Time;
    r.h = static_cast<double>(time_lags[rest - space_lags.size()]) * grid.dt();
  }
  return r;
}

IncrementAccumulator::IncrementAccumulator(const EstimatePlan& plan)
    : plan_(plan) {
  win_ = plan.w_hi - plan.w_lo + 1;
  if (!plan.time_lags.empty()) {
    std::size_t q_max = *std::max_element(plan.time_lags.begin(),
                                          plan.time_lags.end());
    ring_rows_ = q_max / plan.time_stride + 1;
    ring_.resize(ring_rows_ * win_);
    ring_level_.assign(ring_rows_, std::numeric_limits<std::size_t>::max());
  }
  sums_.assign(plan.n_cells(), 0.0);
  counts_.assign(plan.n_cells(), 0);
}

void IncrementAccumulator::reset() {
  std::fill(sums_.begin(), sums_.end(), 0.0);
  std::fill(counts_.begin(), counts_.end(), 0);
  std::fill(ring_level_.begin(), ring_level_.end(),
            std::numeric_limits<std::size_t>::max());
}

void IncrementAccumulator::consume(std::size_t level, const double* u) {
  const auto& plan = plan_;
  std::size_t per_p = plan.space_lags.size() + plan.time_lags.size();
  const double* uw = u + plan.w_lo;

  bool space_slice = level >= plan.space_t_min_step &&
                     (level - plan.space_t_min_step) % plan.space_slice_stride == 0;
  if (space_slice && !plan.space_lags.empty()) {
    for (std::size_t pi = 0; pi < plan.ps.size(); ++pi) {
      double p = plan.ps[pi];
      for (std::size_t li = 0; li < plan.space_lags.size(); ++li) {
        std::size_t k = plan.space_lags[li];
        std::size_t cell = pi * per_p + li;
        double s = 0.0;
        for (std::size_t j = 0; j + k < win_; ++j)
          s += abs_power(uw[j + k] - uw[j], p);
        sums_[cell] += s;
        counts_[cell] += win_ - k;
      }
    }
  }

  if (plan.time_lags.empty() || level % plan.time_stride != 0) return;

  for (std::size_t li = 0; li < plan.time_lags.size(); ++li) {
    std::size_t q = plan.time_lags[li];
    if (level < q) continue;
    std::size_t m = level - q;
    if (m < plan.ramp_steps) continue;
    std::size_t slot = (m / plan.time_stride) % ring_rows_;
    if (ring_level_[slot] != m) continue;
    const double* past = ring_.data() + slot * win_;
    for (std::size_t pi = 0; pi < plan.ps.size(); ++pi) {
      double p = plan.ps[pi];
      std::size_t cell = pi * per_p + plan.space_lags.size() + li;
      double s = 0.0;
      for (std::size_t j = 0; j < win_; ++j)
        s += abs_power(uw[j] - past[j], p);
      sums_[cell] += s;
      counts_[cell] += win_;
    }
  }

  std::size_t slot = (level / plan.time_stride) % ring_rows_;
  std::copy(uw, uw + win_, ring_.begin() + slot * win_);
  ring_level_[slot] = level;
}

std::vector<double> IncrementAccumulator::path_means() const {
  std::vector<double> out(sums_.size());
  for (std::size_t c = 0; c < sums_.size(); ++c) {
    if (counts_[c] == 0)
      throw NumericalError("estimate: a moment cell received no increment pairs");
    out[c] = sums_[c] / static_cast<double>(counts_[c]);
  }
  return out;
}

MomentEstimate estimate_increment_moments(const EstimatePlan& plan,
                                          std::size_t n_paths, unsigned workers,
                                          const PathFieldRunner& runner) {
  if (n_paths < 16)
    throw ConfigError("estimate: need at least 16 paths for ensemble errors");

  unsigned n_workers = mc::resolve_workers(workers);
  std::vector<std::unique_ptr<IncrementAccumulator>> accs(n_workers);

  MomentEstimate est;
  est.plan = plan;
  est.per_path.assign(n_paths, {});

  mc::run_paths(n_paths, n_workers, [&](std::size_t path, unsigned worker) {
    auto& acc = accs[worker];
    if (!acc) acc = std::make_unique<IncrementAccumulator>(est.plan);
    acc->reset();
    runner(path, worker, [&](std::size_t level, const double* u) {
      acc->consume(level, u);
    });
    est.per_path[path] = acc->path_means();
  });

  std::size_t n_cells = plan.n_cells();
  std::vector<double> tmp(n_paths);
  double md = static_cast<double>(n_paths);
  for (std::size_t c = 0; c < n_cells; ++c) {
    for (std::size_t p = 0; p < n_paths; ++p) tmp[p] = est.per_path[p][c];
    double mean = mc::pairwise_sum(tmp) / md;
    for (std::size_t p = 0; p < n_paths; ++p) {
      double d = tmp[p] - mean;
      tmp[p] = d * d;
    }
    double var = mc::pairwise_sum(tmp) / (md - 1.0);
    MomentRow row = plan.cell_meta(c);
    row.moment = mean;
    row.stderr_ = std::sqrt(var / md);
    row.n_paths = n_paths;
    est.table.rows.push_back(row);
  }
  for (double p : plan.ps)
    if (p > 8.0)
      est.table.warnings.push_back(
          "moment order p > 8: heavy-tail noise makes these estimates fragile");
  return est;
}

LineFit weighted_loglog(const std::vector<double>& h,
                        const std::vector<double>& m,
                        const std::vector<double>& w) {
  std::size_t n = h.size();
  if (m.size() != n || w.size() != n || n < 2)
    throw ConfigError("weighted_loglog: inconsistent or short input");
  std::vector<double> x(n), y(n), wt(n);
  double wsum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(h[i] > 0.0) || !(m[i] > 0.0) || !(w[i] >= 0.0) ||
        !std::isfinite(m[i]) || !std::isfinite(w[i]))
      throw NumericalError("weighted_loglog: nonpositive or non-finite input");
    x[i] = std::log(h[i]);
    y[i] = std::log(m[i]);
    wt[i] = w[i];
    wsum += w[i];
  }
  if (wsum == 0.0) {
    std::fill(wt.begin(), wt.end(), 1.0);
    wsum = static_cast<double>(n);
  }

  double xb = 0.0, yb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    xb += wt[i] * x[i];
    yb += wt[i] * y[i];
  }
  xb /= wsum;
  yb /= wsum;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = x[i] - xb;
    double dy = y[i] - yb;
    sxx += wt[i] * dx * dx;
    sxy += wt[i] * dx * dy;
    syy += wt[i] * dy * dy;
  }
  if (!(sxx > 0.0)) throw ConfigError("weighted_loglog: degenerate abscissae");

  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = yb - fit.slope * xb;
  // Weights are inverse variances of y and treated as known, so the slope
  // variance is 1/Sxx with no residual-MSE rescaling.
  fit.slope_se = std::sqrt(1.0 / sxx);
  double ssres = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ssres += wt[i] * r * r;
  }
  fit.r2 = syy > 0.0 ? 1.0 - ssres / syy : 1.0;
  return fit;
}

namespace {

std::vector<double> ladder_weights(const std::vector<MomentRow>& ladder) {
  bool all_zero = true;
  for (const auto& r : ladder)
    if (r.stderr_ > 0.0) all_zero = false;
  std::vector<double> w(ladder.size(), 1.0);
  if (all_zero) return w;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    double rel = ladder[i].stderr_ / ladder[i].moment;
    w[i] = 1.0 / std::max(rel * rel, 1e-24);
  }
  return w;
}

}  // namespace

ExponentFit fit_exponent(const std::vector<MomentRow>& ladder) {
  if (ladder.size() < 4)
    throw ConfigError("fit_exponent: need at least 4 ladder points");
  for (const auto& r : ladder) {
    if (r.dir != ladder.front().dir || r.p != ladder.front().p)
      throw ConfigError("fit_exponent: ladder mixes directions or orders");
    if (!(r.moment > 0.0))
      throw NumericalError("fit_exponent: nonpositive moment in ladder");
  }
  std::vector<double> h, m;
  for (const auto& r : ladder) {
    h.push_back(r.h);
    m.push_back(r.moment);
  }
  LineFit line = weighted_loglog(h, m, ladder_weights(ladder));

  ExponentFit f;
  f.dir = ladder.front().dir;
  f.p = ladder.front().p;
  f.slope = line.slope;
  f.slope_se = line.slope_se;
  f.r2 = line.r2;
  f.n_points = ladder.size();
  f.exponent = line.slope / f.p;
  double half = 1.96 * line.slope_se / f.p;
  f.ci95_lo = f.exponent - half;
  f.ci95_hi = f.exponent + half;
  return f;
}

ExponentFit fit_exponent_bootstrap(const MomentEstimate& est, Direction dir,
                                   double p, std::size_t n_resamples,
                                   std::uint64_t seed) {
  std::vector<MomentRow> ladder;
  std::vector<std::size_t> cells;
  for (std::size_t c = 0; c < est.table.rows.size(); ++c) {
    const auto& r = est.table.rows[c];
    if (r.dir == dir && r.p == p) {
      ladder.push_back(r);
      cells.push_back(c);
    }
  }
  ExponentFit base = fit_exponent(ladder);
  if (n_resamples == 0) return base;

  std::size_t n_paths = est.per_path.size();
  std::vector<double> h, w;
  for (const auto& r : ladder) h.push_back(r.h);
  w = ladder_weights(ladder);

  boost::random::mt19937_64 gen(mix64(seed));
  boost::random::uniform_int_distribution<std::size_t> pick(0, n_paths - 1);
  std::vector<double> m(cells.size());
  std::vector<double> exps;
  exps.reserve(n_resamples);
  for (std::size_t b = 0; b < n_resamples; ++b) {
    std::fill(m.begin(), m.end(), 0.0);
    for (std::size_t i = 0; i < n_paths; ++i) {
      std::size_t pidx = pick(gen);
      const auto& row = est.per_path[pidx];
      for (std::size_t c = 0; c < cells.size(); ++c) m[c] += row[cells[c]];
    }
    bool ok = true;
    for (auto& v : m) {
      v /= static_cast<double>(n_paths);
      if (!(v > 0.0)) ok = false;
    }
    if (!ok) continue;
    exps.push_back(weighted_loglog(h, m, w).slope / p);
  }
  if (exps.size() < n_resamples / 2)
    throw NumericalError("bootstrap: too many degenerate resamples");

  std::sort(exps.begin(), exps.end());
  auto quantile = [&](double q) {
    double pos = q * static_cast<double>(exps.size() - 1);
    auto i = static_cast<std::size_t>(pos);
    double frac = pos - static_cast<double>(i);
    if (i + 1 >= exps.size()) return exps.back();
    return exps[i] * (1.0 - frac) + exps[i + 1] * frac;
  };
  double blo = quantile(0.025);
  double bhi = quantile(0.975);

  ExponentFit f = base;
  f.ci95_lo = std::min(f.ci95_lo, blo);
  f.ci95_hi = std::max(f.ci95_hi, bhi);
  f.method = "wls+boot";
  return f;
}

double exponent_target(Direction dir, kernels::Kind kind, double H) {
  if (dir == Direction::Space) return H;
  return kind == kernels::Kind::Wave ? H : 0.5 * H;
}

KolmogorovReport kolmogorov_report(const std::vector<ExponentFit>& fits,
                                   double H, kernels::Kind kind, double tol) {
  std::vector<double> distinct_p;
  for (const auto& f : fits)
    if (std::find(distinct_p.begin(), distinct_p.end(), f.p) == distinct_p.end())
      distinct_p.push_back(f.p);
  if (distinct_p.size() < 2)
    throw ConfigError("kolmogorov_report: need fits for at least two p values");

  KolmogorovReport rep;
  rep.H = H;
  rep.kind = kind;
  rep.tol = tol;
  for (double p : distinct_p)
    if (p > 8.0) rep.warn_large_p = true;
  if (rep.warn_large_p)
    rep.warnings.push_back("p > 8 fits included; treat their bands as indicative only");

  for (Direction dir : {Direction::Space, Direction::Time}) {
    DirectionReport dr;
    dr.dir = dir;
    dr.target = exponent_target(dir, kind, H);
    for (const auto& f : fits)
      if (f.dir == dir) dr.fits.push_back(f);
    if (dr.fits.empty()) continue;

    double wsum = 0.0, esum = 0.0;
    double max_width = 0.0, emin = 1e300, emax = -1e300;
    for (const auto& f : dr.fits) {
      double width = f.ci95_hi - f.ci95_lo;
      double se = width / (2.0 * 1.96);
      double wgt = se > 0.0 ? 1.0 / (se * se) : 1.0;
      wsum += wgt;
      esum += wgt * f.exponent;
      max_width = std::max(max_width, width);
      emin = std::min(emin, f.exponent);
      emax = std::max(emax, f.exponent);
      dr.attainable.push_back(f.exponent - 1.0 / f.p);
    }
    dr.pooled = esum / wsum;
    dr.best_attainable = *std::max_element(dr.attainable.begin(), dr.attainable.end());
    dr.p_consistent = (emax - emin) < 2.0 * max_width;
    if (dr.pooled > dr.target + tol)
      dr.flag = "FAIL-HIGH";
    else if (dr.pooled < dr.target - tol)
      dr.flag = "FAIL-LOW";
    else
      dr.flag = "PASS";
    rep.directions.push_back(std::move(dr));
  }
  return rep;
}

std::string KolmogorovReport::render() const {
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof(buf),
                "increment scaling report: kind=%s H=%.6g band=+-%.3g\n",
                kernels::kind_name(kind), H, tol);
  out += buf;
  for (const auto& d : directions) {
    std::snprintf(buf, sizeof(buf),
                  "%-5s target %.4f pooled %.4f  %s  p-consistent=%s\n",
                  direction_name(d.dir), d.target, d.pooled, d.flag.c_str(),
                  d.p_consistent ? "yes" : "no");
    out += buf;
    for (std::size_t i = 0; i < d.fits.size(); ++i) {
      const auto& f = d.fits[i];
      std::snprintf(buf, sizeof(buf),
                    "  p=%-4g exponent %.4f ci95 [%.4f, %.4f] r2 %.4f "
                    "attainable order %.4f (%s)\n",
                    f.p, f.exponent, f.ci95_lo, f.ci95_hi, f.r2,
                    d.attainable[i], f.method.c_str());
      out += buf;
    }
    std::snprintf(buf, sizeof(buf), "  best attainable order: %.4f\n",
                  d.best_attainable);
    out += buf;
  }
  for (const auto& w : warnings) out += "warning: " + w + "\n";
  return out;
}

PropertyPResult property_p_integral(const PropertyPInputs& in) {
  if (!(in.H > 0.0 && in.H < 0.5))
    throw ConfigError("property_p: H must lie in (0, 1/2)");
  if (!(in.p > 0.0) || !(in.dx > 0.0) || !(in.h0 > 0.0))
    throw ConfigError("property_p: p, dx, h0 must be positive");
  if (in.s_values.size() < 2 || in.s_values.front() != 0.0)
    throw ConfigError("property_p: s grid must start at 0 with >= 2 nodes");
  if (in.D.size() != in.s_values.size())
    throw ConfigError("property_p: one D slice per s node required");
  if (in.t_evals.empty()) throw ConfigError("property_p: no evaluation times");
  std::size_t k_max = in.D.front().size();
  if (k_max == 0) throw ConfigError("property_p: empty lag range");
  for (const auto& d : in.D)
    if (d.size() != k_max) throw ConfigError("property_p: ragged D slices");
  double r_eff = static_cast<double>(k_max) * in.dx;
  if (in.r_max > 0.0 && std::abs(in.r_max - r_eff) > in.dx)
    throw ConfigError("property_p: r_max does not match the measured lag range");

  double e = 2.0 / in.p;
  double wexp = 2.0 * in.H - 2.0;
  auto k0 = static_cast<std::size_t>(std::floor(in.h0 / in.dx + 1e-9));
  k0 = std::min(k0, k_max);

  // Per-s spatial integrals, split near / far / plateau tail.
  std::size_t ns = in.s_values.size();
  std::vector<double> near(ns), far(ns), beyond(ns);
  for (std::size_t si = 0; si < ns; ++si) {
    double nsum = 0.0, fsum = 0.0, plateau = 0.0;
    for (std::size_t k = 1; k <= k_max; ++k) {
      double dhat = std::pow(std::max(in.D[si][k - 1], 0.0), e);
      double r = static_cast<double>(k) * in.dx;
      double term = 2.0 * dhat * std::pow(r, wexp) * in.dx;
      if (k <= k0)
        nsum += term;
      else
        fsum += term;
      plateau = std::max(plateau, dhat);
    }
    near[si] = nsum;
    far[si] = fsum;
    beyond[si] = 2.0 * plateau * std::pow(r_eff, 2.0 * in.H - 1.0) /
                 (1.0 - 2.0 * in.H);
  }

  auto kappa_primitive = [&](double tau) {
    // int_0^tau kappa: heat kappa = 1/(2 sqrt(pi u)) -> sqrt(tau/pi);
    // wave kappa = u/2 -> tau^2/4.
    if (in.kind == kernels::Kind::Heat)
      return std::sqrt(tau / std::numbers::pi);
    return 0.25 * tau * tau;
  };

  PropertyPResult res;
  res.at_t.reserve(in.t_evals.size());
  double best = -1.0;
  for (double t : in.t_evals) {
    if (!(t > 0.0)) throw ConfigError("property_p: evaluation times must be positive");
    double total = 0.0, tn = 0.0, tf = 0.0, tb = 0.0;
    for (std::size_t si = 0; si + 1 < ns; ++si) {
      double a = in.s_values[si];
      if (a >= t) break;
      double b = std::min(in.s_values[si + 1], t);
      double kcell = kappa_primitive(t - a) - kappa_primitive(t - b);
      tn += kcell * near[si];
      tf += kcell * far[si];
      tb += kcell * beyond[si];
      total += kcell * (near[si] + far[si] + beyond[si]);
    }
    res.at_t.push_back(total);
    if (total > best) {
      best = total;
      res.t_at_max = t;
      res.near_part = tn;
      res.far_part = tf;
      res.beyond_part = tb;
    }
  }
  res.value = best;
  res.finite = std::isfinite(res.value);
  return res;
}

namespace {

std::string describe(const noise::TestFunction& f) {
  char buf[96];
  if (f.kind == noise::ProfileKind::Gaussian)
    std::snprintf(buf, sizeof(buf), "gauss(%g,%g)x[%g,%g)", f.p0, f.p1, f.t0, f.t1);
  else
    std::snprintf(buf, sizeof(buf), "ind[%g,%g)x[%g,%g)", f.p0, f.p1, f.t0, f.t1);
  return buf;
}

}  // namespace

std::vector<CovCheck> verify_noise_covariance(
    const SpaceTimeGrid& grid, double H,
    const std::vector<std::pair<noise::TestFunction, noise::TestFunction>>& pairs,
    std::size_t n_paths, std::uint64_t seed, double rel_allowance,
    unsigned workers) {
  grid.validate();
  if (pairs.empty()) throw ConfigError("verify_noise_covariance: no pairs");
  if (n_paths < 16) throw ConfigError("verify_noise_covariance: need >= 16 paths");

  noise::SpatialIncrementSampler sampler(grid, H);
  unsigned n_workers = mc::resolve_workers(workers);

  struct WorkerState {
    std::unique_ptr<fft::RealTransform> tr;
    noise::NoiseSlab slab;
  };
  std::vector<WorkerState> states(n_workers);
  std::vector<std::vector<double>> products(n_paths);

  mc::run_paths(n_paths, n_workers, [&](std::size_t path, unsigned worker) {
    auto& st = states[worker];
    if (!st.tr)
      st.tr = std::make_unique<fft::RealTransform>(sampler.embedding_size());
    noise::fill_noise_slab(sampler, grid, H, seed, path, *st.tr, st.slab);
    std::vector<double> prods;
    prods.reserve(pairs.size());
    for (const auto& [f, g] : pairs) {
      double vf = noise::pair_with_test_function(st.slab, grid, f);
      double vg = noise::pair_with_test_function(st.slab, grid, g);
      prods.push_back(vf * vg);
    }
    products[path] = std::move(prods);
  });

  std::vector<CovCheck> checks;
  std::vector<double> tmp(n_paths);
  double md = static_cast<double>(n_paths);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (std::size_t p = 0; p < n_paths; ++p) tmp[p] = products[p][i];
    double mean = mc::pairwise_sum(tmp) / md;
    for (std::size_t p = 0; p < n_paths; ++p) {
      double d = tmp[p] - mean;
      tmp[p] = d * d;
    }
    double sd = std::sqrt(mc::pairwise_sum(tmp) / (md - 1.0));

    CovCheck c;
    c.label = describe(pairs[i].first) + " ~ " + describe(pairs[i].second);
    c.sample = mean;
    c.stderr_ = sd / std::sqrt(md);
    c.quadrature =
        noise::spectral_covariance_quadrature(pairs[i].first, pairs[i].second, H);
    c.tol = 3.0 * c.stderr_ + rel_allowance * std::abs(c.quadrature);
    c.pass = std::abs(c.sample - c.quadrature) <= c.tol;
    checks.push_back(std::move(c));
  }
  return checks;
}

}  // namespace rs::reg
