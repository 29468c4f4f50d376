#include "roughspde/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "json.hpp"

#include "roughspde/errors.hpp"
#include "roughspde/io.hpp"
#include "roughspde/montecarlo.hpp"
#include "roughspde/version.hpp"

namespace rs::ops {

namespace {

class StageTimer {
 public:
  void lap(const std::string& name) {
    auto now = clock::now();
    laps_.emplace_back(name, std::chrono::duration<double, std::milli>(
                                 now - mark_).count());
    mark_ = now;
  }
  const std::vector<std::pair<std::string, double>>& laps() const {
    return laps_;
  }

 private:
  using clock = std::chrono::steady_clock;
  clock::time_point mark_ = clock::now();
  std::vector<std::pair<std::string, double>> laps_;
};

void ensure_out_dir(const std::string& out) {
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) throw IoError("cannot create output directory " + out + ": " +
                        ec.message());
}

solver::SolutionField wrap_field(const Experiment& ex,
                                 std::vector<double> data) {
  solver::SolutionField f;
  f.nt = ex.grid.nt;
  f.nx = ex.grid.nx;
  f.H = ex.cfg.H;
  f.dt = ex.grid.dt();
  f.dx = ex.grid.dx();
  f.seed = ex.cfg.seed;
  f.data = std::move(data);
  return f;
}

std::string fmtg(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

}  // namespace

Experiment build_experiment(ExperimentConfig cfg) {
  cfg.validate();
  SpaceTimeGrid grid = cfg.grid();
  kernels::InitialData init = kernels::make_initial_data(cfg.initial_data_params());
  kernels::HomogeneousField w = kernels::homogeneous_solution(grid, cfg.kind, init);
  noise::SpatialIncrementSampler sampler(grid, cfg.H);
  solver::StepMultipliers mult =
      solver::make_step_multipliers(cfg.kind, grid, cfg.noise_factor);
  solver::SolveSpec spec = cfg.solve_spec();
  return Experiment{std::move(cfg), grid,      std::move(init), std::move(w),
                    std::move(sampler),        std::move(mult), spec};
}

EnginePool::EnginePool(const Experiment& ex, unsigned workers) {
  if (workers == 0) throw ConfigError("engine pool needs at least one worker");
  engines_.reserve(workers);
  for (unsigned k = 0; k < workers; ++k)
    engines_.push_back(std::make_unique<solver::PathEngine>(
        ex.spec, ex.w, ex.sampler, ex.mult));
}

reg::PathFieldRunner EnginePool::runner() {
  return [this](std::size_t path, unsigned worker,
                const solver::RowObserver& observe) {
    engines_.at(worker)->run(path, observe);
  };
}

unsigned resolve_worker_count(const ExperimentConfig& cfg) {
  return mc::resolve_workers(cfg.workers);
}

MomentsRun run_moments(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  cfg.validate();
  StageTimer timer;
  MomentsRun out;

  Experiment ex = build_experiment(cfg);
  reg::EstimatePlan plan = cfg.estimate_plan();
  unsigned workers = resolve_worker_count(cfg);
  EnginePool pool(ex, workers);
  timer.lap("setup");

  out.est = reg::estimate_increment_moments(plan, cfg.paths, workers,
                                            pool.runner());
  out.est.table.config_hash = cfg.hash();
  timer.lap("paths");

  for (double p : plan.ps) {
    if (!plan.space_lags.empty())
      out.fits.push_back(
          cfg.bootstrap > 0
              ? reg::fit_exponent_bootstrap(out.est, reg::Direction::Space, p,
                                            cfg.bootstrap, cfg.seed)
              : fit_from_table(out.est.table, reg::Direction::Space, p));
    if (!plan.time_lags.empty())
      out.fits.push_back(
          cfg.bootstrap > 0
              ? reg::fit_exponent_bootstrap(out.est, reg::Direction::Time, p,
                                            cfg.bootstrap, cfg.seed)
              : fit_from_table(out.est.table, reg::Direction::Time, p));
  }
  out.report = reg::kolmogorov_report(out.fits, cfg.H, cfg.kind,
                                      cfg.exponent_tol);
  for (const auto& wrn : cfg.warnings) out.report.warnings.push_back(wrn);
  for (const auto& wrn : out.est.table.warnings)
    out.report.warnings.push_back(wrn);
  timer.lap("fits");

  out.timings_ms = timer.laps();
  return out;
}

reg::ExponentFit fit_from_table(const reg::MomentTable& table,
                                reg::Direction dir, double p) {
  std::vector<reg::MomentRow> ladder;
  for (const auto& r : table.rows)
    if (r.dir == dir && r.p == p) ladder.push_back(r);
  return reg::fit_exponent(ladder);
}

PropertyMeasurement measure_property_p(const Experiment& ex, double p,
                                       std::size_t n_paths, unsigned workers,
                                       const std::vector<double>& t_evals) {
  const SpaceTimeGrid& g = ex.grid;
  if (n_paths < 16) throw ConfigError("property measurement needs >= 16 paths");
  const double dx = g.dx();
  const auto k_max = static_cast<std::size_t>(ex.cfg.h0 / dx + 1e-9);
  const std::size_t w_lo = g.window_lo(), w_hi = g.window_hi();
  if (k_max < 1) throw ConfigError("h0 below the grid resolution");
  if (w_lo + k_max >= w_hi)
    throw ConfigError("h0 exceeds the observation window");

  const std::size_t stride = std::max<std::size_t>(1, g.nt / 32);
  std::vector<std::size_t> levels;
  for (std::size_t n = 0; n <= g.nt; n += stride) levels.push_back(n);
  if (levels.back() != g.nt) levels.push_back(g.nt);
  const std::size_t n_s = levels.size();
  std::vector<std::ptrdiff_t> slice_of(g.nt + 1, -1);
  for (std::size_t i = 0; i < n_s; ++i)
    slice_of[levels[i]] = static_cast<std::ptrdiff_t>(i);

  const std::size_t cells = n_s * k_max;
  std::vector<double> slab(n_paths * cells, 0.0);

  EnginePool pool(ex, mc::resolve_workers(workers));
  auto runner = pool.runner();
  mc::run_paths(n_paths, workers, [&](std::size_t path, unsigned worker) {
    double* mine = slab.data() + path * cells;
    runner(path, worker, [&](std::size_t level, const double* u) {
      std::ptrdiff_t s = slice_of[level];
      if (s < 0) return;
      double* dst = mine + static_cast<std::size_t>(s) * k_max;
      for (std::size_t k = 1; k <= k_max; ++k) {
        double sum = 0.0;
        const std::size_t j_hi = w_hi - k;
        for (std::size_t j = w_lo; j <= j_hi; ++j)
          sum += std::pow(std::abs(u[j + k] - u[j]), p);
        dst[k - 1] = sum / static_cast<double>(j_hi - w_lo + 1);
      }
    });
  });

  PropertyMeasurement pm;
  pm.s_values.resize(n_s);
  for (std::size_t i = 0; i < n_s; ++i) pm.s_values[i] = g.t(levels[i]);

  reg::PropertyPInputs in;
  in.kind = ex.cfg.kind;
  in.H = ex.cfg.H;
  in.p = p;
  in.dx = dx;
  in.h0 = ex.cfg.h0;
  in.r_max = static_cast<double>(k_max) * dx;
  in.s_values = pm.s_values;
  in.t_evals = t_evals;

  // Per-path functional values for an error bar.
  pm.per_path_nu.resize(n_paths);
  std::vector<std::vector<double>> D_one(n_s, std::vector<double>(k_max));
  for (std::size_t path = 0; path < n_paths; ++path) {
    const double* mine = slab.data() + path * cells;
    for (std::size_t i = 0; i < n_s; ++i)
      for (std::size_t k = 0; k < k_max; ++k)
        D_one[i][k] = mine[i * k_max + k];
    in.D = D_one;
    pm.per_path_nu[path] = reg::property_p_integral(in).value;
  }

  // Ensemble-mean surface, reduced in path order.
  pm.D.assign(n_s, std::vector<double>(k_max, 0.0));
  std::vector<double> column(n_paths);
  for (std::size_t i = 0; i < n_s; ++i)
    for (std::size_t k = 0; k < k_max; ++k) {
      for (std::size_t path = 0; path < n_paths; ++path)
        column[path] = slab[path * cells + i * k_max + k];
      pm.D[i][k] = mc::pairwise_sum(column) / static_cast<double>(n_paths);
    }
  in.D = pm.D;
  pm.result = reg::property_p_integral(in);

  const double mean_nu =
      mc::pairwise_sum(pm.per_path_nu) / static_cast<double>(n_paths);
  for (std::size_t i = 0; i < n_paths; ++i) column[i] =
      (pm.per_path_nu[i] - mean_nu) * (pm.per_path_nu[i] - mean_nu);
  const double var = mc::pairwise_sum(column) /
                     static_cast<double>(n_paths - 1);
  pm.nu_stderr = std::sqrt(var / static_cast<double>(n_paths));
  return pm;
}

int cmd_simulate(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  cfg.validate();
  ensure_out_dir(cfg.out);
  StageTimer timer;

  Experiment ex = build_experiment(cfg);
  solver::PathEngine engine(ex.spec, ex.w, ex.sampler, ex.mult);
  timer.lap("setup");

  solver::SolutionField field = wrap_field(ex, {});
  field.data.assign((ex.grid.nt + 1) * ex.grid.nx, 0.0);
  std::vector<double> distances;

  if (cfg.scheme == solver::Scheme::Picard) {
    std::vector<double> prev;
    engine.run_picard(0, cfg.n_iters,
                      [&](int k, const solver::SolutionField& f) {
                        if (k > 0) {
                          double d = 0.0;
                          for (std::size_t i = 0; i < f.data.size(); ++i)
                            d = std::max(d, std::abs(f.data[i] - prev[i]));
                          distances.push_back(d);
                        }
                        prev = f.data;
                        field.data = f.data;
                      });
  } else {
    engine.run(0, [&](std::size_t level, const double* u) {
      std::copy(u, u + ex.grid.nx, field.row(level));
    });
  }
  timer.lap("solve");

  io::write_solution_field(cfg.out + "/field.rsuf", field);
  io::write_solution_field(cfg.out + "/homogeneous.rsuf",
                           wrap_field(ex, ex.w.data));
  std::vector<io::OutputRecord> outputs;
  outputs.push_back(io::record_output(cfg.out, "field.rsuf"));
  outputs.push_back(io::record_output(cfg.out, "homogeneous.rsuf"));
  if (cfg.scheme == solver::Scheme::Picard) {
    io::write_distances_csv(cfg.out + "/distances.csv", distances, cfg.hash());
    outputs.push_back(io::record_output(cfg.out, "distances.csv"));
  }
  timer.lap("write");
  io::write_manifest(cfg.out + "/manifest.json", cfg, timer.laps(), outputs,
                     cfg.warnings);

  std::printf("simulate: %s kind=%s H=%g grid %zux%zu L=%g T=%g seed=%llu\n",
              cfg.out.c_str(), kernels::kind_name(cfg.kind), cfg.H, cfg.nx,
              cfg.nt, ex.grid.L, cfg.T,
              static_cast<unsigned long long>(cfg.seed));
  if (!distances.empty()) {
    std::printf("picard sup-distances:");
    for (double d : distances) std::printf(" %s", fmtg(d).c_str());
    std::printf("\n");
  }
  std::printf("config %s\n", cfg.hash_hex().c_str());
  return 0;
}

int cmd_moments(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  cfg.validate();
  ensure_out_dir(cfg.out);

  MomentsRun mr;
  try {
    mr = run_moments(cfg);
  } catch (const std::exception& e) {
    // Leave a manifest naming the failure so partial runs are identifiable.
    std::vector<std::string> warnings = cfg.warnings;
    warnings.push_back(std::string("run failed: ") + e.what());
    io::write_manifest(cfg.out + "/manifest.json", cfg, {}, {}, warnings);
    throw;
  }

  io::write_moments_csv(cfg.out + "/moments.csv", mr.est.table);
  io::write_fits_csv(cfg.out + "/fits.csv", mr.fits, cfg.hash());
  io::write_text_file(cfg.out + "/report.txt", mr.report.render());
  std::vector<io::OutputRecord> outputs;
  outputs.push_back(io::record_output(cfg.out, "moments.csv"));
  outputs.push_back(io::record_output(cfg.out, "fits.csv"));
  outputs.push_back(io::record_output(cfg.out, "report.txt"));

  if (cfg.plots) {
    for (const auto& dr : mr.report.directions) {
      std::vector<io::PlotSeries> series;
      for (const auto& fit : dr.fits) {
        io::PlotSeries s;
        s.label = std::string("p=") + fmtg(fit.p) +
                  "  exponent=" + fmtg(fit.exponent);
        for (const auto& r : mr.est.table.rows)
          if (r.dir == dr.dir && r.p == fit.p) {
            s.x.push_back(r.h);
            s.y.push_back(r.moment);
          }
        s.guide_slope = fit.p * dr.target;
        s.has_guide = true;
        series.push_back(std::move(s));
      }
      std::string name = std::string("moments_") +
                         reg::direction_name(dr.dir) + ".svg";
      io::write_loglog_svg(cfg.out + "/" + name,
                           std::string(reg::direction_name(dr.dir)) +
                               " increments, target exponent " +
                               fmtg(dr.target),
                           "lag h", "E mean |du|^p", series);
      outputs.push_back(io::record_output(cfg.out, name));
    }
  }

  io::write_manifest(cfg.out + "/manifest.json", cfg, mr.timings_ms, outputs,
                     mr.report.warnings);
  std::fputs(mr.report.render().c_str(), stdout);
  return 0;
}

int cmd_fit(const ExperimentConfig& cfg_in, const std::string& moments_csv) {
  ExperimentConfig cfg = cfg_in;
  cfg.validate();
  ensure_out_dir(cfg.out);

  reg::MomentTable table = io::read_moments_csv(moments_csv);
  std::vector<std::pair<reg::Direction, double>> groups;
  for (const auto& r : table.rows) {
    std::pair<reg::Direction, double> key{r.dir, r.p};
    if (std::find(groups.begin(), groups.end(), key) == groups.end())
      groups.push_back(key);
  }
  std::vector<reg::ExponentFit> fits;
  for (const auto& [dir, p] : groups)
    fits.push_back(fit_from_table(table, dir, p));

  reg::KolmogorovReport report =
      reg::kolmogorov_report(fits, cfg.H, cfg.kind, cfg.exponent_tol);
  if (table.config_hash != 0 && table.config_hash != cfg.hash())
    report.warnings.push_back(
        "moments were produced under a different config (hash mismatch)");

  io::write_fits_csv(cfg.out + "/fits.csv", fits, table.config_hash);
  io::write_text_file(cfg.out + "/report.txt", report.render());
  std::fputs(report.render().c_str(), stdout);
  return 0;
}

int cmd_report(const ExperimentConfig& cfg_in, const std::string& dir) {
  ExperimentConfig cfg = cfg_in;
  cfg.validate();
  std::vector<reg::ExponentFit> fits = io::read_fits_csv(dir + "/fits.csv");
  reg::KolmogorovReport report =
      reg::kolmogorov_report(fits, cfg.H, cfg.kind, cfg.exponent_tol);
  io::write_text_file(dir + "/report.txt", report.render());

  using json = nlohmann::ordered_json;
  json j;
  j["tool"] = "roughspde";
  j["version"] = version_string;
  j["kind"] = kernels::kind_name(cfg.kind);
  j["h"] = cfg.H;
  j["tol"] = cfg.exponent_tol;
  bool all_pass = true;
  json dirs = json::array();
  for (const auto& dr : report.directions) {
    all_pass = all_pass && dr.flag == "PASS";
    json fd = json::array();
    for (const auto& f : dr.fits)
      fd.push_back({{"p", f.p},
                    {"exponent", f.exponent},
                    {"ci95_lo", f.ci95_lo},
                    {"ci95_hi", f.ci95_hi}});
    dirs.push_back({{"direction", reg::direction_name(dr.dir)},
                    {"target", dr.target},
                    {"pooled", dr.pooled},
                    {"best_attainable", dr.best_attainable},
                    {"p_consistent", dr.p_consistent},
                    {"flag", dr.flag},
                    {"fits", fd}});
  }
  j["directions"] = dirs;
  j["pass"] = all_pass;
  io::write_text_file(dir + "/summary.json", j.dump(2) + "\n");
  std::fputs(report.render().c_str(), stdout);
  return 0;
}

int cmd_verify(const ExperimentConfig& cfg_in, const std::string& name) {
  ExperimentConfig cfg = cfg_in;
  cfg.validate();
  ensure_out_dir(cfg.out);
  SuiteResult suite = verify_suite(cfg, name);

  std::string text;
  for (const auto& line : suite.lines) text += line + "\n";
  text += std::string(suite.pass ? "PASS" : "FAIL") + ": verify " +
          suite.name + "\n";
  std::fputs(text.c_str(), stdout);
  io::write_text_file(cfg.out + "/verify_" + suite.name + ".txt", text);
  return suite.pass ? 0 : 3;
}

}  // namespace rs::ops
