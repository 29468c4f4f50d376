#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "roughspde/config.hpp"
#include "roughspde/kernels.hpp"
#include "roughspde/noise.hpp"
#include "roughspde/regularity.hpp"
#include "roughspde/solver.hpp"

// Orchestration shared by the CLI subcommands and the integration suites:
// builds the read-only per-run machinery once, fans paths out over workers,
// and writes the artifact set (CSV, report, manifest, optional plots).
namespace rs::ops {

// Everything paths share read-only. Engines hold references into this, so an
// Experiment must stay alive and in place while they run.
struct Experiment {
  ExperimentConfig cfg;
  SpaceTimeGrid grid;
  kernels::InitialData init;
  kernels::HomogeneousField w;
  noise::SpatialIncrementSampler sampler;
  solver::StepMultipliers mult;
  solver::SolveSpec spec;
};

// Validates the config (keeping its warnings) and precomputes the pieces.
Experiment build_experiment(ExperimentConfig cfg);

// One PathEngine per worker; the runner routes (path, worker) to them.
class EnginePool {
 public:
  EnginePool(const Experiment& ex, unsigned workers);
  solver::PathEngine& engine(unsigned worker) { return *engines_.at(worker); }
  reg::PathFieldRunner runner();

 private:
  std::vector<std::unique_ptr<solver::PathEngine>> engines_;
};

unsigned resolve_worker_count(const ExperimentConfig& cfg);

struct MomentsRun {
  reg::MomentEstimate est;
  std::vector<reg::ExponentFit> fits;
  reg::KolmogorovReport report;
  std::vector<std::pair<std::string, double>> timings_ms;
};

// The moments pipeline without file output: estimate, fit (bootstrap when
// cfg.bootstrap > 0), and judge against the expected exponents.
MomentsRun run_moments(const ExperimentConfig& cfg);

// Analytic-interval fit of one (direction, p) ladder taken from a table.
reg::ExponentFit fit_from_table(const reg::MomentTable& table,
                                reg::Direction dir, double p);

// Space-increment moment surface D(s, r) on time slices s of the full run,
// fed to the kernel-weighted integrability functional, with a per-path
// spread of the functional for a rough error bar.
struct PropertyMeasurement {
  std::vector<double> s_values;        // slice times, s_values.front() == 0
  std::vector<std::vector<double>> D;  // ensemble mean, [slice][lag-1]
  std::vector<double> per_path_nu;
  reg::PropertyPResult result;
  double nu_stderr = 0.0;
};

PropertyMeasurement measure_property_p(const Experiment& ex, double p,
                                       std::size_t n_paths, unsigned workers,
                                       const std::vector<double>& t_evals);

// Subcommand bodies; each returns a process exit code (0 ok, 3 for a failed
// verification) and throws ConfigError / IoError / NumericalError otherwise.
int cmd_simulate(const ExperimentConfig& cfg);
int cmd_moments(const ExperimentConfig& cfg);
int cmd_fit(const ExperimentConfig& cfg, const std::string& moments_csv);
int cmd_report(const ExperimentConfig& cfg, const std::string& dir);

struct SuiteResult {
  std::string name;
  bool pass = false;
  std::vector<std::string> lines;  // "[PASS] ...", "[FAIL] ...", "[INFO] ..."
};

// name: noise | kernels | picard | property_p | all
SuiteResult verify_suite(const ExperimentConfig& cfg, const std::string& name);
int cmd_verify(const ExperimentConfig& cfg, const std::string& name);

}  // namespace rs::ops
