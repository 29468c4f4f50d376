#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "roughspde/grid.hpp"
#include "roughspde/kernels.hpp"
#include "roughspde/regularity.hpp"
#include "roughspde/solver.hpp"

namespace rs {

// One experiment, INI-serializable. Sections mirror the library layout:
// [noise] [kernels] [solver] [regularity] [cli]. Unknown sections or keys are
// rejected rather than ignored.
struct ExperimentConfig {
  // [noise]
  double H = 0.3;
  bool allow_full_range = false;  // relax H to (0, 1/2) with a warning
  double L = -1.0;                // -1: auto, L_obs + T + 8 sqrt(T)
  std::size_t nx = 8192;
  double T = 1.0;
  std::size_t nt = 1024;
  double L_obs = 0.5;

  // [kernels]
  kernels::Kind kind = kernels::Kind::Heat;
  kernels::DataFamily init = kernels::DataFamily::Weierstrass;
  double init_holder = -1.0;  // -1: follow H
  int init_terms = 30;
  double init_value = 0.0;
  kernels::DataFamily v0 = kernels::DataFamily::Zero;
  double v0_value = 0.0;

  // [solver]
  double sigma_a = 0.5;
  double sigma_b = 1.0;
  solver::Scheme scheme = solver::Scheme::MildStep;
  int n_iters = 3;
  solver::NoiseFactor noise_factor = solver::NoiseFactor::VarianceExact;
  double contraction_threshold = 0.5;

  // [regularity]
  std::vector<double> ps = {2.0, 4.0};
  double h0 = 0.25;
  bool dir_space = true;
  bool dir_time = true;
  double ramp_frac = 0.125;
  double space_t_min_frac = 0.5;
  std::size_t bootstrap = 400;
  double exponent_tol = 0.05;

  // [cli]
  std::size_t paths = 256;
  std::uint64_t seed = 12345;
  unsigned workers = 0;  // 0: auto
  std::string out = "out";
  bool plots = false;

  std::vector<std::string> warnings;  // filled by validate()

  // Effective values.
  double effective_L() const;
  SpaceTimeGrid grid() const;
  kernels::InitialDataParams initial_data_params() const;
  solver::SigmaAffine sigma() const;
  solver::SolveSpec solve_spec() const;
  std::vector<double> space_lags() const;  // 8 dx doubling up to h0
  std::vector<double> time_lags() const;   // 8 dt doubling up to h0
  reg::EstimatePlan estimate_plan() const;

  // Throws ConfigError on invalid combinations; appends warnings otherwise.
  void validate();

  // Canonical INI text (fixed key order, %.17g numbers); equal configs have
  // equal text, and hash() is the FNV-1a of exactly this text.
  std::string serialize() const;
  std::uint64_t hash() const;
  std::string hash_hex() const;

  // Applies "section.key=value".
  void set(const std::string& dotted_key, const std::string& value);
};

ExperimentConfig parse_config(const std::string& ini_text);
ExperimentConfig load_config_file(const std::string& path);

}  // namespace rs
