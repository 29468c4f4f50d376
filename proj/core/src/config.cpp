#include "roughspde/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "roughspde/errors.hpp"
#include "roughspde/rng.hpp"

namespace rs {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": not a number: '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  // stoull silently wraps negative input, so reject the sign up front
  if (v.empty() || v[0] == '-' || v[0] == '+')
    throw ConfigError(key + ": not a nonnegative integer: '" + v + "'");
  try {
    std::size_t pos = 0;
    unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": not a nonnegative integer: '" + v + "'");
  }
}

int parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": not an integer: '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key + ": not a boolean: '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(v);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string fmt(std::size_t x) { return std::to_string(x); }
std::string fmt(bool b) { return b ? "true" : "false"; }

}  // namespace

double ExperimentConfig::effective_L() const {
  if (L > 0.0) return L;
  return L_obs + T + 8.0 * std::sqrt(T);
}

SpaceTimeGrid ExperimentConfig::grid() const {
  return {effective_L(), nx, T, nt, L_obs};
}

kernels::InitialDataParams ExperimentConfig::initial_data_params() const {
  kernels::InitialDataParams p;
  p.family = init;
  p.holder = init_holder > 0.0 ? init_holder : H;
  p.terms = init_terms;
  p.value = init_value;
  p.v0_family = v0;
  p.v0_value = v0_value;
  return p;
}

solver::SigmaAffine ExperimentConfig::sigma() const { return {sigma_a, sigma_b}; }

solver::SolveSpec ExperimentConfig::solve_spec() const {
  solver::SolveSpec s;
  s.grid = grid();
  s.H = H;
  s.kind = kind;
  s.sigma = sigma();
  s.noise_factor = noise_factor;
  s.seed = seed;
  return s;
}

namespace {
// Lag ladder anchored at 8 grid cells and doubling up to h0. Anchoring at the
// grid keeps every rung an exact grid multiple for any L, dyadic or not.
std::vector<double> anchored_lags(double step, double h_max) {
  std::vector<double> out;
  for (double h = 8.0 * step; h <= h_max * (1.0 + 1e-9); h *= 2.0)
    out.push_back(h);
  return out;
}
}  // namespace

std::vector<double> ExperimentConfig::space_lags() const {
  return anchored_lags(grid().dx(), h0);
}

std::vector<double> ExperimentConfig::time_lags() const {
  return anchored_lags(grid().dt(), h0);
}

reg::EstimatePlan ExperimentConfig::estimate_plan() const {
  if (dir_space && space_lags().size() < 4)
    throw ConfigError(
        "space lag ladder has fewer than 4 rungs: raise noise.nx or "
        "regularity.h0");
  if (dir_time && time_lags().size() < 4)
    throw ConfigError(
        "time lag ladder has fewer than 4 rungs: raise noise.nt or "
        "regularity.h0");
  return reg::EstimatePlan::make(grid(), ps,
                                 dir_space ? space_lags() : std::vector<double>{},
                                 dir_time ? time_lags() : std::vector<double>{},
                                 ramp_frac, space_t_min_frac);
}

void ExperimentConfig::validate() {
  warnings.clear();

  if (allow_full_range) {
    if (!(H > 0.0 && H < 0.5))
      throw ConfigError("noise.h: must lie in (0, 1/2)");
    if (!(H > 0.25))
      warnings.push_back("H outside (1/4, 1/2): exponent targets uncertified");
  } else {
    if (!(H > 0.25 && H < 0.5))
      throw ConfigError(
          "noise.h: must lie in (1/4, 1/2); set noise.allow_full_range=true "
          "to explore (0, 1/2) without certified targets");
  }

  grid().validate();

  if (kind == kernels::Kind::Wave) {
    SpaceTimeGrid g = grid();
    if (g.dt() > g.dx() * (1.0 + 1e-9))
      throw ConfigError("wave runs need dt <= dx (raise noise.nt or shrink noise.l)");
    if (g.L < g.L_obs + g.T)
      warnings.push_back("wave: l < l_obs + t, periodic images reach the window");
  } else {
    SpaceTimeGrid g = grid();
    if (g.L < g.L_obs + 4.0 * std::sqrt(g.T))
      warnings.push_back("heat: l < l_obs + 4 sqrt(t), boundary leakage may be visible");
  }

  if (init_holder > 0.0 && !(init_holder < 1.0))
    throw ConfigError("kernels.init_holder: must lie in (0, 1) or be -1 for auto");
  if (init_terms < 1 || init_terms > 48)
    throw ConfigError("kernels.init_terms: must lie in [1, 48]");
  if (!(std::isfinite(sigma_a) && std::isfinite(sigma_b)))
    throw ConfigError("solver.a/solver.b: must be finite");
  if (n_iters < 1) throw ConfigError("solver.n_iters: must be >= 1");
  if (!(contraction_threshold > 0.0))
    throw ConfigError("solver.contraction_threshold: must be positive");

  if (ps.empty()) throw ConfigError("regularity.p: need at least one order");
  for (double p : ps)
    if (!(p > 0.0)) throw ConfigError("regularity.p: orders must be positive");
  for (double p : ps)
    if (p > 8.0) {
      warnings.push_back("regularity.p > 8: estimates are fragile at high orders");
      break;
    }
  if (!(h0 > 0.0)) throw ConfigError("regularity.h0: must be positive");
  if (!(ramp_frac >= 0.0 && ramp_frac < 1.0))
    throw ConfigError("regularity.ramp_frac: must lie in [0, 1)");
  if (!(space_t_min_frac >= 0.0 && space_t_min_frac <= 1.0))
    throw ConfigError("regularity.space_t_min_frac: must lie in [0, 1]");
  if (!(exponent_tol > 0.0))
    throw ConfigError("regularity.exponent_tol: must be positive");
  if (out.empty()) throw ConfigError("cli.out: must not be empty");
}

void ExperimentConfig::set(const std::string& dotted_key, const std::string& raw) {
  const std::string value = trim(raw);
  const std::string& k = dotted_key;

  if (k == "noise.h") H = parse_double(k, value);
  else if (k == "noise.allow_full_range") allow_full_range = parse_bool(k, value);
  else if (k == "noise.l") L = parse_double(k, value);
  else if (k == "noise.nx") nx = parse_u64(k, value);
  else if (k == "noise.t") T = parse_double(k, value);
  else if (k == "noise.nt") nt = parse_u64(k, value);
  else if (k == "noise.l_obs") L_obs = parse_double(k, value);
  else if (k == "kernels.kind") kind = kernels::kind_from_name(value);
  else if (k == "kernels.init") init = kernels::data_family_from_name(value);
  else if (k == "kernels.init_holder") init_holder = parse_double(k, value);
  else if (k == "kernels.init_terms") init_terms = parse_int(k, value);
  else if (k == "kernels.init_value") init_value = parse_double(k, value);
  else if (k == "kernels.v0") v0 = kernels::data_family_from_name(value);
  else if (k == "kernels.v0_value") v0_value = parse_double(k, value);
  else if (k == "solver.a") sigma_a = parse_double(k, value);
  else if (k == "solver.b") sigma_b = parse_double(k, value);
  else if (k == "solver.scheme") scheme = solver::scheme_from_name(value);
  else if (k == "solver.n_iters") n_iters = parse_int(k, value);
  else if (k == "solver.noise_factor") noise_factor = solver::noise_factor_from_name(value);
  else if (k == "solver.contraction_threshold") contraction_threshold = parse_double(k, value);
  else if (k == "regularity.p") {
    ps.clear();
    for (const auto& item : split_list(value)) ps.push_back(parse_double(k, item));
  } else if (k == "regularity.h0") h0 = parse_double(k, value);
  else if (k == "regularity.directions") {
    dir_space = dir_time = false;
    for (const auto& item : split_list(value)) {
      switch (reg::direction_from_name(item)) {
        case reg::Direction::Space: dir_space = true; break;
        case reg::Direction::Time: dir_time = true; break;
      }
    }
  } else if (k == "regularity.ramp_frac") ramp_frac = parse_double(k, value);
  else if (k == "regularity.space_t_min_frac") space_t_min_frac = parse_double(k, value);
  else if (k == "regularity.bootstrap") bootstrap = parse_u64(k, value);
  else if (k == "regularity.exponent_tol") exponent_tol = parse_double(k, value);
  else if (k == "cli.paths") paths = parse_u64(k, value);
  else if (k == "cli.seed") seed = parse_u64(k, value);
  else if (k == "cli.workers") workers = static_cast<unsigned>(parse_u64(k, value));
  else if (k == "cli.out") out = value;
  else if (k == "cli.plots") plots = parse_bool(k, value);
  else throw ConfigError("unknown config key: " + k);
}

std::string ExperimentConfig::serialize() const {
  std::string s;
  s += "[noise]\n";
  s += "h = " + fmt(H) + "\n";
  s += "allow_full_range = " + fmt(allow_full_range) + "\n";
  s += "l = " + fmt(L) + "\n";
  s += "nx = " + fmt(nx) + "\n";
  s += "t = " + fmt(T) + "\n";
  s += "nt = " + fmt(nt) + "\n";
  s += "l_obs = " + fmt(L_obs) + "\n";
  s += "[kernels]\n";
  s += std::string("kind = ") + kernels::kind_name(kind) + "\n";
  s += std::string("init = ") + kernels::data_family_name(init) + "\n";
  s += "init_holder = " + fmt(init_holder) + "\n";
  s += "init_terms = " + std::to_string(init_terms) + "\n";
  s += "init_value = " + fmt(init_value) + "\n";
  s += std::string("v0 = ") + kernels::data_family_name(v0) + "\n";
  s += "v0_value = " + fmt(v0_value) + "\n";
  s += "[solver]\n";
  s += "a = " + fmt(sigma_a) + "\n";
  s += "b = " + fmt(sigma_b) + "\n";
  s += std::string("scheme = ") + solver::scheme_name(scheme) + "\n";
  s += "n_iters = " + std::to_string(n_iters) + "\n";
  s += std::string("noise_factor = ") + solver::noise_factor_name(noise_factor) + "\n";
  s += "contraction_threshold = " + fmt(contraction_threshold) + "\n";
  s += "[regularity]\n";
  s += "p = ";
  for (std::size_t i = 0; i < ps.size(); ++i)
    s += (i ? "," : "") + fmt(ps[i]);
  s += "\n";
  s += "h0 = " + fmt(h0) + "\n";
  s += "directions = ";
  if (dir_space) s += "space";
  if (dir_time) s += dir_space ? ",time" : "time";
  s += "\n";
  s += "ramp_frac = " + fmt(ramp_frac) + "\n";
  s += "space_t_min_frac = " + fmt(space_t_min_frac) + "\n";
  s += "bootstrap = " + fmt(bootstrap) + "\n";
  s += "exponent_tol = " + fmt(exponent_tol) + "\n";
  s += "[cli]\n";
  s += "paths = " + fmt(paths) + "\n";
  s += "seed = " + std::to_string(seed) + "\n";
  s += "workers = " + std::to_string(workers) + "\n";
  s += "out = " + out + "\n";
  s += "plots = " + fmt(plots) + "\n";
  return s;
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a64(serialize()); }

std::string ExperimentConfig::hash_hex() const {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash()));
  return buf;
}

ExperimentConfig parse_config(const std::string& ini_text) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::string section;
  std::stringstream ss(ini_text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) + ": bad section header");
      section = trim(t.substr(1, t.size() - 2));
      static const std::set<std::string> known = {"noise", "kernels", "solver",
                                                  "regularity", "cli"};
      if (!known.count(section))
        throw ConfigError("unknown config section: [" + section + "]");
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": key outside a section");
    std::string key = section + "." + trim(t.substr(0, eq));
    if (!seen.insert(key).second)
      throw ConfigError("duplicate config key: " + key);
    cfg.set(key, t.substr(eq + 1));
  }
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace rs
