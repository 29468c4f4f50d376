// roughspde: simulate rough-noise wave/heat equations and verify the
// Hoelder-regularity scaling of their solutions.
//
// Exit codes: 0 success, 1 configuration/usage error, 2 numerical failure,
// 3 verification failure.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "roughspde/errors.hpp"
#include "roughspde/experiment.hpp"
#include "roughspde/version.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;  // section.key=value, applied in order
};

void add_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("-c,--config", args.config_path, "INI config file")
      ->check(CLI::ExistingFile);
  sub->add_option("-D,--override", args.overrides,
                  "config override section.key=value (repeatable)")
      ->allow_extra_args(false);  // one value per -D, keep positionals free
  // Conveniences for the most-touched keys; applied after -D.
  static const struct { const char* flag; const char* key; const char* help; }
  shortcuts[] = {
      {"--seed", "cli.seed", "master seed"},
      {"--paths", "cli.paths", "Monte Carlo paths"},
      {"--workers", "cli.workers", "worker threads (0 = hardware)"},
      {"--out", "cli.out", "output directory"},
  };
  for (const auto& s : shortcuts) {
    sub->add_option_function<std::string>(
        s.flag,
        [&args, key = std::string(s.key)](const std::string& v) {
          args.overrides.push_back(key + "=" + v);
        },
        s.help);
  }
}

rs::ExperimentConfig make_config(const CommonArgs& args) {
  rs::ExperimentConfig cfg;
  if (!args.config_path.empty()) cfg = rs::load_config_file(args.config_path);
  for (const auto& ov : args.overrides) {
    auto eq = ov.find('=');
    if (eq == std::string::npos)
      throw rs::ConfigError("override must look like section.key=value: " + ov);
    cfg.set(ov.substr(0, eq), ov.substr(eq + 1));
  }
  cfg.validate();
  for (const auto& w : cfg.warnings)
    std::fprintf(stderr, "warning: %s\n", w.c_str());
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rough-noise stochastic wave/heat laboratory"};
  app.set_version_flag("--version", rs::version_string);
  app.require_subcommand(1);

  CommonArgs sim_args, mom_args, fit_args, ver_args, rep_args;
  std::string fit_moments_csv, report_dir, verify_suite = "all";

  CLI::App* sim = app.add_subcommand(
      "simulate", "run one path and write the solution field");
  add_common(sim, sim_args);

  CLI::App* mom = app.add_subcommand(
      "moments", "estimate increment moments and fit scaling exponents");
  add_common(mom, mom_args);

  CLI::App* fit = app.add_subcommand(
      "fit", "re-fit exponents from an existing moments.csv");
  add_common(fit, fit_args);
  fit->add_option("moments_csv", fit_moments_csv,
                  "input CSV (default <out>/moments.csv)");

  CLI::App* ver = app.add_subcommand(
      "verify", "run self-checks (noise|kernels|picard|property_p|all)");
  add_common(ver, ver_args);
  ver->add_option("suite", verify_suite, "which suite to run");

  CLI::App* rep = app.add_subcommand(
      "report", "render report.txt and summary.json from fits.csv");
  add_common(rep, rep_args);
  rep->add_option("dir", report_dir, "directory with fits.csv (default <out>)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (sim->parsed()) return rs::ops::cmd_simulate(make_config(sim_args));
    if (mom->parsed()) return rs::ops::cmd_moments(make_config(mom_args));
    if (fit->parsed()) {
      rs::ExperimentConfig cfg = make_config(fit_args);
      std::string path =
          fit_moments_csv.empty() ? cfg.out + "/moments.csv" : fit_moments_csv;
      return rs::ops::cmd_fit(cfg, path);
    }
    if (ver->parsed())
      return rs::ops::cmd_verify(make_config(ver_args), verify_suite);
    if (rep->parsed()) {
      rs::ExperimentConfig cfg = make_config(rep_args);
      std::string dir = report_dir.empty() ? cfg.out : report_dir;
      return rs::ops::cmd_report(cfg, dir);
    }
  } catch (const rs::NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 2;
  } catch (const rs::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const rs::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
