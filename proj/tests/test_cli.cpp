// End-to-end exercises of the installed command line binary. Each test shells
// out to the real executable (path injected by CMake) and checks exit codes
// and the files left behind, not internal state.
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "roughspde/config.hpp"
#include "roughspde/io.hpp"

namespace fs = std::filesystem;
using namespace rs;

namespace {

std::string cli_path() { return ROUGHSPDE_CLI_PATH; }

struct CliWorld {
  fs::path root;
  fs::path cfg;
  int log_counter = 0;
};

CliWorld& world() {
  static CliWorld w = [] {
    CliWorld out;
    out.root = fs::temp_directory_path() / "roughspde_cli_suite";
    fs::remove_all(out.root);
    fs::create_directories(out.root);
    out.cfg = out.root / "tiny.ini";
    std::ofstream f(out.cfg);
    f << "# small grid so the full pipeline runs in seconds\n"
         "[noise]\n"
         "h = 0.3\n"
         "l = 2\n"
         "nx = 1024\n"
         "t = 0.5\n"
         "nt = 256\n"
         "\n"
         "[regularity]\n"
         "bootstrap = 50\n"
         "\n"
         "[cli]\n"
         "paths = 32\n"
         "seed = 777\n"
         "workers = 1\n";
    return out;
  }();
  return w;
}

// Runs "<binary> <args>" with stdout+stderr captured to a log file in the
// suite workspace. Returns the process exit code, or -1 on abnormal exit.
int run_cli(const std::string& args, std::string* log_text = nullptr) {
  CliWorld& w = world();
  fs::path log = w.root / ("log_" + std::to_string(w.log_counter++) + ".txt");
  std::string cmd =
      "\"" + cli_path() + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  int rc = std::system(cmd.c_str());
  if (log_text) {
    std::ifstream f(log);
    std::ostringstream ss;
    ss << f.rdbuf();
    *log_text = ss.str();
  }
  if (!WIFEXITED(rc)) return -1;
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// File contents minus the first line; used to compare outputs whose banner
// embeds the config hash (worker count is part of the hash).
std::string tail_lines(const fs::path& p) {
  std::string text = slurp(p);
  auto nl = text.find('\n');
  REQUIRE(nl != std::string::npos);
  return text.substr(nl + 1);
}

std::string common_args(const std::string& out_dir) {
  CliWorld& w = world();
  return "-c \"" + w.cfg.string() + "\" --out \"" +
         (w.root / out_dir).string() + "\"";
}

// moments is the expensive subcommand; run it once and reuse the outputs.
int moments_rc() {
  static int rc = run_cli("moments " + common_args("o_mom"));
  return rc;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("version and usage errors") {
  std::string log;
  CHECK(run_cli("--version", &log) == 0);
  CHECK(log.find("1.0.0") != std::string::npos);

  // no subcommand
  CHECK(run_cli("", &log) == 1);

  // config file that does not exist fails at argument parsing
  CHECK(run_cli("moments -c /nonexistent/nowhere.ini", &log) == 1);

  // invalid override value caught by config validation
  CHECK(run_cli("moments " + common_args("o_badh") + " -D noise.h=0.6",
                &log) == 1);
  CHECK(log.find("error:") != std::string::npos);
}

TEST_CASE("simulate writes field files and manifest") {
  int rc = run_cli("simulate " + common_args("o_sim"));
  REQUIRE(rc == 0);
  fs::path dir = world().root / "o_sim";

  solver::SolutionField field =
      io::read_solution_field((dir / "field.rsuf").string());
  CHECK(field.nt == 256);
  CHECK(field.nx == 1024);
  CHECK(field.H == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(field.seed == 777);
  const double* last = field.row(field.nt);
  for (std::size_t j = 0; j < field.nx; ++j) REQUIRE(std::isfinite(last[j]));

  solver::SolutionField homog =
      io::read_solution_field((dir / "homogeneous.rsuf").string());
  CHECK(homog.nx == 1024);

  nlohmann::json j = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(j["tool"] == "roughspde");
  CHECK(j["seed"] == 777);
  CHECK(j["outputs"].size() >= 2);
}

TEST_CASE("simulate with picard scheme records contraction distances") {
  int rc = run_cli("simulate " + common_args("o_pic") +
                   " -D solver.scheme=picard -D solver.n_iters=2");
  REQUIRE(rc == 0);
  std::string text = slurp(world().root / "o_pic" / "distances.csv");
  CHECK(text.find("iteration,distance") != std::string::npos);
  CHECK(text.find("\n1,") != std::string::npos);
  CHECK(text.find("\n2,") != std::string::npos);
}

TEST_CASE("moments produces tables, fits, and a scaling report") {
  REQUIRE(moments_rc() == 0);
  fs::path dir = world().root / "o_mom";
  CHECK(fs::exists(dir / "moments.csv"));
  CHECK(fs::exists(dir / "manifest.json"));

  std::vector<reg::ExponentFit> fits =
      io::read_fits_csv((dir / "fits.csv").string());
  REQUIRE(fits.size() == 4);
  for (const auto& f : fits) {
    CAPTURE(reg::direction_name(f.dir));
    CAPTURE(f.p);
    // 32 paths is noisy; only sanity-band the estimates here
    CHECK(f.exponent > 0.03);
    CHECK(f.exponent < 0.47);
    CHECK(f.n_points >= 4);
    CHECK(f.ci95_lo < f.ci95_hi);
  }

  std::string report = slurp(dir / "report.txt");
  CHECK(report.find("increment scaling report") != std::string::npos);
  CHECK(report.find("space") != std::string::npos);
  CHECK(report.find("time") != std::string::npos);
}

TEST_CASE("fit recovers the same point estimates from a moments table") {
  REQUIRE(moments_rc() == 0);
  fs::path mom_csv = world().root / "o_mom" / "moments.csv";
  int rc = run_cli("fit " + common_args("o_fit") + " \"" + mom_csv.string() +
                   "\"");
  REQUIRE(rc == 0);

  std::vector<reg::ExponentFit> from_mom =
      io::read_fits_csv((world().root / "o_mom" / "fits.csv").string());
  std::vector<reg::ExponentFit> from_fit =
      io::read_fits_csv((world().root / "o_fit" / "fits.csv").string());
  REQUIRE(from_fit.size() == from_mom.size());
  for (std::size_t i = 0; i < from_fit.size(); ++i) {
    CHECK(from_fit[i].dir == from_mom[i].dir);
    CHECK(from_fit[i].p == doctest::Approx(from_mom[i].p));
    // bootstrap may widen the interval but never moves the point estimate
    CHECK(from_fit[i].exponent ==
          doctest::Approx(from_mom[i].exponent).epsilon(1e-9));
  }
}

TEST_CASE("fit warns when the table came from a different config") {
  REQUIRE(moments_rc() == 0);
  fs::path mom_csv = world().root / "o_mom" / "moments.csv";
  std::string log;
  int rc = run_cli("fit " + common_args("o_fit2") +
                       " -D regularity.bootstrap=51 \"" + mom_csv.string() +
                       "\"",
                   &log);
  REQUIRE(rc == 0);
  std::string report = slurp(world().root / "o_fit2" / "report.txt");
  CHECK(report.find("hash mismatch") != std::string::npos);
}

TEST_CASE("report renders a summary json from fits") {
  REQUIRE(moments_rc() == 0);
  fs::path dir = world().root / "o_mom";
  int rc = run_cli("report " + common_args("o_mom") + " \"" + dir.string() +
                   "\"");
  REQUIRE(rc == 0);

  nlohmann::json j = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(j["tool"] == "roughspde");
  CHECK(j["kind"] == "heat");
  CHECK(j["pass"].is_boolean());
  REQUIRE(j["directions"].size() == 2);
  CHECK(j["directions"][0]["fits"].size() == 2);
}

TEST_CASE("verify kernels passes on the tiny config") {
  int rc = run_cli("verify " + common_args("o_ver") + " kernels");
  CHECK(rc == 0);
  std::string text = slurp(world().root / "o_ver" / "verify_kernels.txt");
  CHECK(text.find("PASS") != std::string::npos);
}

TEST_CASE("numerical blow-up maps to exit code 2") {
  int rc = run_cli("simulate " + common_args("o_blow") +
                   " -D solver.a=1e9");
  CHECK(rc == 2);
}

TEST_CASE("worker count does not change the estimates") {
  REQUIRE(moments_rc() == 0);
  int rc = run_cli("moments " + common_args("o_mom2") + " --workers 2");
  REQUIRE(rc == 0);
  // banner line embeds the config hash, which covers the worker count
  CHECK(tail_lines(world().root / "o_mom" / "moments.csv") ==
        tail_lines(world().root / "o_mom2" / "moments.csv"));
  CHECK(tail_lines(world().root / "o_mom" / "fits.csv") ==
        tail_lines(world().root / "o_mom2" / "fits.csv"));
}

}  // TEST_SUITE
