#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "roughspde/config.hpp"
#include "roughspde/errors.hpp"
#include "roughspde/io.hpp"
#include "roughspde/rng.hpp"
#include "roughspde/version.hpp"

using namespace rs;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  auto d = fs::temp_directory_path() / ("roughspde_test_" + tag);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

void corrupt_byte(const fs::path& p, std::size_t offset, char value) {
  std::fstream f(p, std::ios::binary | std::ios::in | std::ios::out);
  f.seekp(static_cast<std::streamoff>(offset));
  f.put(value);
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("hash primitives, pinned values") {
  CHECK(mix64(0) == 0xE220A8397B1DCDAFULL);
  CHECK(fnv1a64("roughspde") == 0xf1583929d590e2d2ULL);
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);

  // streaming in two chunks must match one pass
  const char* s = "roughspde";
  CHECK(fnv1a64(s + 5, 4, fnv1a64(s, 5)) == fnv1a64("roughspde"));

  std::set<std::uint64_t> seen;
  for (std::uint64_t p = 0; p < 40; ++p)
    for (std::uint64_t r = 0; r < 25; ++r)
      seen.insert(substream_seed(12345, p, r));
  CHECK(seen.size() == 1000);
}

TEST_CASE("normal stream is reproducible") {
  NormalStream a(777), b(777);
  for (int i = 0; i < 5; ++i) CHECK(a() == b());
  a.reseed(777);
  b.reseed(777);
  CHECK(a.raw() == b.raw());
  CHECK(a() == b());
}

TEST_CASE("noise slab round-trips through the binary format") {
  auto dir = fresh_dir("slab");
  SpaceTimeGrid grid{1.0, 64, 0.5, 8, 0.5};
  auto slab = noise::sample_noise_slab(grid, 0.3, 9, 3);
  auto file = (dir / "x.rsns").string();
  io::write_noise_slab(file, slab);

  auto back = io::read_noise_slab(file);
  CHECK(back.nt == slab.nt);
  CHECK(back.nx == slab.nx);
  CHECK(back.H == slab.H);
  CHECK(back.dt == slab.dt);
  CHECK(back.dx == slab.dx);
  CHECK(back.seed == 9);
  CHECK(back.path == 3);
  CHECK(back.data == slab.data);
}

TEST_CASE("solution field round-trips and rejects damage") {
  auto dir = fresh_dir("field");
  solver::SolutionField f;
  f.nt = 2;
  f.nx = 4;
  f.H = 0.3;
  f.dt = 0.5;
  f.dx = 0.25;
  f.seed = 77;
  for (int i = 0; i < 12; ++i) f.data.push_back(0.5 * i - 3.0);
  auto file = (dir / "u.rsuf").string();
  io::write_solution_field(file, f);

  auto back = io::read_solution_field(file);
  CHECK(back.nt == 2);
  CHECK(back.nx == 4);
  CHECK(back.seed == 77);
  CHECK(back.data == f.data);

  // wrong magic
  io::write_solution_field(file, f);
  corrupt_byte(file, 0, 'X');
  CHECK_THROWS_AS(io::read_solution_field(file), IoError);
  // wrong format version
  io::write_solution_field(file, f);
  corrupt_byte(file, 4, 2);
  CHECK_THROWS_AS(io::read_solution_field(file), IoError);
  // truncated payload
  io::write_solution_field(file, f);
  fs::resize_file(file, 48 + 5 * sizeof(double));
  CHECK_THROWS_AS(io::read_solution_field(file), IoError);
  // slab reader refuses a field file
  io::write_solution_field(file, f);
  CHECK_THROWS_AS(io::read_noise_slab(file), IoError);
  CHECK_THROWS_AS(io::read_solution_field((dir / "absent.rsuf").string()),
                  IoError);
}

TEST_CASE("csv banner and moments round-trip") {
  CHECK(io::csv_banner(0x123) ==
        "# roughspde " + std::string(version_string) +
            " config 0000000000000123");

  auto dir = fresh_dir("csv");
  reg::MomentTable t;
  t.config_hash = 0xdeadbeefULL;
  for (int i = 0; i < 4; ++i) {
    reg::MomentRow r;
    r.dir = i % 2 ? reg::Direction::Time : reg::Direction::Space;
    r.p = 2.0 + 2.0 * (i / 2);
    r.h = 0.01 * (1 << i);
    r.moment = 0.37e-3 * (i + 1);
    r.stderr_ = 1.1e-5 * (i + 1);
    r.n_paths = 256;
    t.rows.push_back(r);
  }
  auto file = (dir / "moments.csv").string();
  io::write_moments_csv(file, t);

  auto text = io::read_text_file(file);
  CHECK(text.find("# roughspde") == 0);
  CHECK(text.find("00000000deadbeef") != std::string::npos);
  CHECK(text.find("direction,p,h,moment,stderr,n_paths") != std::string::npos);

  auto back = io::read_moments_csv(file);
  CHECK(back.config_hash == 0xdeadbeefULL);
  REQUIRE(back.rows.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(back.rows[i].dir == t.rows[i].dir);
    CHECK(back.rows[i].p == doctest::Approx(t.rows[i].p));
    CHECK(back.rows[i].h == doctest::Approx(t.rows[i].h).epsilon(1e-11));
    CHECK(back.rows[i].moment ==
          doctest::Approx(t.rows[i].moment).epsilon(1e-11));
    CHECK(back.rows[i].stderr_ ==
          doctest::Approx(t.rows[i].stderr_).epsilon(1e-11));
    CHECK(back.rows[i].n_paths == 256);
  }
}

TEST_CASE("fits csv round-trip") {
  auto dir = fresh_dir("fits");
  std::vector<reg::ExponentFit> fits;
  for (int i = 0; i < 2; ++i) {
    reg::ExponentFit f;
    f.dir = i ? reg::Direction::Time : reg::Direction::Space;
    f.p = 2.0 + 2.0 * i;
    f.exponent = 0.3 - 0.01 * i;
    f.ci95_lo = f.exponent - 0.02;
    f.ci95_hi = f.exponent + 0.02;
    f.slope = f.exponent * f.p;
    f.slope_se = 0.004;
    f.r2 = 0.998;
    f.n_points = 4 + i;
    fits.push_back(f);
  }
  auto file = (dir / "fits.csv").string();
  io::write_fits_csv(file, fits, 0x42);

  auto back = io::read_fits_csv(file);
  REQUIRE(back.size() == 2);
  CHECK(back[0].dir == reg::Direction::Space);
  CHECK(back[1].dir == reg::Direction::Time);
  CHECK(back[1].p == doctest::Approx(4.0));
  CHECK(back[0].exponent == doctest::Approx(0.3).epsilon(1e-11));
  CHECK(back[1].ci95_hi == doctest::Approx(0.31).epsilon(1e-9));
  CHECK(back[0].n_points == 4);
  CHECK(back[0].method == "csv");

  CHECK_THROWS_AS(io::read_fits_csv((dir / "absent.csv").string()), IoError);
}

TEST_CASE("distances csv") {
  auto dir = fresh_dir("dist");
  auto file = (dir / "distances.csv").string();
  io::write_distances_csv(file, {0.5, 0.25, 0.125}, 0x7);
  auto text = io::read_text_file(file);
  CHECK(text.find("iteration,distance") != std::string::npos);
  CHECK(text.find("1,0.5") != std::string::npos);
  CHECK(text.find("3,0.125") != std::string::npos);
}

TEST_CASE("file hashing matches the in-memory hash") {
  auto dir = fresh_dir("hash");
  auto file = (dir / "blob.txt").string();
  io::write_text_file(file, "roughspde");
  std::uint64_t size = 0;
  CHECK(io::file_fnv1a64(file, &size) == 0xf1583929d590e2d2ULL);
  CHECK(size == 9);

  auto rec = io::record_output(dir.string(), "blob.txt");
  CHECK(rec.file == "blob.txt");
  CHECK(rec.bytes == 9);
  CHECK(rec.hash == 0xf1583929d590e2d2ULL);
}

TEST_CASE("manifest carries the full config and output records") {
  auto dir = fresh_dir("manifest");
  ExperimentConfig cfg;
  cfg.validate();
  auto blob = (dir / "blob.txt").string();
  io::write_text_file(blob, "roughspde");
  auto rec = io::record_output(dir.string(), "blob.txt");

  auto file = (dir / "manifest.json").string();
  io::write_manifest(file, cfg, {{"setup", 1.5}, {"paths", 20.0}}, {rec},
                     {"w1"});

  auto j = nlohmann::json::parse(io::read_text_file(file));
  CHECK(j["tool"] == "roughspde");
  CHECK(j["version"] == version_string);
  CHECK(j["config_hash"] == cfg.hash_hex());
  CHECK(j["config"]["noise"]["h"] == "0.29999999999999999");
  CHECK(j["config"]["solver"]["scheme"] == "mild");
  CHECK(j["config"]["regularity"]["p"] == "2,4");
  CHECK(j["seed"] == 12345);
  CHECK(j["paths"] == 256);
  CHECK(j["timings_ms"]["setup"] == 1.5);
  REQUIRE(j["outputs"].size() == 1);
  CHECK(j["outputs"][0]["file"] == "blob.txt");
  CHECK(j["outputs"][0]["bytes"] == 9);
  CHECK(j["outputs"][0]["fnv1a64"] == "f1583929d590e2d2");
  CHECK(j["warnings"][0] == "w1");
}

TEST_CASE("log-log plot writer emits well-formed svg") {
  auto dir = fresh_dir("svg");
  io::PlotSeries s;
  s.label = "p=2";
  s.x = {0.01, 0.02, 0.04, 0.08};
  s.y = {0.1, 0.15, 0.23, 0.35};
  s.guide_slope = 0.6;
  s.has_guide = true;
  auto file = (dir / "m.svg").string();
  io::write_loglog_svg(file, "increment moments", "h", "E|du|^p", {s});
  auto text = io::read_text_file(file);
  CHECK(text.find("<svg") != std::string::npos);
  CHECK(text.find("</svg>") != std::string::npos);
  CHECK(text.find("polyline") != std::string::npos);
  CHECK(text.find("p=2") != std::string::npos);
  CHECK(text.find("increment moments") != std::string::npos);
}

TEST_CASE("config defaults validate cleanly and round-trip") {
  ExperimentConfig cfg;
  cfg.validate();
  CHECK(cfg.warnings.empty());
  CHECK(cfg.effective_L() == doctest::Approx(9.5));
  CHECK(cfg.grid().nx == 8192);

  auto text = cfg.serialize();
  CHECK(text.find("[noise]") != std::string::npos);
  CHECK(text.find("kind = heat") != std::string::npos);
  CHECK(text.find("noise_factor = variance_exact") != std::string::npos);
  CHECK(text.find("directions = space,time") != std::string::npos);

  auto back = parse_config(text);
  CHECK(back.serialize() == text);
  CHECK(back.hash() == cfg.hash());

  // the ladder defaults resolve to at least four grid-multiple rungs
  auto plan = cfg.estimate_plan();
  CHECK(plan.space_lags.size() >= 4);
  CHECK(plan.time_lags.size() >= 4);
  CHECK(plan.space_lags[0] == 8);
  CHECK(plan.time_lags[0] == 8);
}

TEST_CASE("config set and hash sensitivity") {
  ExperimentConfig a, b;
  CHECK(a.hash() == b.hash());
  b.set("noise.h", "0.35");
  CHECK(b.H == doctest::Approx(0.35));
  CHECK(a.hash() != b.hash());

  b.set("solver.scheme", "picard");
  CHECK(b.scheme == solver::Scheme::Picard);
  b.set("regularity.directions", "time");
  CHECK_FALSE(b.dir_space);
  CHECK(b.dir_time);
  b.set("regularity.p", "2,4,6");
  CHECK(b.ps.size() == 3);
  b.set("cli.plots", "true");
  CHECK(b.plots);
  b.set("kernels.v0", "constant");
  CHECK(b.v0 == kernels::DataFamily::Constant);

  CHECK_THROWS_AS(a.set("noise.hh", "0.3"), ConfigError);
  CHECK_THROWS_AS(a.set("noise.h", "abc"), ConfigError);
  CHECK_THROWS_AS(a.set("noise.nx", "-5"), ConfigError);
  CHECK_THROWS_AS(a.set("cli.plots", "maybe"), ConfigError);
}

TEST_CASE("config parser enforces shape") {
  CHECK_NOTHROW(parse_config("# comment\n[noise]\nh = 0.3\n\n[cli]\nseed = 1\n"));
  CHECK_THROWS_AS(parse_config("[weird]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[noise]\nh = 0.3\nh = 0.4\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("h = 0.3\n"), ConfigError);       // no section
  CHECK_THROWS_AS(parse_config("[noise]\nh 0.3\n"), ConfigError);  // no '='
  CHECK_THROWS_AS(parse_config("[noise]\nh = 0.3 # inline\n"), ConfigError);
}

TEST_CASE("config validation bands and warnings") {
  ExperimentConfig cfg;
  cfg.H = 0.2;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.allow_full_range = true;
  cfg.validate();
  REQUIRE_FALSE(cfg.warnings.empty());
  CHECK(cfg.warnings[0].find("uncertified") != std::string::npos);

  cfg.H = 0.6;  // past the hard boundary even with the relaxed band
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  ExperimentConfig wave;
  wave.kind = kernels::Kind::Wave;
  wave.L = 2.0;
  wave.nx = 1024;
  wave.T = 1.0;
  wave.nt = 256;  // dt = 1/256 > dx = 1/256? equal is fine; shrink nt
  wave.nt = 128;
  CHECK_THROWS_AS(wave.validate(), ConfigError);
  wave.nt = 512;
  wave.validate();
  CHECK(wave.warnings.empty());

  ExperimentConfig wrap;
  wrap.kind = kernels::Kind::Wave;
  wrap.L = 1.0;
  wrap.nx = 1024;
  wrap.T = 1.0;
  wrap.nt = 1024;
  wrap.validate();
  REQUIRE_FALSE(wrap.warnings.empty());
  CHECK(wrap.warnings[0].find("periodic images") != std::string::npos);

  ExperimentConfig leak;
  leak.L = 2.0;
  leak.nx = 1024;
  leak.validate();
  REQUIRE_FALSE(leak.warnings.empty());
  CHECK(leak.warnings[0].find("boundary leakage") != std::string::npos);

  ExperimentConfig bigp;
  bigp.ps = {2.0, 12.0};
  bigp.validate();
  REQUIRE_FALSE(bigp.warnings.empty());
  CHECK(bigp.warnings[0].find("fragile") != std::string::npos);

  ExperimentConfig bad;
  bad.h0 = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = ExperimentConfig{};
  bad.ps = {};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = ExperimentConfig{};
  bad.n_iters = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("undersized ladders fail fast with guidance") {
  ExperimentConfig cfg;
  cfg.L = 2.0;
  cfg.nx = 1024;
  cfg.T = 0.5;
  cfg.nt = 32;  // 8 dt = T/4: only two time rungs fit under h0
  cfg.validate();
  CHECK_THROWS_WITH_AS(cfg.estimate_plan(),
                       doctest::Contains("fewer than 4 rungs"), ConfigError);
  cfg.dir_time = false;
  CHECK_NOTHROW(cfg.estimate_plan());
}

}  // TEST_SUITE
