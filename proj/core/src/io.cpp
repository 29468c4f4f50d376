#include "roughspde/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "roughspde/errors.hpp"
#include "roughspde/rng.hpp"
#include "roughspde/version.hpp"

static_assert(std::endian::native == std::endian::little,
              "field files are little-endian; big-endian hosts are unsupported");

namespace rs::io {

namespace {

struct FieldHeader {
  char magic[4];
  std::uint32_t version = 0, nt = 0, nx = 0;
  double H = 0.0, dt = 0.0, dx = 0.0;
  std::uint64_t seed = 0;
};
static_assert(sizeof(FieldHeader) == 48);

void put(std::ofstream& out, const void* p, std::size_t n) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void get(std::ifstream& in, void* p, std::size_t n, const std::string& path) {
  in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n)
    throw IoError("truncated field file: " + path);
}

FieldHeader read_header(std::ifstream& in, const std::string& path,
                        const char* magic) {
  FieldHeader h;
  get(in, &h, sizeof(h), path);
  if (std::memcmp(h.magic, magic, 4) != 0)
    throw IoError("bad magic in " + path + " (expected " + magic + ")");
  if (h.version != binary_format_version)
    throw IoError("unsupported format version " + std::to_string(h.version) +
                  " in " + path);
  if (h.nt == 0 || h.nx == 0)
    throw IoError("empty field in " + path);
  return h;
}

std::string fmt12(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(line);
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

double to_double(const std::string& s, const std::string& path) {
  try {
    std::size_t pos = 0;
    double x = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return x;
  } catch (const std::exception&) {
    throw IoError("bad number '" + s + "' in " + path);
  }
}

// Returns data lines (header row first) and parses the banner's config hash.
std::vector<std::string> read_csv_lines(const std::string& path,
                                        std::uint64_t* config_hash) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (config_hash) {
        auto pos = line.rfind("config ");
        if (pos != std::string::npos)
          *config_hash = std::strtoull(line.c_str() + pos + 7, nullptr, 16);
      }
      continue;
    }
    lines.push_back(line);
  }
  if (lines.empty()) throw IoError("no data rows in " + path);
  return lines;
}

}  // namespace

void write_noise_slab(const std::string& path, const noise::NoiseSlab& slab) {
  if (slab.data.size() != slab.nt * slab.nx)
    throw IoError("noise slab has inconsistent dimensions");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  FieldHeader h{{'R', 'S', 'N', 'S'},
                binary_format_version,
                static_cast<std::uint32_t>(slab.nt),
                static_cast<std::uint32_t>(slab.nx),
                slab.H, slab.dt, slab.dx, slab.seed};
  put(out, &h, sizeof(h));
  put(out, &slab.path, sizeof(slab.path));
  put(out, slab.data.data(), slab.data.size() * sizeof(double));
  if (!out) throw IoError("write failed: " + path);
}

noise::NoiseSlab read_noise_slab(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  FieldHeader h = read_header(in, path, "RSNS");
  noise::NoiseSlab slab;
  slab.nt = h.nt;
  slab.nx = h.nx;
  slab.H = h.H;
  slab.dt = h.dt;
  slab.dx = h.dx;
  slab.seed = h.seed;
  get(in, &slab.path, sizeof(slab.path), path);
  slab.data.resize(slab.nt * slab.nx);
  get(in, slab.data.data(), slab.data.size() * sizeof(double), path);
  return slab;
}

void write_solution_field(const std::string& path,
                          const solver::SolutionField& field) {
  if (field.data.size() != (field.nt + 1) * field.nx)
    throw IoError("solution field has inconsistent dimensions");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  FieldHeader h{{'R', 'S', 'U', 'F'},
                binary_format_version,
                static_cast<std::uint32_t>(field.nt),
                static_cast<std::uint32_t>(field.nx),
                field.H, field.dt, field.dx, field.seed};
  put(out, &h, sizeof(h));
  put(out, field.data.data(), field.data.size() * sizeof(double));
  if (!out) throw IoError("write failed: " + path);
}

solver::SolutionField read_solution_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  FieldHeader h = read_header(in, path, "RSUF");
  solver::SolutionField f;
  f.nt = h.nt;
  f.nx = h.nx;
  f.H = h.H;
  f.dt = h.dt;
  f.dx = h.dx;
  f.seed = h.seed;
  f.data.resize((f.nt + 1) * f.nx);
  get(in, f.data.data(), f.data.size() * sizeof(double), path);
  return f;
}

std::string csv_banner(std::uint64_t config_hash) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "# roughspde %s config %016llx",
                version_string, static_cast<unsigned long long>(config_hash));
  return buf;
}

void write_moments_csv(const std::string& path, const reg::MomentTable& table) {
  std::ostringstream os;
  os << csv_banner(table.config_hash) << "\n";
  os << "direction,p,h,moment,stderr,n_paths\n";
  for (const auto& r : table.rows)
    os << reg::direction_name(r.dir) << ',' << fmt12(r.p) << ',' << fmt12(r.h)
       << ',' << fmt12(r.moment) << ',' << fmt12(r.stderr_) << ','
       << r.n_paths << "\n";
  write_text_file(path, os.str());
}

reg::MomentTable read_moments_csv(const std::string& path) {
  reg::MomentTable table;
  auto lines = read_csv_lines(path, &table.config_hash);
  if (lines.front() != "direction,p,h,moment,stderr,n_paths")
    throw IoError("unexpected column header in " + path);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto f = split_csv_line(lines[i]);
    if (f.size() != 6) throw IoError("malformed row in " + path);
    reg::MomentRow r;
    r.dir = reg::direction_from_name(f[0]);
    r.p = to_double(f[1], path);
    r.h = to_double(f[2], path);
    r.moment = to_double(f[3], path);
    r.stderr_ = to_double(f[4], path);
    r.n_paths = static_cast<std::size_t>(to_double(f[5], path));
    table.rows.push_back(r);
  }
  return table;
}

void write_fits_csv(const std::string& path,
                    const std::vector<reg::ExponentFit>& fits,
                    std::uint64_t config_hash) {
  std::ostringstream os;
  os << csv_banner(config_hash) << "\n";
  os << "direction,p,exponent,ci95_lo,ci95_hi,slope,slope_se,r2,n_points\n";
  for (const auto& f : fits)
    os << reg::direction_name(f.dir) << ',' << fmt12(f.p) << ','
       << fmt12(f.exponent) << ',' << fmt12(f.ci95_lo) << ','
       << fmt12(f.ci95_hi) << ',' << fmt12(f.slope) << ','
       << fmt12(f.slope_se) << ',' << fmt12(f.r2) << ',' << f.n_points << "\n";
  write_text_file(path, os.str());
}

std::vector<reg::ExponentFit> read_fits_csv(const std::string& path) {
  auto lines = read_csv_lines(path, nullptr);
  if (lines.front() !=
      "direction,p,exponent,ci95_lo,ci95_hi,slope,slope_se,r2,n_points")
    throw IoError("unexpected column header in " + path);
  std::vector<reg::ExponentFit> fits;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto f = split_csv_line(lines[i]);
    if (f.size() != 9) throw IoError("malformed row in " + path);
    reg::ExponentFit e;
    e.dir = reg::direction_from_name(f[0]);
    e.p = to_double(f[1], path);
    e.exponent = to_double(f[2], path);
    e.ci95_lo = to_double(f[3], path);
    e.ci95_hi = to_double(f[4], path);
    e.slope = to_double(f[5], path);
    e.slope_se = to_double(f[6], path);
    e.r2 = to_double(f[7], path);
    e.n_points = static_cast<std::size_t>(to_double(f[8], path));
    e.method = "csv";
    fits.push_back(e);
  }
  return fits;
}

void write_distances_csv(const std::string& path,
                         const std::vector<double>& distances,
                         std::uint64_t config_hash) {
  std::ostringstream os;
  os << csv_banner(config_hash) << "\n";
  os << "iteration,distance\n";
  for (std::size_t k = 0; k < distances.size(); ++k)
    os << (k + 1) << ',' << fmt12(distances[k]) << "\n";
  write_text_file(path, os.str());
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint64_t file_fnv1a64(const std::string& path, std::uint64_t* size_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::uint64_t h = 0xcbf29ce484222325ull;
  std::uint64_t total = 0;
  char buf[65536];
  while (in) {
    in.read(buf, sizeof(buf));
    std::streamsize n = in.gcount();
    total += static_cast<std::uint64_t>(n);
    h = fnv1a64(buf, static_cast<std::size_t>(n), h);
  }
  if (size_out) *size_out = total;
  return h;
}

OutputRecord record_output(const std::string& dir, const std::string& file) {
  OutputRecord rec;
  rec.file = file;
  rec.hash = file_fnv1a64(dir + "/" + file, &rec.bytes);
  return rec;
}

void write_manifest(const std::string& path, const ExperimentConfig& cfg,
                    const std::vector<std::pair<std::string, double>>& timings_ms,
                    const std::vector<OutputRecord>& outputs,
                    const std::vector<std::string>& warnings) {
  using json = nlohmann::ordered_json;
  json j;
  j["tool"] = "roughspde";
  j["version"] = version_string;
  {
    char buf[32];
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    j["created_utc"] = buf;
  }
  j["config_hash"] = cfg.hash_hex();

  // Sections nested as objects; values are the canonical strings that feed
  // the hash, so the manifest reproduces the run exactly.
  json sections = json::object();
  {
    std::stringstream ss(cfg.serialize());
    std::string line, section;
    json* cur = nullptr;
    while (std::getline(ss, line)) {
      if (line.empty()) continue;
      if (line.front() == '[') {
        section = line.substr(1, line.size() - 2);
        cur = &(sections[section] = json::object());
        continue;
      }
      auto eq = line.find(" = ");
      if (eq != std::string::npos && cur)
        (*cur)[line.substr(0, eq)] = line.substr(eq + 3);
    }
  }
  j["config"] = sections;
  j["seed"] = cfg.seed;
  j["paths"] = cfg.paths;
  j["workers"] = cfg.workers;

  json t = json::object();
  for (const auto& [name, ms] : timings_ms) t[name] = ms;
  j["timings_ms"] = t;

  json outs = json::array();
  for (const auto& o : outputs) {
    char hex[20];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(o.hash));
    outs.push_back({{"file", o.file}, {"bytes", o.bytes}, {"fnv1a64", hex}});
  }
  j["outputs"] = outs;
  j["warnings"] = warnings;

  write_text_file(path, j.dump(2) + "\n");
}

void write_loglog_svg(const std::string& path, const std::string& title,
                      const std::string& xlabel, const std::string& ylabel,
                      const std::vector<PlotSeries>& series) {
  const int W = 640, Ht = 480;
  const int ml = 70, mr = 24, mt = 40, mb = 50;
  double lx0 = 1e300, lx1 = -1e300, ly0 = 1e300, ly1 = -1e300;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.x[i] > 0.0 && s.y[i] > 0.0)) continue;
      lx0 = std::min(lx0, std::log10(s.x[i]));
      lx1 = std::max(lx1, std::log10(s.x[i]));
      ly0 = std::min(ly0, std::log10(s.y[i]));
      ly1 = std::max(ly1, std::log10(s.y[i]));
    }
  if (lx0 > lx1 || ly0 > ly1) throw IoError("nothing to plot for " + path);
  if (lx1 - lx0 < 1e-12) { lx0 -= 0.5; lx1 += 0.5; }
  if (ly1 - ly0 < 1e-12) { ly0 -= 0.5; ly1 += 0.5; }
  const double padx = 0.05 * (lx1 - lx0), pady = 0.08 * (ly1 - ly0);
  lx0 -= padx; lx1 += padx; ly0 -= pady; ly1 += pady;

  auto X = [&](double v) {
    return ml + (std::log10(v) - lx0) / (lx1 - lx0) * (W - ml - mr);
  };
  auto Y = [&](double v) {
    return Ht - mb - (std::log10(v) - ly0) / (ly1 - ly0) * (Ht - mt - mb);
  };

  static const char* colors[] = {"#1f6feb", "#d1242f", "#1a7f37", "#8250df",
                                 "#bf8700", "#0d7d87"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
     << "\" height=\"" << Ht << "\" viewBox=\"0 0 " << W << ' ' << Ht
     << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" "
        "font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n";

  // frame
  os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr
     << "\" height=\"" << Ht - mt - mb
     << "\" fill=\"none\" stroke=\"#444\"/>\n";

  // decade ticks
  char buf[64];
  for (int e = static_cast<int>(std::ceil(lx0)); e <= std::floor(lx1); ++e) {
    double px = ml + (e - lx0) / (lx1 - lx0) * (W - ml - mr);
    os << "<line x1=\"" << px << "\" y1=\"" << mt << "\" x2=\"" << px
       << "\" y2=\"" << Ht - mb << "\" stroke=\"#ddd\"/>\n";
    std::snprintf(buf, sizeof(buf), "1e%d", e);
    os << "<text x=\"" << px << "\" y=\"" << Ht - mb + 18
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"11\">" << buf << "</text>\n";
  }
  for (int e = static_cast<int>(std::ceil(ly0)); e <= std::floor(ly1); ++e) {
    double py = Ht - mb - (e - ly0) / (ly1 - ly0) * (Ht - mt - mb);
    os << "<line x1=\"" << ml << "\" y1=\"" << py << "\" x2=\"" << W - mr
       << "\" y2=\"" << py << "\" stroke=\"#ddd\"/>\n";
    std::snprintf(buf, sizeof(buf), "1e%d", e);
    os << "<text x=\"" << ml - 6 << "\" y=\"" << py + 4
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
          "font-size=\"11\">" << buf << "</text>\n";
  }
  os << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << Ht - 12
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"13\">" << xlabel << "</text>\n";
  os << "<text x=\"16\" y=\"" << (mt + Ht - mb) / 2
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\""
        " transform=\"rotate(-90 16 " << (mt + Ht - mb) / 2 << ")\">" << ylabel
     << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* col = colors[si % 6];
    os << "<polyline fill=\"none\" stroke=\"" << col
       << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.x[i] > 0.0 && s.y[i] > 0.0)) continue;
      std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", X(s.x[i]), Y(s.y[i]));
      os << buf;
    }
    os << "\"/>\n";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.x[i] > 0.0 && s.y[i] > 0.0)) continue;
      std::snprintf(buf, sizeof(buf),
                    "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\"/>\n",
                    X(s.x[i]), Y(s.y[i]), col);
      os << buf;
    }
    if (s.has_guide && !s.x.empty()) {
      // dashed reference through the first point
      double x0 = s.x.front(), y0 = s.y.front(), x1 = s.x.back();
      double y1 = y0 * std::pow(x1 / x0, s.guide_slope);
      std::snprintf(buf, sizeof(buf),
                    "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\"",
                    X(x0), Y(y0), X(x1), Y(y1));
      os << buf << " stroke=\"" << col
         << "\" stroke-dasharray=\"5,4\" stroke-width=\"1\"/>\n";
    }
    os << "<text x=\"" << ml + 10 << "\" y=\"" << mt + 18 + 16 * si
       << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << col
       << "\">" << s.label << "</text>\n";
  }
  os << "</svg>\n";
  write_text_file(path, os.str());
}

}  // namespace rs::io
