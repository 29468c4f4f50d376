#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "roughspde/config.hpp"
#include "roughspde/noise.hpp"
#include "roughspde/regularity.hpp"
#include "roughspde/solver.hpp"

namespace rs::io {

// Binary field files. Layout (little-endian):
//   magic[4]  "RSNS" (noise slab) or "RSUF" (solution field)
//   u32 format version, u32 nt, u32 nx
//   f64 H, f64 dt, f64 dx
//   u64 seed
// i.e. a 48-byte header. Noise slabs carry one extra u64 (the path index)
// between header and payload. Payload is row-major f64:
// nt rows for slabs, nt + 1 rows for fields.
void write_noise_slab(const std::string& path, const noise::NoiseSlab& slab);
noise::NoiseSlab read_noise_slab(const std::string& path);
void write_solution_field(const std::string& path,
                          const solver::SolutionField& field);
solver::SolutionField read_solution_field(const std::string& path);

// First line of every CSV we emit: "# roughspde <version> config <hex>".
std::string csv_banner(std::uint64_t config_hash);

// moments.csv: direction,p,h,moment,stderr,n_paths
void write_moments_csv(const std::string& path, const reg::MomentTable& table);
reg::MomentTable read_moments_csv(const std::string& path);

// fits.csv: direction,p,exponent,ci95_lo,ci95_hi,slope,slope_se,r2,n_points
void write_fits_csv(const std::string& path,
                    const std::vector<reg::ExponentFit>& fits,
                    std::uint64_t config_hash);
std::vector<reg::ExponentFit> read_fits_csv(const std::string& path);

// distances.csv: iteration,distance
void write_distances_csv(const std::string& path,
                         const std::vector<double>& distances,
                         std::uint64_t config_hash);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

// Streaming FNV-1a of a file's bytes; optionally reports the byte count.
std::uint64_t file_fnv1a64(const std::string& path,
                           std::uint64_t* size_out = nullptr);

struct OutputRecord {
  std::string file;
  std::uint64_t bytes = 0;
  std::uint64_t hash = 0;
};

// Hash + size a written artifact, for the manifest.
OutputRecord record_output(const std::string& dir, const std::string& file);

// manifest.json: tool/version/created_utc/config_hash_hex, the full config
// (sections as nested objects, values as canonical strings), seed/paths/
// workers, per-stage timings, output records, warnings.
void write_manifest(const std::string& path, const ExperimentConfig& cfg,
                    const std::vector<std::pair<std::string, double>>& timings_ms,
                    const std::vector<OutputRecord>& outputs,
                    const std::vector<std::string>& warnings);

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;   // positive; drawn on log-log axes
  double guide_slope = 0.0;   // if nonzero, dashed reference line through
  bool has_guide = false;     // the first point with this slope
};

void write_loglog_svg(const std::string& path, const std::string& title,
                      const std::string& xlabel, const std::string& ylabel,
                      const std::vector<PlotSeries>& series);

}  // namespace rs::io
