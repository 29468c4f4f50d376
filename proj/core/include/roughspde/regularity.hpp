#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "roughspde/grid.hpp"
#include "roughspde/kernels.hpp"
#include "roughspde/noise.hpp"
#include "roughspde/solver.hpp"

namespace rs::reg {

enum class Direction { Space, Time };
const char* direction_name(Direction d);
Direction direction_from_name(const std::string& s);

// Descending-halving ladder h_max, h_max/2, ... down to h_min, returned
// ascending.
std::vector<double> dyadic_lags(double h_min, double h_max);

struct MomentRow {
  Direction dir = Direction::Space;
  double p = 2.0;
  double h = 0.0;        // physical lag
  double moment = 0.0;   // ensemble mean of per-path window means of |du|^p
  double stderr_ = 0.0;  // sd of per-path means / sqrt(n_paths)
  std::size_t n_paths = 0;
};

struct MomentTable {
  std::vector<MomentRow> rows;
  std::uint64_t config_hash = 0;
  std::vector<std::string> warnings;
};

// What to measure on each path. Space increments are averaged over late-time
// slices and window positions; time increments over a post-ramp time range
// and window positions.
struct EstimatePlan {
  SpaceTimeGrid grid;
  std::vector<double> ps;
  std::vector<std::size_t> space_lags;  // cells
  std::vector<std::size_t> time_lags;   // steps, multiples of time_stride
  std::size_t ramp_steps = 0;           // earliest time index of a time pair
  std::size_t space_t_min_step = 0;
  std::size_t space_slice_stride = 1;
  std::size_t time_stride = 1;
  std::size_t w_lo = 0, w_hi = 0;       // observation window column range

  // Derives strides/steps from fractions and converts physical lags to grid
  // units, refusing anything the grid cannot resolve.
  static EstimatePlan make(const SpaceTimeGrid& grid, std::vector<double> ps,
                           const std::vector<double>& space_lags,
                           const std::vector<double>& time_lags,
                           double ramp_frac, double space_t_min_frac);

  std::size_t n_cells() const;
  MomentRow cell_meta(std::size_t cell) const;  // dir, p, h filled
};

// Streams the rows of one path's solution and accumulates per-cell means.
class IncrementAccumulator {
 public:
  explicit IncrementAccumulator(const EstimatePlan& plan);
  void reset();
  void consume(std::size_t level, const double* u);
  std::vector<double> path_means() const;

 private:
  const EstimatePlan& plan_;
  std::vector<double> sums_;
  std::vector<std::size_t> counts_;
  std::vector<double> ring_;  // stored window columns for time pairing
  std::vector<std::size_t> ring_level_;
  std::size_t ring_rows_ = 0, win_ = 0;
};

// Produces the rows of one path's solution; `worker` identifies the calling
// thread so implementations can reuse per-worker engines.
using PathFieldRunner = std::function<void(
    std::size_t path, unsigned worker, const solver::RowObserver& observe)>;

struct MomentEstimate {
  MomentTable table;
  EstimatePlan plan;
  std::vector<std::vector<double>> per_path;  // [path][cell]
};

// Runs n_paths through the runner on `workers` threads; the returned table is
// byte-stable across worker counts. Refuses n_paths < 16.
MomentEstimate estimate_increment_moments(const EstimatePlan& plan,
                                          std::size_t n_paths, unsigned workers,
                                          const PathFieldRunner& runner);

struct LineFit {
  double slope = 0.0, intercept = 0.0;
  double slope_se = 0.0;
  double r2 = 0.0;
};

// Weighted least squares of log(m) on log(h); weights are inverse variances
// of log(m) and are treated as known (no residual rescaling).
LineFit weighted_loglog(const std::vector<double>& h,
                        const std::vector<double>& m,
                        const std::vector<double>& w);

struct ExponentFit {
  Direction dir = Direction::Space;
  double p = 2.0;
  double exponent = 0.0;  // slope / p
  double ci95_lo = 0.0, ci95_hi = 0.0;
  double slope = 0.0, slope_se = 0.0, r2 = 0.0;
  std::size_t n_points = 0;
  std::string method = "wls";
};

// Fit from ladder rows of a single (direction, p); needs >= 4 points.
ExponentFit fit_exponent(const std::vector<MomentRow>& ladder);

// Same, plus a path bootstrap (resampling per-path means, weights held fixed)
// whose percentile interval widens ci95 when it disagrees with the analytic
// one.
ExponentFit fit_exponent_bootstrap(const MomentEstimate& est, Direction dir,
                                   double p, std::size_t n_resamples,
                                   std::uint64_t seed);

struct DirectionReport {
  Direction dir = Direction::Space;
  double target = 0.0;
  std::vector<ExponentFit> fits;          // one per p
  double pooled = 0.0;                    // inverse-variance pooled exponent
  std::vector<double> attainable;         // exponent - 1/p, per p
  double best_attainable = 0.0;
  bool p_consistent = false;              // spread < 2 * max ci95 width
  std::string flag;                       // PASS / FAIL-HIGH / FAIL-LOW
};

struct KolmogorovReport {
  double H = 0.0;
  kernels::Kind kind = kernels::Kind::Heat;
  double tol = 0.05;
  std::vector<DirectionReport> directions;
  bool warn_large_p = false;
  std::vector<std::string> warnings;
  std::string render() const;
};

// Expected exponents: space H; time H (wave) or H/2 (heat).
double exponent_target(Direction dir, kernels::Kind kind, double H);

// Needs fits for at least two p values overall.
KolmogorovReport kolmogorov_report(const std::vector<ExponentFit>& fits,
                                   double H, kernels::Kind kind, double tol);

// Discrete surrogate of the joint kernel/increment integrability functional:
//   nu(t) = int_0^t kappa(t - s) [ 2 int_0^rmax D^(2/p)(s, r) r^(2H-2) dr
//                                  + plateau tail ] ds
// with kappa the time weight of the kernel (heat 1/(2 sqrt(pi tau)), wave
// tau/2), D(s, r) the measured p-th moment of space increments at time s and
// lag r, and the tail extending the last measured plateau with the integrable
// r^(2H-2) weight. Finite output certifies the moment bound actually carries
// the integral the regularity argument needs.
struct PropertyPInputs {
  kernels::Kind kind = kernels::Kind::Heat;
  double H = 0.3;
  double p = 2.0;
  double dx = 0.0;
  double h0 = 0.25;    // near/far split radius
  double r_max = 0.0;  // measured lag range; beyond uses the plateau bound
  std::vector<double> s_values;           // ascending, s_values.front() == 0
  std::vector<std::vector<double>> D;     // D[s][k-1], lag k = 1..k_max
  std::vector<double> t_evals;
};

struct PropertyPResult {
  double value = 0.0;  // max over t_evals
  double t_at_max = 0.0;
  std::vector<double> at_t;
  double near_part = 0.0, far_part = 0.0, beyond_part = 0.0;  // at the max
  bool finite = false;
};

PropertyPResult property_p_integral(const PropertyPInputs& in);

// Monte Carlo check of pairing covariances against the spectral quadrature.
struct CovCheck {
  std::string label;
  double sample = 0.0, stderr_ = 0.0, quadrature = 0.0;
  double tol = 0.0;
  bool pass = false;
};

std::vector<CovCheck> verify_noise_covariance(
    const SpaceTimeGrid& grid, double H,
    const std::vector<std::pair<noise::TestFunction, noise::TestFunction>>& pairs,
    std::size_t n_paths, std::uint64_t seed, double rel_allowance = 0.02,
    unsigned workers = 1);

}  // namespace rs::reg
