#pragma once

#include <cstddef>

#include "roughspde/errors.hpp"

namespace rs {

constexpr bool is_pow2(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

// Periodic space-time grid. Space is [-L, L) with nx cells, time is [0, T]
// with nt steps. Observation happens in the window [-L_obs, L_obs]; the
// domain is padded wide enough that periodic wrap-around never reaches the
// window within the simulated horizon (enforced by callers, see config).
struct SpaceTimeGrid {
  double L = 0.0;
  std::size_t nx = 0;
  double T = 0.0;
  std::size_t nt = 0;
  double L_obs = 0.0;

  double dx() const { return 2.0 * L / static_cast<double>(nx); }
  double dt() const { return T / static_cast<double>(nt); }
  double x(std::size_t j) const { return -L + static_cast<double>(j) * dx(); }
  double t(std::size_t n) const { return static_cast<double>(n) * dt(); }

  // Index range [j_lo, j_hi] covering the observation window.
  std::size_t window_lo() const {
    double j = (L - L_obs) / dx();
    auto lo = static_cast<std::size_t>(j + 0.5);
    return lo;
  }
  std::size_t window_hi() const {
    double j = (L + L_obs) / dx();
    auto hi = static_cast<std::size_t>(j + 0.5);
    return hi < nx ? hi : nx - 1;
  }

  void validate() const {
    if (L <= 0.0 || T <= 0.0) throw ConfigError("grid: L and T must be positive");
    if (!is_pow2(nx)) throw ConfigError("grid: nx must be a power of two");
    if (nt == 0) throw ConfigError("grid: nt must be positive");
    if (L_obs <= 0.0 || L_obs > L) throw ConfigError("grid: need 0 < L_obs <= L");
  }
};

}  // namespace rs
