#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "roughspde/grid.hpp"

namespace rs::kernels {

enum class Kind { Wave, Heat };

const char* kind_name(Kind k);
Kind kind_from_name(const std::string& s);

// Fundamental solutions on the line: wave d^2/dt^2 = d^2/dx^2 gives the half
// indicator of the light cone; heat d/dt = (1/2) d^2/dx^2 gives the standard
// Gaussian kernel.
double green(Kind k, double t, double x);

// Fourier transform of green(t, .): wave sin(t xi)/xi, heat exp(-t xi^2 / 2).
double green_fourier(Kind k, double t, double xi);

// g(h) = int_0^h int_R |Fgreen(u, xi)|^2 |xi|^(1-2H) dxi du, the kernel
// energy against the (un-normalized) spectral weight. Computed by quadrature
// with analytic tails; rel_tol is a relative tolerance on the result.
double kernel_energy(Kind k, double h, double H, double rel_tol = 1e-8);

// Closed form of the heat kernel energy: Gamma(1 - H) h^H / H.
double kernel_energy_heat_closed(double h, double H);

enum class DataFamily { Zero, Constant, Weierstrass };

DataFamily data_family_from_name(const std::string& s);
const char* data_family_name(DataFamily f);

struct InitialDataParams {
  DataFamily family = DataFamily::Weierstrass;
  double holder = 0.3;  // Weierstrass regularity exponent
  int terms = 30;       // Weierstrass frequencies 2^0 .. 2^terms
  double value = 0.0;   // Constant family value
  DataFamily v0_family = DataFamily::Zero;
  double v0_value = 0.0;
};

struct InitialData {
  DataFamily family = DataFamily::Zero;
  double holder_order = 1.0;  // nominal Hoelder regularity of u0
  std::function<double(double)> u0;
  std::function<double(double)> v0;  // wave initial velocity
};

InitialData make_initial_data(const InitialDataParams& p);

// sup over n_samples points of |f(x+h) - f(x)| / h^order on [a, b].
double holder_quotient(const std::function<double(double)>& f, double a,
                       double b, std::size_t n_samples, double h, double order);

// Deterministic part of the mild solution, sampled on the full grid.
struct HomogeneousField {
  std::size_t nt = 0, nx = 0;
  std::vector<double> data;  // (nt + 1) * nx, row-major in time

  double* row(std::size_t n) { return data.data() + n * nx; }
  const double* row(std::size_t n) const { return data.data() + n * nx; }
};

// Wave: d'Alembert with the periodic extension of (u0, v0); shifts by
// non-integer cell counts use linear interpolation (exact when dt = dx).
// Heat: spectral semigroup applied to the even reflection of u0 across x = L,
// which avoids the wrap-around seam of a plain periodic extension.
// Either way the seam artifacts stay outside the observation window whenever
// L >= L_obs + T (wave, exactly) or L - L_obs >> sqrt(T) (heat).
HomogeneousField homogeneous_solution(const SpaceTimeGrid& grid, Kind kind,
                                      const InitialData& data);

}  // namespace rs::kernels
