#include "roughspde/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "roughspde/errors.hpp"
#include "roughspde/fft.hpp"
#include "roughspde/quadrature.hpp"

namespace rs::kernels {

namespace {
constexpr double pi = std::numbers::pi;

std::size_t wrap_index(long k, std::size_t n) {
  long m = static_cast<long>(n);
  long r = k % m;
  if (r < 0) r += m;
  return static_cast<std::size_t>(r);
}
}  // namespace

const char* kind_name(Kind k) { return k == Kind::Wave ? "wave" : "heat"; }

Kind kind_from_name(const std::string& s) {
  if (s == "wave") return Kind::Wave;
  if (s == "heat") return Kind::Heat;
  throw ConfigError("unknown equation kind: " + s);
}

double green(Kind k, double t, double x) {
  if (!(t > 0.0)) throw ConfigError("green: need t > 0");
  if (k == Kind::Wave) return std::abs(x) <= t ? 0.5 : 0.0;
  return std::exp(-x * x / (2.0 * t)) / std::sqrt(2.0 * pi * t);
}

double green_fourier(Kind k, double t, double xi) {
  if (!(t > 0.0)) throw ConfigError("green_fourier: need t > 0");
  if (k == Kind::Heat) return std::exp(-0.5 * t * xi * xi);
  double u = t * xi;
  if (std::abs(u) < 1e-4) {
    // sin(t xi)/xi = t (1 - u^2/6 + u^4/120)
    double u2 = u * u;
    return t * (1.0 - u2 / 6.0 + u2 * u2 / 120.0);
  }
  return std::sin(u) / xi;
}

double kernel_energy_heat_closed(double h, double H) {
  if (!(h > 0.0)) throw ConfigError("kernel_energy: need h > 0");
  if (!(H > 0.0 && H < 0.5)) throw ConfigError("kernel_energy: H must lie in (0, 1/2)");
  return std::tgamma(1.0 - H) * std::pow(h, H) / H;
}

namespace {

double kernel_energy_once(Kind k, double h, double H, double abs_tol) {
  double q_heat = 1.0 + 2.0 * H;
  if (k == Kind::Heat) {
    // 2 (1 - exp(-h xi^2)) xi^-(1+2H); beyond X the exponential is ~7e-33.
    double X = std::sqrt(74.0 / h);
    auto f = [&](double xi) {
      if (xi == 0.0) return 0.0;
      return 2.0 * (-std::expm1(-h * xi * xi)) * std::pow(xi, -q_heat);
    };
    double split = std::min(1.0, X);
    double head = quad::integrate_from_zero(f, split, {abs_tol / 4.0, 48});
    if (split < X) head += quad::integrate(f, split, X, {abs_tol / 4.0, 48});
    return head + 2.0 * quad::power_tail(X, q_heat);
  }

  // Wave: int_0^h sin^2(u xi) du = h/2 - sin(2 h xi)/(4 xi), so the integrand
  // is 2 (h/2 - sin(2 h xi)/(4 xi)) xi^-(1+2H).
  auto bracket = [&](double xi) {
    double u = 2.0 * h * xi;
    if (std::abs(u) < 1e-3) {
      double u2 = u * u;
      return 0.5 * h * (u2 / 6.0 - u2 * u2 / 120.0);
    }
    return 0.5 * h - std::sin(u) / (4.0 * xi);
  };
  auto f = [&](double xi) {
    if (xi == 0.0) return 0.0;
    return 2.0 * bracket(xi) * std::pow(xi, -q_heat);
  };
  double q_tail = 2.0 + 2.0 * H;
  double X = std::max(1.0, quad::oscillatory_cutoff(2.0 * h, q_tail, abs_tol / 8.0));
  double split = std::min(X, pi / (4.0 * h));  // before the first oscillation
  double head = quad::integrate_from_zero(f, split, {abs_tol / 4.0, 48});
  if (split < X)
    head += quad::integrate_segmented(f, split, X, pi / (2.0 * h),
                                      {abs_tol / 4.0, 48});
  double tail = h * quad::power_tail(X, q_heat) -
                0.5 * quad::sin_power_tail(2.0 * h, q_tail, X);
  return head + tail;
}

}  // namespace

double kernel_energy(Kind k, double h, double H, double rel_tol) {
  if (!(h > 0.0)) throw ConfigError("kernel_energy: need h > 0");
  if (!(H > 0.0 && H < 0.5)) throw ConfigError("kernel_energy: H must lie in (0, 1/2)");
  double coarse = kernel_energy_once(k, h, H, 1e-8);
  double abs_tol = std::max(rel_tol * std::abs(coarse), 1e-15);
  return kernel_energy_once(k, h, H, abs_tol);
}

DataFamily data_family_from_name(const std::string& s) {
  if (s == "zero") return DataFamily::Zero;
  if (s == "constant") return DataFamily::Constant;
  if (s == "weierstrass") return DataFamily::Weierstrass;
  throw ConfigError("unknown initial data family: " + s);
}

const char* data_family_name(DataFamily f) {
  switch (f) {
    case DataFamily::Zero: return "zero";
    case DataFamily::Constant: return "constant";
    case DataFamily::Weierstrass: return "weierstrass";
  }
  return "?";
}

namespace {

std::function<double(double)> make_component(DataFamily family, double holder,
                                             int terms, double value) {
  switch (family) {
    case DataFamily::Zero:
      return [](double) { return 0.0; };
    case DataFamily::Constant:
      return [value](double) { return value; };
    case DataFamily::Weierstrass: {
      if (!(holder > 0.0 && holder < 1.0))
        throw ConfigError("weierstrass data: exponent must lie in (0, 1)");
      if (terms < 1 || terms > 48)
        throw ConfigError("weierstrass data: terms must lie in [1, 48]");
      return [holder, terms](double x) {
        double s = 0.0;
        double freq = 1.0;
        double amp = 1.0;
        double decay = std::pow(2.0, -holder);
        for (int k = 0; k <= terms; ++k) {
          s += amp * std::cos(freq * x);
          freq *= 2.0;
          amp *= decay;
        }
        return s;
      };
    }
  }
  throw ConfigError("unknown initial data family");
}

}  // namespace

InitialData make_initial_data(const InitialDataParams& p) {
  InitialData d;
  d.family = p.family;
  d.holder_order = p.family == DataFamily::Weierstrass ? p.holder : 1.0;
  d.u0 = make_component(p.family, p.holder, p.terms, p.value);
  d.v0 = make_component(p.v0_family, p.holder, p.terms, p.v0_value);
  return d;
}

double holder_quotient(const std::function<double(double)>& f, double a,
                       double b, std::size_t n_samples, double h, double order) {
  if (!(h > 0.0) || !(b - h > a)) throw ConfigError("holder_quotient: bad window");
  if (n_samples < 2) throw ConfigError("holder_quotient: need >= 2 samples");
  double span = (b - h) - a;
  double denom = std::pow(h, order);
  double best = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    double x = a + span * static_cast<double>(i) / static_cast<double>(n_samples - 1);
    best = std::max(best, std::abs(f(x + h) - f(x)) / denom);
  }
  return best;
}

namespace {

HomogeneousField homogeneous_heat(const SpaceTimeGrid& grid, const InitialData& data) {
  std::size_t nx = grid.nx;
  std::size_t m2 = 2 * nx;
  // Even reflection across x = L: continuous periodic extension of period 4L,
  // so the semigroup sees no seam jump at the domain boundary.
  std::vector<double> ext(m2);
  for (std::size_t j = 0; j < nx; ++j) ext[j] = data.u0(grid.x(j));
  for (std::size_t j = 0; j < nx; ++j) ext[nx + j] = ext[nx - 1 - j];

  fft::RealTransform tr(m2);
  std::vector<std::complex<double>> hat;
  tr.forward(ext, hat);

  HomogeneousField w;
  w.nt = grid.nt;
  w.nx = nx;
  w.data.resize((grid.nt + 1) * nx);

  std::vector<std::complex<double>> scaled(hat.size());
  std::vector<double> tmp(m2);
  double base_xi = pi / (2.0 * grid.L);  // fundamental frequency of period 4L
  double inv_m2 = 1.0 / static_cast<double>(m2);
  for (std::size_t n = 0; n <= grid.nt; ++n) {
    double t = grid.t(n);
    for (std::size_t k = 0; k < hat.size(); ++k) {
      double xi = base_xi * static_cast<double>(k);
      scaled[k] = hat[k] * std::exp(-0.5 * xi * xi * t);
    }
    tr.inverse(scaled, tmp);
    double* row = w.row(n);
    for (std::size_t j = 0; j < nx; ++j) row[j] = tmp[j] * inv_m2;
  }
  return w;
}

HomogeneousField homogeneous_wave(const SpaceTimeGrid& grid, const InitialData& data) {
  std::size_t nx = grid.nx;
  std::vector<double> u(nx), v(nx);
  for (std::size_t j = 0; j < nx; ++j) {
    u[j] = data.u0(grid.x(j));
    v[j] = data.v0(grid.x(j));
  }

  // Cumulative trapezoid of v0 from -L, plus the mass of one period so the
  // antiderivative unwraps linearly across periodic copies.
  std::vector<double> V(nx, 0.0);
  double dx = grid.dx();
  for (std::size_t j = 1; j < nx; ++j)
    V[j] = V[j - 1] + 0.5 * dx * (v[j - 1] + v[j]);
  double mass = V[nx - 1] + 0.5 * dx * (v[nx - 1] + v[0]);

  auto u_at = [&](long k, double frac) {
    double a = u[wrap_index(k, nx)];
    if (frac == 0.0) return a;
    double b = u[wrap_index(k + 1, nx)];
    return (1.0 - frac) * a + frac * b;
  };
  auto V_at = [&](long k, double frac) {
    auto unwrapped = [&](long i) {
      long div = i >= 0 ? i / static_cast<long>(nx)
                        : -((-i + static_cast<long>(nx) - 1) / static_cast<long>(nx));
      return V[wrap_index(i, nx)] + static_cast<double>(div) * mass;
    };
    double a = unwrapped(k);
    if (frac == 0.0) return a;
    return (1.0 - frac) * a + frac * unwrapped(k + 1);
  };

  HomogeneousField w;
  w.nt = grid.nt;
  w.nx = nx;
  w.data.resize((grid.nt + 1) * nx);

  for (std::size_t n = 0; n <= grid.nt; ++n) {
    double s = grid.t(n) / dx;  // shift in cells; exact when dt = dx
    double si = std::floor(s);
    double frac = s - si;
    long shift = static_cast<long>(si);
    double* row = w.row(n);
    for (std::size_t j = 0; j < nx; ++j) {
      long jp = static_cast<long>(j) + shift;
      long jm = static_cast<long>(j) - shift - (frac > 0.0 ? 1 : 0);
      double fm = frac > 0.0 ? 1.0 - frac : 0.0;
      double avg = 0.5 * (u_at(jp, frac) + u_at(jm, fm));
      double integral = V_at(jp, frac) - V_at(jm, fm);
      row[j] = avg + 0.5 * integral;
    }
  }
  return w;
}

}  // namespace

HomogeneousField homogeneous_solution(const SpaceTimeGrid& grid, Kind kind,
                                      const InitialData& data) {
  grid.validate();
  return kind == Kind::Heat ? homogeneous_heat(grid, data)
                            : homogeneous_wave(grid, data);
}

}  // namespace rs::kernels
