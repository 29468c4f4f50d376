#include "roughspde/quadrature.hpp"

#include <cmath>
#include <cstdlib>

#include "roughspde/errors.hpp"

namespace rs::quad {

namespace {

double eval(const std::function<double(double)>& f, double x) {
  double v = f(x);
  if (!std::isfinite(v)) throw QuadratureError("integrand returned a non-finite value");
  return v;
}

double simpson_rec(const std::function<double(double)>& f, double a, double b,
                   double fa, double fm, double fb, double whole, double tol,
                   int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m);
  double rm = 0.5 * (m + b);
  double flm = eval(f, lm);
  double frm = eval(f, rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth <= 0) throw QuadratureError("adaptive Simpson: depth budget exhausted");
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 Options opt) {
  if (!(b > a)) return 0.0;
  double fa = eval(f, a);
  double fb = eval(f, b);
  double fm = eval(f, 0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, opt.abs_tol, opt.max_depth);
}

double integrate_segmented(const std::function<double(double)>& f, double a,
                           double b, double segment, Options opt) {
  if (!(b > a)) return 0.0;
  if (!(segment > 0.0)) throw ConfigError("integrate_segmented: segment must be positive");
  auto n = static_cast<std::size_t>(std::ceil((b - a) / segment));
  if (n < 1) n = 1;
  double step = (b - a) / static_cast<double>(n);
  Options chunk = opt;
  chunk.abs_tol = opt.abs_tol / static_cast<double>(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double lo = a + step * static_cast<double>(i);
    double hi = (i + 1 == n) ? b : a + step * static_cast<double>(i + 1);
    total += integrate(f, lo, hi, chunk);
  }
  return total;
}

double integrate_from_zero(const std::function<double(double)>& f, double c,
                           Options opt) {
  if (!(c > 0.0)) return 0.0;
  auto g = [&](double v) {
    double v3 = v * v * v;
    return f(v3 * v) * 4.0 * v3;
  };
  return integrate(g, 0.0, std::pow(c, 0.25), opt);
}

double power_tail(double X, double q) {
  if (!(q > 1.0)) throw ConfigError("power_tail: need q > 1");
  if (!(X > 0.0)) throw ConfigError("power_tail: need X > 0");
  return std::pow(X, 1.0 - q) / (q - 1.0);
}

// int_X^inf cos(cx) x^-q dx
//   = -sin(cX) X^-q / c + (q/c) int_X^inf sin(cx) x^-(q+1) dx
//   = -sin(cX) X^-q / c + q cos(cX) X^-(q+1) / c^2 + R,
// |R| <= q X^-(q+1) / c^2. Same bound for the sin variant.
double cos_power_tail(double c, double q, double X) {
  if (c == 0.0) return power_tail(X, q);
  return -std::sin(c * X) * std::pow(X, -q) / c +
         q * std::cos(c * X) * std::pow(X, -q - 1.0) / (c * c);
}

double sin_power_tail(double c, double q, double X) {
  if (c == 0.0) throw ConfigError("sin_power_tail: need c != 0");
  return std::cos(c * X) * std::pow(X, -q) / c +
         q * std::sin(c * X) * std::pow(X, -q - 1.0) / (c * c);
}

double oscillatory_tail_bound(double c, double q, double X) {
  if (c == 0.0) return power_tail(X, q);
  return q * std::pow(X, -q - 1.0) / (c * c);
}

double oscillatory_cutoff(double c, double q, double tol) {
  if (!(tol > 0.0)) throw ConfigError("oscillatory_cutoff: need tol > 0");
  if (c == 0.0) throw ConfigError("oscillatory_cutoff: need c != 0");
  return std::pow(q / (c * c * tol), 1.0 / (q + 1.0));
}

}  // namespace rs::quad
