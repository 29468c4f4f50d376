#pragma once

#include <functional>

namespace rs::quad {

struct Options {
  double abs_tol = 1e-12;
  int max_depth = 48;
};

// Adaptive Simpson on [a, b]. Throws QuadratureError if the tolerance cannot
// be met within the depth budget or the integrand returns a non-finite value.
double integrate(const std::function<double(double)>& f, double a, double b,
                 Options opt = {});

// Splits [a, b] into chunks of at most `segment` and integrates each with a
// proportional share of the tolerance. Intended for oscillatory integrands:
// pass the half-period as the segment length.
double integrate_segmented(const std::function<double(double)>& f, double a,
                           double b, double segment, Options opt = {});

// int_0^c f for integrands that vanish like x^alpha (alpha > 0) at zero but
// have unbounded derivatives there; the substitution x = v^4 makes the
// transformed integrand smooth enough for the Simpson error estimate.
double integrate_from_zero(const std::function<double(double)>& f, double c,
                           Options opt = {});

// int_X^inf x^-q dx, q > 1.
double power_tail(double X, double q);

// int_X^inf cos(c x) x^-q dx and int_X^inf sin(c x) x^-q dx by two rounds of
// integration by parts; c != 0, q > 0. The truncation error of either is
// bounded by oscillatory_tail_bound.
double cos_power_tail(double c, double q, double X);
double sin_power_tail(double c, double q, double X);
double oscillatory_tail_bound(double c, double q, double X);

// Smallest X such that oscillatory_tail_bound(c, q, X) <= tol (monotone in X).
double oscillatory_cutoff(double c, double q, double tol);

}  // namespace rs::quad
