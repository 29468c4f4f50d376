#include <cmath>

#include "doctest.h"
#include "roughspde/errors.hpp"
#include "roughspde/quadrature.hpp"

using namespace rs;

TEST_SUITE("quadrature") {

TEST_CASE("polynomials and smooth integrands") {
  auto cubic = [](double x) { return x * x * x; };
  CHECK(quad::integrate(cubic, 0.0, 1.0) == doctest::Approx(0.25).epsilon(1e-14));

  auto quartic = [](double x) { return x * x * x * x; };
  CHECK(quad::integrate(quartic, 0.0, 2.0) ==
        doctest::Approx(32.0 / 5.0).epsilon(1e-12));

  auto s = [](double x) { return std::sin(x); };
  CHECK(quad::integrate(s, 0.0, M_PI) == doctest::Approx(2.0).epsilon(1e-12));

  // Degenerate interval.
  CHECK(quad::integrate(cubic, 1.0, 1.0) == 0.0);
}

TEST_CASE("segmented matches plain on an oscillatory integrand") {
  auto f = [](double x) { return std::cos(40.0 * x); };
  double exact = std::sin(400.0) / 40.0;
  double seg = quad::integrate_segmented(f, 0.0, 10.0, M_PI / 40.0);
  CHECK(seg == doctest::Approx(exact).epsilon(1e-10));
}

TEST_CASE("power tail") {
  // int_2^inf x^-2.5 dx = 2^-1.5 / 1.5
  CHECK(quad::power_tail(2.0, 2.5) ==
        doctest::Approx(std::pow(2.0, -1.5) / 1.5).epsilon(1e-14));
  CHECK_THROWS_AS(quad::power_tail(2.0, 1.0), ConfigError);
}

TEST_CASE("oscillatory tails: truncation error obeys the stated bound") {
  // cos/sin_power_tail are two-term integration-by-parts approximations of
  // int_X^inf; against exact quadrature of int_X^Y the identity
  //   approx(X) = int_X^Y + approx(Y)
  // must hold within bound(X) + bound(Y). The X values are chosen so a sign
  // or factor slip in either term would exceed the budget.
  for (auto [c, q] : {std::pair<double, double>{3.0, 1.6},
                      {2.0, 1.4},
                      {5.0, 0.6}}) {
    double X = 2.0, Y = 64.0;
    double budget = quad::oscillatory_tail_bound(c, q, X) +
                    quad::oscillatory_tail_bound(c, q, Y) + 1e-12;
    CAPTURE(c);
    CAPTURE(q);

    auto f = [&](double x) { return std::cos(c * x) * std::pow(x, -q); };
    double head = quad::integrate_segmented(f, X, Y, M_PI / c, {1e-13, 48});
    CHECK(std::abs(quad::cos_power_tail(c, q, X) -
                   (head + quad::cos_power_tail(c, q, Y))) <= budget);

    auto g = [&](double x) { return std::sin(c * x) * std::pow(x, -q); };
    double heads = quad::integrate_segmented(g, X, Y, M_PI / c, {1e-13, 48});
    CHECK(std::abs(quad::sin_power_tail(c, q, X) -
                   (heads + quad::sin_power_tail(c, q, Y))) <= budget);

    // and the bound decays like X^-(q+1)
    CHECK(quad::oscillatory_tail_bound(c, q, Y) <
          0.01 * quad::oscillatory_tail_bound(c, q, X));
  }

  // c = 0 degenerates to the monotone power tail
  CHECK(quad::cos_power_tail(0.0, 2.5, 2.0) == quad::power_tail(2.0, 2.5));
}

TEST_CASE("oscillatory cutoff reaches the requested tolerance") {
  double X = quad::oscillatory_cutoff(2.0, 1.4, 1e-6);
  CHECK(quad::oscillatory_tail_bound(2.0, 1.4, X) <= 1e-6);
  // and is not absurdly conservative
  CHECK(quad::oscillatory_tail_bound(2.0, 1.4, X / 4.0) > 1e-6);
}

TEST_CASE("non-finite integrand raises") {
  auto f = [](double x) { return x == 0.0 ? std::nan("") : 1.0; };
  CHECK_THROWS_AS(quad::integrate(f, -1.0, 1.0), QuadratureError);
}

TEST_CASE("endpoint singularity exhausts plain Simpson but not the substitution") {
  // x^0.4 is integrable with unbounded second derivative at zero: the panel
  // error near the endpoint shrinks slower than the tolerance budget.
  double H = 0.3;
  auto f = [&](double x) { return std::pow(x, 1.0 - 2.0 * H); };
  CHECK_THROWS_AS(quad::integrate(f, 0.0, 1.0, {1e-12, 48}), QuadratureError);

  double got = quad::integrate_from_zero(f, 1.0, {1e-12, 48});
  CHECK(got == doctest::Approx(1.0 / (2.0 - 2.0 * H)).epsilon(1e-11));

  // Smooth integrands pass through unchanged.
  auto g = [](double x) { return std::exp(-x); };
  CHECK(quad::integrate_from_zero(g, 2.0, {1e-12, 48}) ==
        doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-11));
}

}  // TEST_SUITE
