#include <doctest.h>

#include <cmath>
#include <numbers>

#include "subdiff/quadrature.hpp"
#include "subdiff/special_functions.hpp"

using namespace subdiff;

TEST_CASE("order must lie strictly inside (0,1)") {
  CHECK_THROWS_AS(FractionalOrder(1.0), DomainError);
  CHECK_THROWS_AS(FractionalOrder(0.0), DomainError);
  CHECK(FractionalOrder(0.3).value() == 0.3);
}

TEST_CASE("recip_gamma") {
  CHECK(recip_gamma(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(recip_gamma(0.0) == 0.0);
  CHECK(recip_gamma(-3.0) == 0.0);
  CHECK(recip_gamma(0.5) == doctest::Approx(1.0 / std::sqrt(std::numbers::pi)).epsilon(1e-14));
  CHECK(recip_gamma(-0.5) == doctest::Approx(-0.5 / std::sqrt(std::numbers::pi)).epsilon(1e-14));
}

TEST_CASE("Mittag-Leffler on the negative axis") {
  CHECK(ml_neg(FractionalOrder(0.7), 0.0) == 1.0);
  CHECK(ml_neg(FractionalOrder(0.5), 1.0) == doctest::Approx(std::exp(1.0) * std::erfc(1.0)).epsilon(1e-13));
  CHECK(ml_neg_series(1.0, 2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));

  SUBCASE("closed form at alpha = 1/2") {
    const FractionalOrder a(0.5);
    for (double x = 0.0; x <= 10.0; x += 0.125) {
      CHECK(std::abs(ml_neg(a, x) - std::exp(x * x) * std::erfc(x)) < 1e-12);
    }
  }

  SUBCASE("series and integral agree across the threshold") {
    for (double alpha : {0.2, 0.5, 0.9}) {
      const double x0 = ml_series_threshold(alpha);
      for (double x : {0.5 * x0, 0.9 * x0, x0}) {
        CHECK(std::abs(ml_neg_series(alpha, x) - ml_neg_spectral(alpha, x)) < 1e-12);
      }
    }
  }

  SUBCASE("large argument follows the asymptotic expansion") {
    for (double alpha : {0.3, 0.6}) {
      const double x = 200.0;
      CHECK(ml_neg(FractionalOrder(alpha), x) ==
            doctest::Approx(ml_neg_asymptotic(alpha, x, 6)).epsilon(1e-9));
    }
  }

  SUBCASE("completely monotone") {
    const FractionalOrder a(0.8);
    double prev = 1.0;
    for (double x = 0.1; x < 50.0; x *= 1.3) {
      const double v = ml_neg(a, x);
      CHECK(v > 0.0);
      CHECK(v < prev);
      prev = v;
    }
  }

  CHECK_THROWS_AS(ml_neg(FractionalOrder(0.5), -1.0), DomainError);
}

TEST_CASE("Mainardi function") {
  const FractionalOrder a(0.5);
  CHECK(mainardi(a, 0.0) == doctest::Approx(1.0 / std::sqrt(std::numbers::pi)).epsilon(1e-14));
  CHECK(mainardi(a, 1.0) == doctest::Approx(std::exp(-0.25) / std::sqrt(std::numbers::pi)).epsilon(1e-12));
  for (double tau : {2.0, 5.0, 12.0}) {
    CHECK(mainardi(a, tau) == doctest::Approx(std::exp(-tau * tau / 4.0) / std::sqrt(std::numbers::pi)).epsilon(1e-10));
  }
  CHECK(std::abs(mainardi_series(0.7, 1.0) - mainardi_integral(0.7, 1.0)) < 1e-11);

  SUBCASE("moments") {
    auto f = [&](double tau) { return tau > 0.0 ? std::pow(tau, -0.5) * mainardi(a, tau) : 0.0; };
    quad::Options opts;
    opts.rel_tol = 1e-10;
    opts.max_intervals = 2000;
    // tau^{-1/2} singularity: substitute tau = s^2.
    auto g = [&](double s) { return 2.0 * s * f(s * s); };
    const double m = quad::adaptive(g, 0.0, 12.0, opts).value;
    CHECK(m == doctest::Approx(std::tgamma(0.5) / std::tgamma(0.75)).epsilon(1e-8));

    const double mass = quad::adaptive([&](double t) { return mainardi(a, t); }, 0.0, 40.0, opts).value;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
  }
  CHECK_THROWS_AS(mainardi(a, -0.1), DomainError);
}
