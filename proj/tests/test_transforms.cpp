#include <doctest.h>

#include <cmath>
#include <numbers>

#include "subdiff/errors.hpp"
#include "subdiff/transforms.hpp"

using namespace subdiff;

constexpr double kPi = std::numbers::pi;

TEST_CASE("radial grid invariants") {
  const RadialGrid g = RadialGrid::hybrid(20.0);
  double prev = 0.0;
  for (double x : g.nodes()) {
    CHECK(x > prev);
    prev = x;
  }
  for (double w : g.weights()) CHECK(w > 0.0);
  CHECK(g.integrate([](double r) { return r * r; }) == doctest::Approx(8000.0 / 3.0).epsilon(1e-13));
  CHECK(g.refined().nodes().size() == 2 * g.nodes().size());
}

TEST_CASE("surface areas and kernel zeros") {
  CHECK(surface_area(1) == 2.0);
  CHECK(surface_area(3) == doctest::Approx(4.0 * kPi));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * kPi / 3.0));
  CHECK(kernel_zero(3, 2) == doctest::Approx(2.0 * kPi));
  CHECK(std::abs(radial_kernel(2, bessel_j0_zero(1))) < 1e-13);
  CHECK_THROWS_AS(check_dimension(4), DomainError);
}

TEST_CASE("radial Fourier transform examples") {
  const RadialGrid g = RadialGrid::hybrid(30.0);
  auto gauss3 = [](double r) { return std::pow(4.0 * kPi, -1.5) * std::exp(-r * r / 4.0); };
  CHECK(radial_fourier(3, gauss3, 1.0, g) == doctest::Approx(std::exp(-1.0)).epsilon(1e-11));

  const RadialGrid unit = RadialGrid::from_breaks({0.0, 0.5, 1.0});
  auto one = [](double) { return 1.0; };
  CHECK(std::abs(radial_fourier(1, one, kPi, unit)) < 1e-13);
  CHECK(radial_fourier(3, one, 0.0, unit) == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-14));

  SUBCASE("round trip") {
    auto gauss2 = [](double r) { return std::exp(-r * r / 4.0) / (4.0 * kPi); };
    auto hat = [](double rho) { return std::exp(-rho * rho); };
    CHECK(inverse_radial_fourier(2, hat, 1.3, RadialGrid::hybrid(8.0)) ==
          doctest::Approx(gauss2(1.3)).epsilon(1e-11));
  }
}

TEST_CASE("oscillatory integral with slow algebraic decay") {
  // int_0^inf cos(x) / (1 + x^2) dx = pi / (2e)
  auto amp = [](double x) { return 1.0 / (1.0 + x * x); };
  const auto r = oscillatory_integral(1, amp, 1.0, {});
  CHECK(r.value == doctest::Approx(kPi / (2.0 * std::exp(1.0))).epsilon(1e-10));
  // int_0^inf sin(x)/x dx = pi/2 via the N=3 kernel with amplitude 1
  const auto s = oscillatory_integral(3, [](double) { return 1.0; }, 1.0, {});
  CHECK(s.value == doctest::Approx(kPi / 2.0).epsilon(1e-9));
}
