#include <doctest.h>

#include <cmath>
#include <numbers>

#include "subdiff/errors.hpp"
#include "subdiff/initial_data.hpp"

using namespace subdiff;

constexpr double kPi = std::numbers::pi;

TEST_CASE("masses") {
  CHECK(datum_mass(Datum(3, Gaussian{})) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(datum_mass(Datum(3, BallIndicator{1.0, 3.0 / (4.0 * kPi)})) == doctest::Approx(1.0).epsilon(1e-14));
  const double m = datum_mass(Datum(3, PowerTail{1.0, 5.0, 1.0}));
  CHECK(m > 0.0);
  CHECK(std::isfinite(m));
  CHECK(datum_mass(Datum(2, SmoothBump{1.0, 1.0})) > 0.0);
}

TEST_CASE("pointwise values") {
  const Datum ball(1, BallIndicator{1.0, 2.5});
  CHECK(datum_eval(ball, 0.5) == 2.5);
  CHECK(datum_eval(ball, 2.0) == 0.0);
  const Datum tail(3, PowerTail{1.0, 5.0, 1.0});
  CHECK(datum_eval(tail, 10.0) == doctest::Approx(1e-5).epsilon(1e-12));
  CHECK(std::isinf(tail.effective_radius()));
}

TEST_CASE("transforms") {
  CHECK(datum_radial_transform(Datum(1, Gaussian{}), 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  const double h = 0.7;
  const Datum ball(3, BallIndicator{1.0, h});
  CHECK(datum_radial_transform(ball, kPi) == doctest::Approx(h * 4.0 / kPi).epsilon(1e-12));
  for (const char* spec : {"gaussian(scale=2)", "ball_indicator(radius=1,mass=1)", "smooth_bump", "power_tail(beta=5)"}) {
    const Datum d = Datum::parse(3, spec);
    CHECK(datum_radial_transform(d, 0.0) == doctest::Approx(d.mass()).epsilon(1e-9));
  }
  const Datum bump(2, SmoothBump{1.0, 1.0});
  CHECK(datum_radial_transform(bump, 3.0) < datum_radial_transform(bump, 0.0));
}

TEST_CASE("parsing and validation") {
  const Datum d = Datum::parse(2, "ball_indicator(radius=2,height=3)");
  CHECK(std::get<BallIndicator>(d.variant()).height == 3.0);
  CHECK(Datum::parse(2, d.id()) == d);
  CHECK(Datum::parse(1, "gaussian").mass() == doctest::Approx(1.0));
  CHECK_THROWS_AS(Datum::parse(1, "cauchy"), DomainError);
  CHECK_THROWS_AS(Datum::parse(1, "gaussian(width=2)"), DomainError);
  CHECK_THROWS_AS(Datum(3, PowerTail{1.0, 2.5, 1.0}), DomainError);
  CHECK_THROWS_AS(Datum(2, Gaussian{-1.0, 1.0}), DomainError);
  const TailClass c = Datum(1, PowerTail{2.0, 3.0, 1.0}).tail_class();
  CHECK(c.kind == TailKind::exact_power);
  CHECK(c.beta == 3.0);
}
