#include <doctest.h>

#include <cmath>
#include <numbers>

#include "subdiff/l1_oracle.hpp"

using namespace subdiff;

TEST_CASE("L1 weights") {
  const auto b = l1_weights(FractionalOrder(0.5), 4);
  CHECK(b[0] == 1.0);
  CHECK(b[1] == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-15));
  for (std::size_t j = 1; j < b.size(); ++j) CHECK(b[j] < b[j - 1]);
}

TEST_CASE("eigenmode against the Mittag-Leffler amplitude") {
  const FractionalOrder a(0.5);
  const double exact = ml_neg(a, 1.0);
  CHECK(exact == doctest::Approx(0.427584).epsilon(1e-6));
  CHECK(std::abs(solve_l1_eigenmode(a, 1.0, 1.0, 4096) - exact) <= 1e-3);

  std::vector<double> u0(64);
  for (int i = 0; i < 64; ++i) u0[i] = std::cos(2.0 * std::numbers::pi * i / 64.0);
  const auto u = solve_l1_periodic(u0, 2.0 * std::numbers::pi, a, 1.0, 512, 2.0);
  CHECK(u[0] == doctest::Approx(exact).epsilon(2e-3));
}

TEST_CASE("graded mesh gives order 2 - alpha") {
  const FractionalOrder a(0.5);
  const double exact = ml_neg(a, 1.0);
  const double e1 = std::abs(solve_l1_eigenmode(a, 1.0, 1.0, 256, 2.0) - exact);
  const double e2 = std::abs(solve_l1_eigenmode(a, 1.0, 1.0, 512, 2.0) - exact);
  const double target = std::pow(2.0, 1.5);
  CHECK(e1 / e2 > 0.7 * target);
  CHECK(e1 / e2 < 1.3 * target);
}

TEST_CASE("constant stays constant") {
  const auto u = solve_l1_periodic(std::vector<double>(32, 2.5), 1.0, FractionalOrder(0.4), 1.0, 50);
  for (double v : u) CHECK(v == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("alpha near one matches backward Euler for the heat equation") {
  const Datum d(1, Gaussian{});
  L1Grid g;
  g.order = FractionalOrder(0.99);
  g.r_trunc = 30.0;
  g.n_space = 300;
  g.t_final = 1.0;
  g.steps = 400;
  const Snapshot l1 = solve_l1(d, g, {1.0}).front();
  const Snapshot heat = solve_heat_backward_euler(d, g);
  double diff = 0.0, peak = 0.0;
  for (std::size_t i = 0; i < heat.values.size(); ++i) {
    diff = std::max(diff, std::abs(l1.values[i] - heat.values[i]));
    peak = std::max(peak, heat.values[i]);
  }
  CHECK(diff / peak <= 2e-2);
}

TEST_CASE("resource and truncation guards") {
  const Datum d(1, Gaussian{});
  L1Grid g;
  g.steps = 100000;
  g.n_space = 100000;
  CHECK_THROWS_AS(solve_l1(d, g, {1.0}), ResourceError);
  L1Grid narrow;
  narrow.r_trunc = 3.0;
  narrow.t_final = 100.0;
  narrow.steps = 10;
  narrow.n_space = 30;
  CHECK_THROWS_AS(solve_l1(d, narrow, {100.0}), DomainError);
}
