#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "subdiff/profile.hpp"

using namespace subdiff;

constexpr double kPi = std::numbers::pi;

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> r(n);
  for (int i = 0; i < n; ++i) r[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return r;
}

}  // namespace

TEST_CASE("profile anchors at alpha = 0.5") {
  const FractionalOrder a(0.5);
  const auto t1 = cached_profile(1, a);
  CHECK(t1->f_zero == doctest::Approx(1.0 / (2.0 * std::tgamma(0.75))).epsilon(1e-9));
  CHECK(eval_profile(*t1, 0.0) == t1->f_zero);
  CHECK(profile_mass(*t1) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(second_moment(*t1) == doctest::Approx(2.0 / std::tgamma(1.5)).epsilon(1e-6));

  const auto t3 = cached_profile(3, a);
  const double kappa = 1.0 / (4.0 * kPi * std::sqrt(kPi));
  CHECK(t3->kappa == doctest::Approx(kappa).epsilon(1e-4));
  CHECK(eval_profile(*t3, 1e-4) == doctest::Approx(kappa / 1e-4).epsilon(1e-3));
  CHECK(second_moment(*t3) == doctest::Approx(6.0 / std::tgamma(1.5)).epsilon(1e-6));

  const auto t2 = cached_profile(2, a);
  CHECK(t2->kappa == doctest::Approx(1.0 / (2.0 * kPi * std::sqrt(kPi))).epsilon(1e-4));
  CHECK(std::isinf(eval_profile(*t2, 0.0)));
}

TEST_CASE("cross-route agreement") {
  CHECK(profile_oracle_fourier(1, FractionalOrder(0.5), 0.0) ==
        doctest::Approx(1.0 / (2.0 * std::tgamma(0.75))).epsilon(1e-7));
  CHECK(profile_subordination(3, FractionalOrder(0.5), 1.0) ==
        doctest::Approx(profile_oracle_fourier(3, FractionalOrder(0.5), 1.0)).epsilon(1e-6));
  CHECK(profile_subordination(2, FractionalOrder(0.3), 0.5) ==
        doctest::Approx(profile_oracle_fourier(2, FractionalOrder(0.3), 0.5)).epsilon(1e-6));
}

TEST_CASE("heat-kernel limit") {
  ProfileOptions opts;
  opts.validate = false;
  const ProfileTable t = build_profile(1, FractionalOrder(0.99), opts);
  CHECK(second_moment(t) == doctest::Approx(2.0).epsilon(2e-2));
}

TEST_CASE("fundamental solution") {
  const auto t = cached_profile(1, FractionalOrder(0.5));
  CHECK(fundamental_solution(*t, 0.0, 16.0) == doctest::Approx(0.5 * t->f_zero).epsilon(1e-14));
  const auto t3 = cached_profile(3, FractionalOrder(0.5));
  for (double s : {1.0, 81.0, 1e4}) {
    const double w = std::pow(s, 0.25);
    CHECK(std::pow(s, 0.75) * fundamental_solution(*t3, w, s) ==
          doctest::Approx(fundamental_solution(*t3, 1.0, 1.0)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(fundamental_solution(*t, 1.0, 0.0), DomainError);
}

TEST_CASE("kappa estimate recovers an exact 1/r table") {
  const auto r = log_grid(1e-6, 10.0, 1000);
  std::vector<double> f;
  for (double x : r) f.push_back(0.37 / x);
  const ProfileTable t = ProfileTable::from_values(3, FractionalOrder(0.5), r, f);
  const KappaFit k = estimate_kappa(t);
  CHECK(k.kappa == doctest::Approx(0.37).epsilon(1e-10));
}

TEST_CASE("tail fit recovers an exact model") {
  const auto r = log_grid(1e-3, 12.0, 1500);
  std::vector<double> f;
  for (double x : r) f.push_back(3.0 * std::exp(-2.0 * std::pow(x, 4.0 / 3.0)));
  const ProfileTable t = ProfileTable::from_values(1, FractionalOrder(0.5), r, f);
  TailFitOptions opts;
  opts.power = 0.0;
  const TailFit fit = fit_tail(t, opts);
  CHECK(fit.kappa_hat == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(fit.sigma_hat == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("tail rate close to the saddle-point value") {
  for (double alpha : {0.3, 0.8}) {
    const auto t = cached_profile(2, FractionalOrder(alpha));
    CHECK(t->sigma_hat == doctest::Approx(tail_sigma_asymptotic(alpha)).epsilon(2e-3));
  }
}

TEST_CASE("shell integrals are consistent") {
  const auto t = cached_profile(3, FractionalOrder(0.5));
  const double a = 0.3, b = 2.7, c = 6.0;
  CHECK(shell_between(*t, a, b) + shell_between(*t, b, c) == doctest::Approx(shell_between(*t, a, c)).epsilon(1e-13));
  CHECK(shell_between(*t, a, b) == doctest::Approx(eval_shell(*t, b) - eval_shell(*t, a)).epsilon(1e-10));
  CHECK(eval_tail_shell(*t, 1.0) == doctest::Approx(eval_shell(*t, 1e3) - eval_shell(*t, 1.0)).epsilon(1e-10));
}

TEST_CASE("CSV round trip keeps values and constants") {
  const auto t = cached_profile(2, FractionalOrder(0.5));
  std::stringstream s;
  write_profile_csv(*t, s);
  const ProfileTable back = read_profile_csv(s);
  CHECK(back.dim == 2);
  CHECK(back.radii.size() == t->radii.size());
  CHECK(back.kappa == t->kappa);
  CHECK(back.sigma_hat == t->sigma_hat);
  for (double r : {1e-3, 0.7, 4.0}) CHECK(eval_profile(back, r) == doctest::Approx(eval_profile(*t, r)).epsilon(1e-14));

  std::stringstream bad("not,a,table\n1,2\n");
  CHECK_THROWS_AS(read_profile_csv(bad), DomainError);
}
