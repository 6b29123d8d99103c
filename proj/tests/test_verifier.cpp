#include <doctest.h>

#include <cmath>

#include "subdiff/verifier.hpp"

using namespace subdiff;

TEST_CASE("fit_rate") {
  const auto t = log_times(2, 7, 4);
  std::vector<double> v;
  for (double x : t) v.push_back(5.0 * std::pow(x, -0.35));
  const RateFit a = fit_rate(t, v);
  CHECK(a.power == doctest::Approx(-0.35).epsilon(1e-12));
  CHECK(a.r_squared == doctest::Approx(1.0).epsilon(1e-12));

  const auto t8 = log_times(2, 8, 4);
  std::vector<double> w;
  for (double x : t8) w.push_back(std::pow(x, -0.5) * std::log(x));
  const RateFit b = fit_rate(t8, w, true);
  CHECK(std::abs(b.power + 0.5) <= 0.02);
  REQUIRE(b.log_power.has_value());
  CHECK(std::abs(*b.log_power - 1.0) <= 0.1);

  const RateFit c = fit_rate(t, std::vector<double>(t.size(), 3.0));
  CHECK(std::abs(c.power) < 1e-12);
}

TEST_CASE("log_times") {
  const auto t = log_times(2, 4);
  REQUIRE(t.size() == 5);
  CHECK(t.front() == 100.0);
  CHECK(t.back() == doctest::Approx(1e4));
}

TEST_CASE("injecting u = 2 M Z measures ||M Z||") {
  Experiment e;
  e.dim = 1;
  e.order = FractionalOrder(0.5);
  e.datum = Datum(1, Gaussian{});
  e.scale = ScaleSpec::parse("characteristic(0,3)");
  e.norm = NormSpec::parse("p=2");
  e.comparand.kind = Comparand::Kind::mz;
  Experiment none = e;
  none.comparand.kind = Comparand::Kind::none;
  const auto table = cached_profile(1, e.order);
  for (double t : {1e2, 1e4}) {
    Snapshot mz;
    mz.dim = 1;
    mz.alpha = 0.5;
    mz.t = t;
    mz.radii = experiment_radii(e, t);
    for (double r : mz.radii) mz.values.push_back(fundamental_solution(*table, r, t));
    Snapshot twice = mz;
    for (double& v : twice.values) v *= 2.0;
    CHECK(measure_snapshot(e, twice) == doctest::Approx(measure_snapshot(none, mz)).epsilon(1e-14));
  }
}

TEST_CASE("error series is linear in the mass") {
  Experiment e = suite_for("V1").front();
  e.times = {1e2, 1e3};
  Experiment doubled = e;
  doubled.datum = Datum(e.dim, Gaussian{1.0, 2.0});
  const auto a = run_experiment(e);
  const auto b = run_experiment(doubled);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].measured > 0.0);
    CHECK(b[i].measured == doctest::Approx(2.0 * a[i].measured).epsilon(1e-9));
  }
}

TEST_CASE("characteristic rate of the kernel, N=1") {
  const Experiment e = rate_experiment(1, 0.5, Datum(1, Gaussian{0.1, 1.0}), ScaleSpec::parse("characteristic(1,2)"),
                                       NormSpec::parse("p=inf"), log_times(2, 6));
  const Verdict v = evaluate(e);
  CHECK(v.passed);
  REQUIRE(v.fit.has_value());
  CHECK(v.fit->power == doctest::Approx(-0.25).epsilon(0.08));
}

TEST_CASE("theorem checks") {
  SUBCASE("V5 with a gaussian datum") {
    const auto e = suite_for("V5");
    REQUIRE(e.size() == 1);
    const Verdict v = evaluate(e.front());
    CHECK(v.passed);
    CHECK(v.series.back().measured <= 0.1 * v.series.front().measured);
  }
  SUBCASE("potential far field is exact outside the support") {
    const auto e = suite_for("V9/potential");
    REQUIRE(e.size() == 1);
    const Verdict v = evaluate(e.front());
    CHECK(v.passed);
    for (const auto& p : v.series) CHECK(p.measured < 1e-10);
  }
  SUBCASE("negative control fails its check") {
    const Verdict v = evaluate(suite_for("NC6").front());
    CHECK_FALSE(v.check_met);
    CHECK(v.passed);
  }
}

TEST_CASE("suite lookup and hypotheses") {
  CHECK(suite_for("all").size() == standard_suite().size());
  CHECK(suite_for("V7").size() == 2);
  CHECK_THROWS_AS(suite_for("V99"), ConfigError);

  Experiment e = suite_for("V2").front();
  e.datum = Datum(e.dim, PowerTail{1.0, e.dim + 0.5, 1.0});
  CHECK_NOTHROW(check_hypotheses(e));
  e.dim = 1;
  e.datum = Datum(1, Gaussian{});
  CHECK_THROWS_AS(check_hypotheses(e), HypothesisError);

  Experiment short_fit = rate_experiment(1, 0.5, Datum(1, Gaussian{}), ScaleSpec::parse("compact(1)"),
                                         NormSpec::parse("p=inf"), log_times(2, 4));
  CHECK_THROWS_AS(check_hypotheses(short_fit), HypothesisError);

  Experiment v6 = suite_for("V6").front();
  v6.norm = NormSpec::parse("p=4");
  CHECK_THROWS_AS(check_hypotheses(v6), HypothesisError);
}

TEST_CASE("very fast threshold") {
  const auto table = cached_profile(1, FractionalOrder(0.5));
  const double mb = mu_beta(*table, 3.0);
  CHECK(mb == doctest::Approx(std::pow(0.5 * 2.0 / (2.0 * table->sigma_hat), 0.75)).epsilon(1e-14));
}
