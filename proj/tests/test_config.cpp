#include <doctest.h>

#include <string>

#include "subdiff/config.hpp"

using namespace subdiff;

TEST_CASE("minimal config fills defaults") {
  const RunConfig c = parse_config("[problem]\ndim = 1\nalpha = 0.5\n[datum]\nname = gaussian\n");
  CHECK(c.dim == 1);
  CHECK(c.alpha == 0.5);
  CHECK(c.datum() == Datum(1, Gaussian{}));
  CHECK(c.method == "convolution");
  CHECK(c.time_grid().size() == 9);
  CHECK(parse_config("") == c);
}

TEST_CASE("semantic errors") {
  try {
    parse_config("[problem]\nalpha = 1.0\n");
    FAIL("accepted alpha = 1");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("alpha must lie in (0,1)") != std::string::npos);
  }
  try {
    parse_config("[problem]\nalpha = 0.5\n[scale]\nspec = intermediate(pow(0.3),1,2)\n");
    FAIL("accepted a non-intermediate growth");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("0 < gamma < alpha/2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("[problem]\ndimension = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[extra]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[problem]\ndim = 4\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[run]\nmethod = l2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[datum]\nname = gaussian\nwidth = 3\n"), ConfigError);
}

TEST_CASE("parse errors carry a line number") {
  try {
    parse_config("[problem]\ndim = 1\n[broken\n");
    FAIL("accepted a broken section header");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("serialize and parse round trip") {
  const RunConfig c = parse_config(
      "[problem]\ndim = 3\nalpha = 0.3\n"
      "[datum]\nname = power_tail\namplitude = 2\nbeta = 5.5\n"
      "[scale]\nspec = \"intermediate(pow(0.1),1,2)\"\n"
      "[norm]\nspec = weak-pc\n"
      "[run]\ntimes = 1, 10, 0.1\ndecade_hi = 7\npower_tol = 0.03\n");
  const RunConfig back = parse_config(serialize_config(c));
  CHECK(back == c);
  CHECK(back.datum() == c.datum());
  CHECK(back.scale_spec() == ScaleSpec::parse("intermediate(pow(0.1),1,2)"));
  CHECK(back.norm_spec().weak);
}

TEST_CASE("config overrides experiment fields") {
  const RunConfig c = parse_config("[run]\ndecade_lo = 3\ndecade_hi = 4\nbound = 0.2\n");
  Experiment e;
  e.times = {1.0};
  const Experiment out = c.apply_to(e);
  CHECK(out.times.size() == 3);
  CHECK(out.check.bound == 0.2);
  CHECK(out.dim == e.dim);
}
