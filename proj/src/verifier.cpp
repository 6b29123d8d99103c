#include "subdiff/verifier.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <tuple>

#include "subdiff/errors.hpp"
#include "subdiff/parallel.hpp"

namespace subdiff {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double g_at(const Experiment& e, double t) {
  if (e.scale.kind == ScaleKind::intermediate || e.scale.kind == ScaleKind::fast) {
    return e.scale.g(t, e.order.value());
  }
  return 1.0;
}

bool singular_comparand(const Experiment& e) {
  return e.dim >= 2 && !e.comparand.relative &&
         (e.comparand.kind == Comparand::Kind::mz || e.comparand.kind == Comparand::Kind::kappa_en);
}

}  // namespace

std::string Comparand::str() const {
  std::string s;
  switch (kind) {
    case Kind::none: return "none";
    case Kind::mz: s = "MZ"; break;
    case Kind::kappa_phi: s = fmt(factor) + "*kappa*Phi"; break;
    case Kind::kappa_en: s = fmt(factor) + "*M*kappa*E_N"; break;
    case Kind::constant: s = "constant(" + fmt(value) + ")"; break;
    case Kind::power_tail: s = "power_tail(" + fmt(amplitude) + "," + fmt(beta) + ")"; break;
  }
  return relative ? "relative:" + s : s;
}

std::string RateFit::str() const {
  std::string s = "t^" + fmt(power);
  if (log_power) s += " (log t)^" + fmt(*log_power);
  return s + " R2=" + fmt(r_squared);
}

double mu_beta(const ProfileTable& table, double beta) {
  const double a = table.alpha();
  if (!(beta > table.dim)) throw DomainError("mu_beta needs beta > N");
  if (!(table.sigma_hat > 0.0)) throw DomainError("profile table has no fitted tail rate");
  return std::pow(a * (beta - table.dim) / (2.0 * table.sigma_hat), 0.5 * (2.0 - a));
}

double log_centred_scale(const ProfileTable& table) {
  if (table.dim != 2) throw DomainError("log_centred_scale needs dim = 2");
  return 0.25 * std::exp(2.0 * table.kappa_slope / table.kappa + std::numbers::egamma);
}

std::vector<double> log_times(int lo_decade, int hi_decade, int per_decade) {
  if (hi_decade <= lo_decade || per_decade < 1) throw DomainError("log_times: empty decade range");
  std::vector<double> t;
  const int n = (hi_decade - lo_decade) * per_decade;
  for (int i = 0; i <= n; ++i) t.push_back(std::pow(10.0, lo_decade + static_cast<double>(i) / per_decade));
  return t;
}

void check_hypotheses(const Experiment& e) {
  const auto fail = [&](const std::string& why) { throw HypothesisError(e.id + ": " + why); };
  if (e.datum.dim() != e.dim) fail("datum dimension differs from experiment dimension");
  if (e.times.empty() && e.check.kind != Check::Kind::far_field) fail("empty time grid");
  for (std::size_t i = 1; i < e.times.size(); ++i) {
    if (!(e.times[i] > e.times[i - 1])) fail("time grid must be strictly increasing");
  }
  if (e.check.kind == Check::Kind::rate_fit && !e.times.empty() && e.times.back() < 1e4 * e.times.front()) {
    fail("rate fits need at least 4 decades");
  }
  try {
    e.scale.validate(e.order.value());
  } catch (const ConfigError& err) {
    fail(err.what());
  }
  const TailClass tc = e.datum.tail_class();
  const std::string& th = e.theorem;
  const auto need_dim = [&](bool ok, const char* what) {
    if (!ok) fail(std::string("theorem needs ") + what);
  };
  const auto need_scale = [&](ScaleKind k, const char* what) {
    if (e.scale.kind != k) fail(std::string("theorem is stated on ") + what);
  };
  if (th == "V2") {
    need_dim(e.dim >= 2, "N >= 2");
    if (tc.kind != TailKind::compact && !(tc.beta >= e.dim)) fail("datum must lie in D_N (|x|^N u0 bounded)");
  } else if (th == "V3") {
    need_dim(e.dim >= 3, "N >= 3");
    need_scale(ScaleKind::intermediate, "intermediate scales");
  } else if (th == "V4") {
    need_dim(e.dim == 2, "N = 2");
    need_scale(ScaleKind::intermediate, "intermediate scales");
  } else if (th == "V9" && e.check.kind == Check::Kind::far_field) {
    need_dim(e.dim == 3, "N = 3 for the far field of Phi");
  } else if (th == "V5" || th == "V9") {
    need_dim(e.dim == 1, "N = 1");
  } else if (th == "V6" || th == "NC6") {
    need_dim(e.dim == 3, "N = 3");
    need_scale(ScaleKind::compact, "compact sets");
    if (e.norm.weak || !(e.norm.p < 3.0)) fail("theorem needs a subcritical exponent p < 3");
  } else if (th == "V7") {
    need_dim(e.dim == 3, "N = 3");
    if (!e.norm.weak && e.norm.p != 3.0) fail("theorem needs the critical exponent (p = 3 or weak-pc)");
  } else if (th == "V8") {
    need_dim(e.dim == 2, "N = 2");
    need_scale(ScaleKind::compact, "compact sets");
  } else if (th == "V10") {
    if (tc.kind != TailKind::compact) fail("datum must have compact support");
  } else if (th == "V11") {
    if (tc.kind == TailKind::compact || !(tc.beta > e.dim) || std::isinf(tc.beta)) {
      fail("datum must lie in D_beta with finite beta > N");
    }
  } else if (th == "V12") {
    if (tc.kind != TailKind::exact_power) fail("datum needs an exact power tail");
    if (e.comparand.kind != Comparand::Kind::power_tail) fail("comparand must be the power tail");
  }
  if (e.method == Method::l1) fail("the L1 oracle is not a verification route");
}

std::vector<double> experiment_radii(const Experiment& e, double t) {
  const Region reg = region_at(e.scale, e.order.value(), t);
  if (reg.lo == 0.0 && singular_comparand(e)) return graded_radii(1e-6 * reg.hi, reg.hi, e.nodes);
  return uniform_radii(reg.lo, reg.hi, e.nodes);
}

Snapshot solve_snapshot(const Experiment& e, double t, const std::vector<double>& radii) {
  if (e.method == Method::spectral) return spectral_snapshot(e.datum, e.order, t, radii);
  return convolution_snapshot(e.datum, *cached_profile(e.dim, e.order), t, radii);
}

double measure_snapshot(const Experiment& e, const Snapshot& u) {
  const double t = u.t;
  const double alpha = e.order.value();
  const double g = g_at(e, t);
  const double pre = e.prefactor(t, alpha, g);
  const Comparand& c = e.comparand;
  std::shared_ptr<const ProfileTable> table;
  if (c.kind == Comparand::Kind::mz || c.kind == Comparand::Kind::kappa_phi || c.kind == Comparand::Kind::kappa_en) {
    table = cached_profile(e.dim, e.order);
  }
  const double mass = e.datum.mass();
  Snapshot diff = u;
  for (std::size_t i = 0; i < u.radii.size(); ++i) {
    const double r = u.radii[i];
    double ref = 0.0;
    switch (c.kind) {
      case Comparand::Kind::none: break;
      case Comparand::Kind::mz: ref = mass * fundamental_solution(*table, r, t); break;
      case Comparand::Kind::kappa_phi: ref = c.factor * table->kappa * newtonian_potential(e.datum, r); break;
      case Comparand::Kind::kappa_en: ref = c.factor * mass * table->kappa * laplace_kernel(e.dim, r); break;
      case Comparand::Kind::constant: ref = c.value; break;
      case Comparand::Kind::power_tail: ref = c.amplitude * std::pow(r, -c.beta); break;
    }
    const double v = pre * u.values[i];
    if (c.relative) {
      if (!(ref > 0.0)) throw DomainError(e.id + ": relative comparand vanishes at r=" + fmt(r));
      diff.values[i] = v / ref - 1.0;
    } else {
      diff.values[i] = v - ref;
    }
  }
  const Region reg = region_at(e.scale, alpha, t);
  return e.weight(t, alpha, g) * region_norm(diff, reg, e.norm);
}

std::vector<SeriesPoint> run_experiment(const Experiment& e) {
  check_hypotheses(e);
  std::vector<SeriesPoint> out(e.times.size());
  parallel_for(e.times.size(), [&](std::size_t i) {
    const double t = e.times[i];
    const Snapshot snap = solve_snapshot(e, t, experiment_radii(e, t));
    out[i] = {t, measure_snapshot(e, snap), 0.0};
  });
  return out;
}

RateFit fit_rate(const std::vector<double>& t, const std::vector<double>& v, bool with_log) {
  const std::size_t n = t.size();
  if (n != v.size() || n < 4) throw FitError("fit_rate needs at least 4 points");
  const int k = with_log ? 3 : 2;
  Eigen::MatrixXd a(n, k);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(v[i] > 0.0) || !std::isfinite(v[i])) throw FitError("fit_rate needs positive finite values");
    if (!(t[i] > 0.0) || (with_log && !(t[i] > 1.0))) throw FitError("fit_rate needs t > 1");
    a(i, 0) = 1.0;
    a(i, 1) = std::log(t[i]);
    if (with_log) a(i, 2) = std::log(std::log(t[i]));
    y(i) = std::log(v[i]);
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd res = y - a * c;
  RateFit f;
  f.intercept = c(0);
  f.power = c(1);
  if (with_log) f.log_power = c(2);
  const double ss_res = res.squaredNorm();
  const double ss_tot = (y.array() - y.mean()).square().sum();
  f.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
  std::map<int, std::pair<double, int>> by_decade;
  for (std::size_t i = 0; i < n; ++i) {
    auto& [sum, count] = by_decade[static_cast<int>(std::floor(std::log10(t[i]) + 1e-9))];
    sum += res(i) * res(i);
    ++count;
  }
  for (const auto& [dec, sc] : by_decade) f.decade_residuals.emplace_back(dec, std::sqrt(sc.first / sc.second));
  return f;
}

namespace {

bool decreasing_tail(const std::vector<SeriesPoint>& s) {
  const double start = s.back().t * 1e-4 * (1.0 - 1e-12);
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i - 1].t >= start && !(s[i].measured < s[i - 1].measured)) return false;
  }
  return true;
}

Verdict far_field(const Experiment& e) {
  Verdict v;
  double worst = 0.0;
  for (double x : e.probe_radii) {
    const double val = std::pow(x, e.dim - 2) * newtonian_potential(e.datum, x) / e.datum.mass();
    const double dev = std::abs(val - 1.0);
    worst = std::max(worst, dev);
    v.series.push_back({x, dev, 0.0});
  }
  v.check_met = worst <= e.check.bound;
  v.detail = "max | |x|^{N-2} Phi / M - 1 | = " + fmt(worst);
  v.threshold = "<= " + fmt(e.check.bound);
  v.law = "|x|^{N-2} Phi -> M";
  return v;
}

}  // namespace

Verdict evaluate(const Experiment& e) {
  check_hypotheses(e);
  Verdict v;
  if (e.check.kind == Check::Kind::far_field) {
    v = far_field(e);
  } else {
    v.series = run_experiment(e);
    const Check& ck = e.check;
    std::vector<double> ts, vs;
    for (const auto& p : v.series) {
      ts.push_back(p.t);
      vs.push_back(p.measured);
    }
    RateLaw expected;
    bool fit_log = ck.fit_log;
    if (ck.kind == Check::Kind::rate_fit) {
      expected = theoretical_rate(e.dim, e.order.value(), e.norm, e.scale);
      fit_log = fit_log || expected.log_power != 0.0 || expected.ratio_log_power != 0.0;
      v.law = expected.str();
    }
    try {
      v.fit = fit_rate(ts, vs, fit_log);
    } catch (const FitError&) {
      if (ck.kind == Check::Kind::rate_fit || ck.max_power) throw;
    }
    const double first = vs.front(), last = vs.back();
    const bool dec = decreasing_tail(v.series);
    switch (ck.kind) {
      case Check::Kind::to_zero:
      case Check::Kind::to_zero_log:
        v.check_met = dec && last <= ck.bound * first;
        v.threshold = "decreasing over last 4 decades and final/initial <= " + fmt(ck.bound);
        v.detail = "final/initial = " + fmt(last / first) + (dec ? "" : ", not decreasing");
        if (v.law.empty()) v.law = "-> 0";
        break;
      case Check::Kind::threshold:
        v.check_met = last <= ck.bound && (!ck.require_decrease || dec);
        v.threshold = "final <= " + fmt(ck.bound) + (ck.require_decrease ? " and decreasing" : "");
        v.detail = "final = " + fmt(last) + (dec ? "" : ", not decreasing");
        if (v.law.empty()) v.law = "-> 0";
        break;
      case Check::Kind::rate_fit: {
        const double dp = v.fit->power - expected.power;
        bool ok = std::abs(dp) <= ck.power_tol;
        v.threshold = "|power - " + fmt(expected.power) + "| <= " + fmt(ck.power_tol);
        v.detail = "fitted power " + fmt(v.fit->power);
        if (fit_log) {
          const double target = expected.log_power + expected.ratio_log_power;
          ok = ok && std::abs(*v.fit->log_power - target) <= ck.log_tol;
          v.threshold += ", |log power - " + fmt(target) + "| <= " + fmt(ck.log_tol);
          v.detail += ", log power " + fmt(*v.fit->log_power);
        }
        v.check_met = ok;
        // theoretical column: expected law through the first measured point
        const double g0 = g_at(e, ts.front());
        const double l0 = expected(ts.front(), e.order.value(), g0);
        for (auto& p : v.series) p.theoretical = first * expected(p.t, e.order.value(), g_at(e, p.t)) / l0;
        break;
      }
      case Check::Kind::far_field: break;
    }
    if (ck.max_power) {
      const bool ok = v.fit->power <= *ck.max_power;
      v.check_met = v.check_met && ok;
      v.threshold += ", fitted power <= " + fmt(*ck.max_power);
      v.detail += ", fitted power " + fmt(v.fit->power);
    }
  }
  v.id = e.id;
  v.theorem = e.theorem;
  v.expect_failure = e.expect_failure;
  v.passed = v.check_met != e.expect_failure;
  return v;
}

Experiment rate_experiment(int dim, double alpha, const Datum& d, const ScaleSpec& scale, const NormSpec& norm,
                           std::vector<double> times) {
  Experiment e;
  e.id = "rate/N" + std::to_string(dim) + "-" + scale.str() + "-" + norm.str();
  e.theorem = "rate";
  e.dim = dim;
  e.order = FractionalOrder(alpha);
  e.datum = d;
  e.scale = scale;
  e.norm = norm;
  e.times = std::move(times);
  e.check.kind = Check::Kind::rate_fit;
  e.check.power_tol = 0.02;
  if (const RateLaw law = theoretical_rate(dim, alpha, norm, scale); law.log_power != 0.0) {
    e.check.power_tol = 0.03;
    e.check.log_tol = 0.2;
  }
  return e;
}

std::vector<Experiment> standard_suite() {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr double alpha = 0.5;
  const FractionalOrder ord(alpha);
  std::vector<Experiment> s;
  const auto base = [&](std::string id, std::string theorem, int dim, Datum d, double a = 0.5) {
    Experiment e;
    e.id = std::move(id);
    e.theorem = std::move(theorem);
    e.dim = dim;
    e.order = FractionalOrder(a);
    e.datum = std::move(d);
    return e;
  };

  // V1: global L^p convergence to MZ in the self-similar normalization. The
  // singular core of MZ makes the N = 3, p = 2 error decay like t^{-alpha/4}.
  for (auto [dim, p, a] : std::vector<std::tuple<int, double, double>>{{1, kInf, alpha}, {2, 2.0, alpha}, {3, 2.0, 0.8}}) {
    Experiment e = base("V1/N" + std::to_string(dim) + "-" + NormSpec{false, p}.str(), "V1", dim,
                        Datum(dim, Gaussian{1.0, 1.0}), a);
    e.scale = ScaleSpec::parse("global(15)");
    e.norm = {false, p};
    e.comparand.kind = Comparand::Kind::mz;
    e.weight.power = 0.5 * a * dim * (1.0 - (std::isinf(p) ? 0.0 : 1.0 / p));
    e.times = log_times(2, 8);
    e.nodes = 160;
    s.push_back(e);
  }
  // V2: outside the characteristic ball, sup norm.
  for (int dim : {2, 3}) {
    Experiment e = base("V2/N" + std::to_string(dim), "V2", dim, Datum(dim, Gaussian{1.0, 1.0}));
    e.scale = ScaleSpec::parse("outer(1,15)");
    e.norm = {false, kInf};
    e.comparand.kind = Comparand::Kind::mz;
    e.weight.power = 0.5 * alpha * dim;
    e.times = log_times(2, 6);
    e.nodes = 160;
    s.push_back(e);
  }
  {  // V3: intermediate annuli, N = 3.
    Experiment e = base("V3", "V3", 3, Datum(3, Gaussian{0.1, 1.0}));
    e.scale = ScaleSpec::parse("intermediate(pow(0.05),1,2)");
    e.norm = {false, kInf};
    e.prefactor.power = alpha;
    e.comparand.kind = Comparand::Kind::kappa_en;
    e.weight.scale_power = 3.0 - 2.0;
    e.times = log_times(2, 8);
    s.push_back(e);
  }
  {  // V4: intermediate annuli, N = 2, logarithmic normalization.
    Experiment e = base("V4", "V4", 2, Datum(2, Gaussian{0.1, 1.0}));
    e.scale = ScaleSpec::parse("intermediate(pow(0.05),1,2)");
    e.norm = {false, kInf};
    e.prefactor.power = alpha;
    e.prefactor.ratio_log_power = -1.0;
    e.comparand.kind = Comparand::Kind::constant;
    e.comparand.value = e.datum.mass() * cached_profile(2, ord)->kappa;
    e.check.kind = Check::Kind::to_zero_log;
    e.check.bound = 0.35;
    e.times = log_times(2, 8);
    s.push_back(e);
  }
  {  // V5: N = 1 on compacts.
    Experiment e = base("V5", "V5", 1, Datum(1, Gaussian{1.0, 1.0}));
    e.scale = ScaleSpec::parse("compact(1)");
    e.norm = {false, kInf};
    e.prefactor.power = 0.5 * alpha;
    e.comparand.kind = Comparand::Kind::constant;
    e.comparand.value = e.datum.mass() * cached_profile(1, ord)->f_zero;
    e.times = log_times(1, 6);
    s.push_back(e);
  }
  {  // V6 and its negative control.
    Experiment e = base("V6", "V6", 3, Datum(3, SmoothBump{1.0, 1.0}));
    e.scale = ScaleSpec::parse("compact(1)");
    e.norm = {false, 2.0};
    e.prefactor.power = alpha;
    e.comparand.kind = Comparand::Kind::kappa_phi;
    e.times = log_times(2, 8);
    const double p = 2.0;
    e.check.max_power = -0.5 * alpha * (3.0 - 2.0) * p / (3.0 + p) + 0.05;
    s.push_back(e);
    Experiment nc = e;
    nc.id = "NC6";
    nc.theorem = "NC6";
    nc.comparand.factor = 2.0;
    nc.expect_failure = true;
    s.push_back(nc);
  }
  // V7: critical exponent on growing balls, weak and strong.
  for (bool weak : {true, false}) {
    Experiment e = base(weak ? "V7/weak-pc" : "V7/p3", "V7", 3, Datum(3, SmoothBump{1.0, 1.0}));
    e.scale = ScaleSpec::parse("intermediate(pow(0.05),0,1)");
    e.norm = weak ? NormSpec{true, 0.0} : NormSpec{false, 3.0};
    e.prefactor.power = alpha;
    e.comparand.kind = Comparand::Kind::kappa_phi;
    e.times = log_times(2, 8);
    s.push_back(e);
  }
  {  // V8: N = 2 at the origin scale, t^alpha / log t normalization.
    Experiment e = base("V8", "V8", 2, Datum(2, Gaussian{1.0, 1.0}));
    e.scale = ScaleSpec::parse("compact(1)");
    e.norm = {false, kInf};
    e.prefactor.power = alpha;
    e.prefactor.log_power = -1.0;
    e.comparand.kind = Comparand::Kind::constant;
    e.comparand.value = e.datum.mass() * cached_profile(2, ord)->kappa * 0.5 * alpha;
    e.check.kind = Check::Kind::to_zero_log;
    e.check.bound = 0.35;
    e.times = log_times(2, 8);
    s.push_back(e);
  }
  {  // V9: N = 1 constant limit on compacts and the far field of Phi.
    Experiment e = base("V9", "V9", 1, Datum(1, Gaussian{0.1, 1.0}));
    e.scale = ScaleSpec::parse("compact(1)");
    e.norm = {false, kInf};
    e.prefactor.power = 0.5 * alpha;
    e.comparand.kind = Comparand::Kind::constant;
    e.comparand.value = e.datum.mass() * cached_profile(1, ord)->f_zero;
    e.times = log_times(2, 8);
    s.push_back(e);
    Experiment f = base("V9/potential", "V9", 3, Datum::parse(3, "ball_indicator(radius=1,mass=2)"));
    f.check.kind = Check::Kind::far_field;
    f.check.bound = 1e-10;
    f.probe_radii = {1.5, 2.0, 5.0, 10.0, 100.0};
    s.push_back(f);
  }
  {  // V10: compact support, |u/(MZ) - 1| at the characteristic scale.
    Experiment e = base("V10", "V10", 1, Datum(1, BallIndicator{1.0, 1.0}));
    e.scale = ScaleSpec::parse("characteristic(1,5)");
    e.norm = {false, kInf};
    e.comparand.kind = Comparand::Kind::mz;
    e.comparand.relative = true;
    e.check.kind = Check::Kind::threshold;
    e.check.bound = 0.05;
    e.times = log_times(2, 6);
    s.push_back(e);
  }
  {  // V11 / V12: power tail beta = N + 2 inside and beyond mu_beta.
    const double beta = 3.0;
    const Datum d(1, PowerTail{1.0, beta, 1.0});
    const double mb = mu_beta(*cached_profile(1, ord), beta);
    Experiment e = base("V11", "V11", 1, d);
    e.scale.kind = ScaleKind::very_fast;
    e.scale.nu = 0.25 * mb;
    e.scale.mu = 0.5 * mb;
    e.norm = {false, kInf};
    e.comparand.kind = Comparand::Kind::mz;
    e.comparand.relative = true;
    e.times = log_times(2, 6);
    s.push_back(e);
    Experiment f = base("V12", "V12", 1, d);
    f.scale.kind = ScaleKind::very_fast;
    f.scale.nu = 3.0 * mb;
    f.scale.mu = 4.0 * mb;
    f.norm = {false, kInf};
    f.comparand.kind = Comparand::Kind::power_tail;
    f.comparand.amplitude = 1.0;
    f.comparand.beta = beta;
    f.comparand.relative = true;
    f.check.kind = Check::Kind::threshold;
    f.check.bound = 0.05;
    f.times = log_times(2, 6);
    s.push_back(f);
  }
  return s;
}

std::vector<Experiment> suite_for(const std::string& id) {
  std::vector<Experiment> out;
  for (auto& e : standard_suite()) {
    if (id == "all" || e.theorem == id || e.id == id) out.push_back(std::move(e));
  }
  if (out.empty()) throw ConfigError("unknown experiment id '" + id + "'");
  return out;
}

}  // namespace subdiff
