#include "subdiff/scales_norms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "subdiff/errors.hpp"
#include "subdiff/quadrature.hpp"
#include "subdiff/transforms.hpp"

namespace subdiff {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double v) {
  if (std::isinf(v)) return "inf";
  return shortest(v);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view s) {
  s = trim(s);
  if (s == "inf") return kInf;
  std::string str(s);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(str, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != str.size()) throw ConfigError("not a number: '" + str + "'");
  return v;
}

// Splits "name(a,b(c),d)" into name and top-level arguments.
std::pair<std::string, std::vector<std::string>> split_call(std::string_view s) {
  s = trim(s);
  const auto open = s.find('(');
  if (open == std::string_view::npos) return {std::string(s), {}};
  if (s.back() != ')') throw ConfigError("missing ')' in '" + std::string(s) + "'");
  std::vector<std::string> args;
  int depth = 0;
  std::string cur;
  for (char c : s.substr(open + 1, s.size() - open - 2)) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      args.emplace_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty() || !args.empty()) args.emplace_back(trim(cur));
  return {std::string(trim(s.substr(0, open))), args};
}

double log_t(double t) {
  if (!(t > 1.0)) throw DomainError("log-type scale needs t > 1");
  return std::log(t);
}

}  // namespace

// ---------------------------------------------------------------------------
// Specs

double GFunction::operator()(double t, double alpha) const {
  switch (family) {
    case Family::power: return std::pow(t, param);
    case Family::charlog: return std::pow(t, 0.5 * alpha) * std::pow(log_t(t), param);
    default: return t * std::pow(log_t(t), (2.0 - alpha) / alpha);
  }
}

std::string GFunction::str() const {
  switch (family) {
    case Family::power: return "pow(" + num(param) + ")";
    case Family::charlog: return "charlog(" + num(param) + ")";
    default: return "linlog";
  }
}

GFunction GFunction::parse(std::string_view s) {
  const auto [name, args] = split_call(s);
  if (name == "pow" && args.size() == 1) return {Family::power, parse_number(args[0])};
  if (name == "charlog" && args.size() == 1) return {Family::charlog, parse_number(args[0])};
  if (name == "linlog" && args.empty()) return {Family::linlog, 0.0};
  throw ConfigError("unknown g family '" + std::string(s) + "' (expected pow(gamma), charlog(theta) or linlog)");
}

std::string ScaleSpec::str() const {
  switch (kind) {
    case ScaleKind::compact: return "compact(" + num(mu) + ")";
    case ScaleKind::intermediate: return "intermediate(" + g.str() + "," + num(nu) + "," + num(mu) + ")";
    case ScaleKind::characteristic: return "characteristic(" + num(nu) + "," + num(mu) + ")";
    case ScaleKind::fast: return "fast(" + g.str() + "," + num(nu) + "," + num(mu) + ")";
    case ScaleKind::very_fast: return "very_fast(" + num(nu) + "," + num(mu) + ")";
    case ScaleKind::global: return "global(" + num(mu) + ")";
    default: return "outer(" + num(nu) + "," + num(mu) + ")";
  }
}

ScaleSpec ScaleSpec::parse(std::string_view s) {
  const auto [name, a] = split_call(s);
  ScaleSpec sc;
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (a.size() < lo || a.size() > hi) {
      throw ConfigError("scale '" + std::string(s) + "' has the wrong number of arguments");
    }
  };
  if (name == "compact") {
    need(1, 1);
    sc.kind = ScaleKind::compact;
    sc.mu = parse_number(a[0]);
  } else if (name == "intermediate" || name == "fast") {
    need(3, 3);
    sc.kind = name == "fast" ? ScaleKind::fast : ScaleKind::intermediate;
    sc.g = GFunction::parse(a[0]);
    sc.nu = parse_number(a[1]);
    sc.mu = parse_number(a[2]);
  } else if (name == "characteristic") {
    need(2, 2);
    sc.kind = ScaleKind::characteristic;
    sc.nu = parse_number(a[0]);
    sc.mu = parse_number(a[1]);
  } else if (name == "very_fast") {
    need(1, 2);
    sc.kind = ScaleKind::very_fast;
    sc.nu = parse_number(a[0]);
    sc.mu = a.size() == 2 ? parse_number(a[1]) : 2.0 * sc.nu;
  } else if (name == "global") {
    need(0, 1);
    sc.kind = ScaleKind::global;
    sc.mu = a.empty() ? 40.0 : parse_number(a[0]);
  } else if (name == "outer") {
    need(1, 2);
    sc.kind = ScaleKind::outer;
    sc.nu = parse_number(a[0]);
    sc.mu = a.size() == 2 ? parse_number(a[1]) : 40.0;
  } else {
    throw ConfigError("unknown scale '" + std::string(s) + "'");
  }
  if (!(sc.mu > 0.0) || sc.nu < 0.0 || (sc.kind != ScaleKind::compact && sc.kind != ScaleKind::global && !(sc.mu > sc.nu))) {
    throw ConfigError("scale '" + std::string(s) + "' needs 0 <= nu < mu");
  }
  return sc;
}

void ScaleSpec::validate(double alpha) const {
  using F = GFunction::Family;
  if (kind == ScaleKind::intermediate) {
    // g -> inf and g = o(t^{alpha/2})
    const bool ok = (g.family == F::power && g.param > 0.0 && g.param < 0.5 * alpha);
    if (!ok) {
      throw ConfigError("intermediate scale needs g = t^gamma with 0 < gamma < alpha/2; got " + g.str() +
                        " with alpha/2=" + num(0.5 * alpha));
    }
  }
  if (kind == ScaleKind::fast) {
    const bool ok = (g.family == F::charlog && g.param > 0.0) || g.family == F::linlog ||
                    (g.family == F::power && g.param > 0.5 * alpha);
    if (!ok) throw ConfigError("fast scale needs g(t) t^{-alpha/2} -> inf; got " + g.str());
  }
}

std::string NormSpec::str() const {
  if (weak) return "weak-pc";
  return "p=" + num(p);
}

NormSpec NormSpec::parse(std::string_view s) {
  s = trim(s);
  if (s == "weak-pc") return {true, 0.0};
  if (s.substr(0, 2) != "p=") throw ConfigError("norm must be 'p=<value>', 'p=inf' or 'weak-pc'; got '" + std::string(s) + "'");
  const double p = parse_number(s.substr(2));
  if (!(p >= 1.0)) throw ConfigError("norm exponent must satisfy p >= 1");
  return {false, p};
}

double RateLaw::operator()(double t, double alpha, double g) const {
  double v = std::pow(t, power);
  if (log_power != 0.0) v *= std::pow(std::log(t), log_power);
  if (scale_power != 0.0) v *= std::pow(g, scale_power);
  if (ratio_log_power != 0.0) v *= std::pow(std::abs(std::log(g * std::pow(t, -0.5 * alpha))), ratio_log_power);
  return v;
}

std::string RateLaw::str() const {
  std::string s = "t^" + num(power);
  if (log_power != 0.0) s += " (log t)^" + num(log_power);
  if (scale_power != 0.0) s += " g^" + num(scale_power);
  if (ratio_log_power != 0.0) s += " |log(g t^{-alpha/2})|^" + num(ratio_log_power);
  return s;
}

std::optional<double> critical_exponent(int dim) {
  check_dimension(dim);
  if (dim == 1) return std::nullopt;
  if (dim == 2) return kInf;
  return 3.0;
}

Region region_at(const ScaleSpec& sc, double alpha, double t) {
  if (!(t > 0.0)) throw DomainError("region_at: t must be positive");
  const double c = std::pow(t, 0.5 * alpha);
  Region r;
  switch (sc.kind) {
    case ScaleKind::compact: r = {0.0, sc.mu}; break;
    case ScaleKind::intermediate:
    case ScaleKind::fast: {
      const double g = sc.g(t, alpha);
      r = {sc.nu * g, sc.mu * g};
      break;
    }
    case ScaleKind::characteristic: r = {sc.nu * c, sc.mu * c}; break;
    case ScaleKind::very_fast: {
      const double l = c * std::pow(log_t(t), 0.5 * (2.0 - alpha));
      r = {sc.nu * l, sc.mu * l};
      break;
    }
    case ScaleKind::global: r = {0.0, sc.mu * c}; break;
    case ScaleKind::outer: r = {sc.nu * c, sc.mu * c}; break;
  }
  if (!(r.lo < r.hi)) throw DomainError("degenerate region at t=" + num(t) + ": [" + num(r.lo) + ", " + num(r.hi) + "]");
  return r;
}

RateLaw theoretical_rate(int dim, double alpha, const NormSpec& norm, const ScaleSpec& sc) {
  check_dimension(dim);
  if (norm.weak && dim != 3) throw DomainError("weak-pc norm needs dim = 3");
  const double inv_p = norm.weak ? 1.0 / 3.0 : (std::isinf(norm.p) ? 0.0 : 1.0 / norm.p);
  RateLaw law;
  switch (sc.kind) {
    case ScaleKind::characteristic:
    case ScaleKind::global:
    case ScaleKind::outer:
      if (norm.weak) throw DomainError("unsupported combination: weak-pc norm in the characteristic scale");
      law.power = -0.5 * alpha * dim * (1.0 - inv_p);
      return law;
    case ScaleKind::compact:
      if (dim >= 3) {
        law.power = -alpha;
      } else if (dim == 2) {
        law.power = -alpha;
        law.log_power = 1.0;
      } else {
        law.power = -0.5 * alpha;
      }
      return law;
    case ScaleKind::intermediate:
      if (dim >= 3) {
        law.power = -alpha;
        law.scale_power = 2.0 - dim * (1.0 - inv_p);
      } else if (dim == 2) {
        law.power = -alpha;
        law.scale_power = 2.0 * inv_p;
        law.ratio_log_power = 1.0;
      } else {
        law.power = -0.5 * alpha;
        law.scale_power = inv_p;
      }
      return law;
    default:
      throw DomainError("unsupported combination: no universal decay law in fast scales");
  }
}

// ---------------------------------------------------------------------------
// Interpolation

SnapshotInterpolant::SnapshotInterpolant(const Snapshot& snap) : x_(snap.radii), y_(snap.values) {
  const std::size_t n = x_.size();
  if (n < 4 || y_.size() != n) throw CoverageError("snapshot needs at least 4 nodes");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(x_[i] > x_[i - 1])) throw DomainError("snapshot radii must be strictly increasing");
  }
  // End slopes from the cubic through the four end nodes.
  auto end_slope = [&](std::size_t i0, std::size_t at) {
    double d = 0.0;
    for (std::size_t j = i0; j < i0 + 4; ++j) {
      double lj = 0.0;
      for (std::size_t k = i0; k < i0 + 4; ++k) {
        if (k == j) continue;
        double term = 1.0 / (x_[j] - x_[k]);
        for (std::size_t l = i0; l < i0 + 4; ++l) {
          if (l != j && l != k) term *= (x_[at] - x_[l]) / (x_[j] - x_[l]);
        }
        lj += term;
      }
      d += y_[j] * lj;
    }
    return d;
  };
  m_.assign(n, 0.0);
  m_[0] = end_slope(0, 0);
  m_[n - 1] = end_slope(n - 4, n - 1);
  if (n == 2) return;
  // C^2 spline slopes: h_i m_{i-1} + 2(h_{i-1}+h_i) m_i + h_{i-1} m_{i+1} = rhs.
  const std::size_t k = n - 2;
  std::vector<double> sub(k), diag(k), sup(k), rhs(k);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
    const double d0 = (y_[i] - y_[i - 1]) / h0, d1 = (y_[i + 1] - y_[i]) / h1;
    sub[i - 1] = h1;
    diag[i - 1] = 2.0 * (h0 + h1);
    sup[i - 1] = h0;
    rhs[i - 1] = 3.0 * (h1 * d0 + h0 * d1);
  }
  rhs[0] -= sub[0] * m_[0];
  rhs[k - 1] -= sup[k - 1] * m_[n - 1];
  for (std::size_t i = 1; i < k; ++i) {
    const double w = sub[i] / diag[i - 1];
    diag[i] -= w * sup[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  m_[k] = rhs[k - 1] / diag[k - 1];
  for (std::size_t i = k - 1; i-- > 0;) m_[i + 1] = (rhs[i] - sup[i] * m_[i + 2]) / diag[i];
}

std::size_t SnapshotInterpolant::cell(double r) const {
  auto it = std::upper_bound(x_.begin(), x_.end(), r);
  std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  return std::min(i, x_.size() - 2);
}

double SnapshotInterpolant::operator()(double r) const {
  if (r <= x_.front()) return y_.front();  // constant extension towards the origin
  if (r >= x_.back()) return y_.back();
  const std::size_t i = cell(r);
  const double h = x_[i + 1] - x_[i];
  const double s = (r - x_[i]) / h;
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y_[i] + (s3 - 2 * s2 + s) * h * m_[i] + (-2 * s3 + 3 * s2) * y_[i + 1] +
         (s3 - s2) * h * m_[i + 1];
}

std::vector<std::pair<double, double>> SnapshotInterpolant::monotone_pieces(double a, double b) const {
  std::vector<double> cuts{a, b};
  for (std::size_t i = cell(a); i + 1 < x_.size() && x_[i] < b; ++i) {
    const double x0 = x_[i], h = x_[i + 1] - x_[i];
    if (x0 > a) cuts.push_back(x0);
    // derivative of the Hermite cubic in s: A s^2 + B s + C
    const double y0 = y_[i], y1 = y_[i + 1], m0 = h * m_[i], m1 = h * m_[i + 1];
    const double A = 6 * y0 + 3 * m0 - 6 * y1 + 3 * m1;
    const double B = -6 * y0 - 4 * m0 + 6 * y1 - 2 * m1;
    const double C = m0;
    std::vector<double> roots;
    if (std::abs(A) < 1e-14 * (std::abs(B) + std::abs(C))) {
      if (B != 0.0) roots.push_back(-C / B);
    } else {
      const double disc = B * B - 4 * A * C;
      if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        roots.push_back((-B - sq) / (2 * A));
        roots.push_back((-B + sq) / (2 * A));
      }
    }
    for (double s : roots) {
      if (s > 0.0 && s < 1.0) cuts.push_back(x0 + s * h);
    }
    // sign changes of the value itself
    double prev = (*this)(std::max(x0, a));
    const int samples = 8;
    for (int j = 1; j <= samples; ++j) {
      double lo = x0 + h * (j - 1) / samples, hi = x0 + h * j / samples;
      const double v = (*this)(hi);
      if ((prev < 0.0) != (v < 0.0)) {
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          (((*this)(mid) < 0.0) == (prev < 0.0) ? lo : hi) = mid;
        }
        cuts.push_back(0.5 * (lo + hi));
      }
      prev = v;
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::remove_if(cuts.begin(), cuts.end(), [&](double c) { return c < a || c > b; }), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] > cuts[i]) out.emplace_back(cuts[i], cuts[i + 1]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Norms

namespace {

void check_coverage(const Snapshot& snap, Region region) {
  if (snap.radii.empty()) throw CoverageError("empty snapshot");
  const double front = snap.radii.front();
  const double back = snap.radii.back();
  const bool lo_ok = front <= region.lo * (1.0 + 1e-12) + 1e-300 || (region.lo == 0.0 && front <= 1e-2 * region.hi);
  if (!lo_ok || back < region.hi * (1.0 - 1e-12)) {
    throw CoverageError("region [" + num(region.lo) + ", " + num(region.hi) + "] exceeds snapshot grid [" +
                        num(front) + ", " + num(back) + "]");
  }
  const auto inside = std::count_if(snap.radii.begin(), snap.radii.end(),
                                    [&](double r) { return r >= region.lo && r <= region.hi; });
  if (inside < 64) {
    throw CoverageError("region holds " + std::to_string(inside) + " snapshot nodes; at least 64 needed");
  }
}

// Breakpoints: snapshot nodes inside the region, plus its ends.
std::vector<double> cells_in(const SnapshotInterpolant& s, Region region) {
  std::vector<double> b{region.lo};
  for (double x : s.radii())
    if (x > region.lo && x < region.hi) b.push_back(x);
  b.push_back(region.hi);
  return b;
}

}  // namespace

double lp_region_norm(const Snapshot& snap, Region region, double p) {
  if (!(p >= 1.0)) throw DomainError("lp_region_norm needs p >= 1");
  check_coverage(snap, region);
  const SnapshotInterpolant s(snap);
  const int n = snap.dim;
  const std::vector<double> b = cells_in(s, region);
  if (std::isinf(p)) {
    double best = 0.0, arg = region.lo;
    for (double x : b) {
      const double v = std::abs(s(x));
      if (v > best) {
        best = v;
        arg = x;
      }
    }
    // Golden-section refinement on the two cells adjacent to the maximizer.
    auto pos = std::lower_bound(b.begin(), b.end(), arg) - b.begin();
    double lo = b[std::max<std::ptrdiff_t>(pos - 1, 0)];
    double hi = b[std::min<std::ptrdiff_t>(pos + 1, static_cast<std::ptrdiff_t>(b.size()) - 1)];
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = std::abs(s(c)), fd = std::abs(s(d));
    for (int it = 0; it < 80 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
      if (fc > fd) {
        hi = d;
        d = c;
        fd = fc;
        c = hi - gr * (hi - lo);
        fc = std::abs(s(c));
      } else {
        lo = c;
        c = d;
        fc = fd;
        d = lo + gr * (hi - lo);
        fd = std::abs(s(d));
      }
    }
    return std::max({best, fc, fd});
  }
  const auto& rule = quad::gauss_legendre(16);
  std::vector<double> parts;
  for (std::size_t i = 0; i + 1 < b.size(); ++i) {
    parts.push_back(quad::gauss_panel(
        rule, [&](double r) { return std::pow(std::abs(s(r)), p) * std::pow(r, n - 1); }, b[i], b[i + 1]));
  }
  return std::pow(surface_area(n) * quad::pairwise_sum(parts), 1.0 / p);
}

double weak_pc_norm(const Snapshot& snap, Region region) {
  if (snap.dim != 3) throw DomainError("weak_pc_norm needs dim = 3");
  check_coverage(snap, region);
  const SnapshotInterpolant s(snap);
  const double pc = 3.0;
  const double unit = unit_ball_volume(3);
  const double first = std::max(region.lo, s.radii().front());
  const auto pieces = s.monotone_pieces(first, region.hi);
  // Constant extension on [lo, first) when the grid starts inside the region.
  const double head = first > region.lo ? std::abs(s(first)) : 0.0;

  auto measure = [&](double lambda) {
    double m = 0.0;
    if (first > region.lo && head >= lambda) m += unit * (std::pow(first, 3) - std::pow(region.lo, 3));
    for (const auto& [a, b] : pieces) {
      const double fa = std::abs(s(a)), fb = std::abs(s(b));
      double lo = a, hi = b;
      if (fa >= lambda && fb >= lambda) {
      } else if (fa < lambda && fb < lambda) {
        continue;
      } else {
        // exact crossing on a monotone piece
        double x0 = a, x1 = b;
        const bool decreasing = fa > fb;
        for (int it = 0; it < 100 && x1 - x0 > 1e-15 * x1; ++it) {
          const double mid = 0.5 * (x0 + x1);
          const bool above = std::abs(s(mid)) >= lambda;
          ((above == decreasing) ? x0 : x1) = mid;
        }
        const double c = 0.5 * (x0 + x1);
        if (decreasing) hi = c;
        else lo = c;
      }
      m += unit * (std::pow(hi, 3) - std::pow(lo, 3));
    }
    return m;
  };
  auto phi = [&](double lambda) { return lambda * std::pow(measure(lambda), 1.0 / pc); };

  std::vector<double> levels;
  if (head > 0.0) levels.push_back(head);
  for (const auto& [a, b] : pieces) {
    levels.push_back(std::abs(s(a)));
    levels.push_back(std::abs(s(b)));
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  levels.erase(std::remove(levels.begin(), levels.end(), 0.0), levels.end());
  if (levels.empty()) return 0.0;
  std::size_t best_i = 0;
  double best = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double v = phi(levels[i]);
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  // Between consecutive levels phi may peak in the interior.
  auto golden = [&](double lo, double hi) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = phi(c), fd = phi(d);
    for (int it = 0; it < 60; ++it) {
      if (fc > fd) {
        hi = d;
        d = c;
        fd = fc;
        c = hi - gr * (hi - lo);
        fc = phi(c);
      } else {
        lo = c;
        c = d;
        fc = fd;
        d = lo + gr * (hi - lo);
        fd = phi(d);
      }
    }
    return std::max(fc, fd);
  };
  const double below = best_i > 0 ? levels[best_i - 1] : 0.0;
  best = std::max(best, golden(below, levels[best_i]));
  if (best_i + 1 < levels.size()) best = std::max(best, golden(levels[best_i], levels[best_i + 1]));
  return best;
}

double region_norm(const Snapshot& snap, Region region, const NormSpec& norm) {
  return norm.weak ? weak_pc_norm(snap, region) : lp_region_norm(snap, region, norm.p);
}

}  // namespace subdiff
