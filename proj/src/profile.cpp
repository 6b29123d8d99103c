#include "subdiff/profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "subdiff/errors.hpp"
#include "subdiff/quadrature.hpp"
#include "subdiff/transforms.hpp"

namespace subdiff {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kExpCut = 745.0;

// Fixed composite Gauss-Legendre grid in u = ln tau carrying the
// subordination weights w * tau * M(tau) * (4 pi tau)^{-N/2}.
class SubordinationGrid {
 public:
  SubordinationGrid(int dim, double alpha, double width, int order) {
    const double q = 1.0 / (1.0 - alpha);
    const double b = (1.0 - alpha) * std::pow(alpha, alpha / (1.0 - alpha));
    const double u_hi = std::log(kExpCut / b) / q + 0.5;
    const double u_lo = -80.0;
    const int panels = static_cast<int>(std::ceil((u_hi - u_lo) / width));
    const auto& rule = quad::gauss_legendre(order);
    const FractionalOrder ord(alpha);
    const double h = (u_hi - u_lo) / panels;
    for (int p = 0; p < panels; ++p) {
      const double a = u_lo + p * h;
      for (int i = 0; i < order; ++i) {
        const double u = a + 0.5 * h * (rule.nodes[i] + 1.0);
        const double tau = std::exp(u);
        const double m = mainardi(ord, tau);
        if (m == 0.0) continue;
        const double c = 0.5 * h * rule.weights[i] * tau * m * std::pow(4.0 * kPi * tau, -0.5 * dim);
        tau_.push_back(tau);
        inv4tau_.push_back(0.25 / tau);
        coef_.push_back(c);
      }
    }
  }

  double operator()(double xi) const {
    const double x2 = xi * xi;
    // Gaussian factor underflows for tau < xi^2 / (4 * 745).
    const auto start = std::lower_bound(tau_.begin(), tau_.end(), x2 / (4.0 * kExpCut));
    double sum = 0.0;
    for (auto j = static_cast<std::size_t>(start - tau_.begin()); j < tau_.size(); ++j) {
      sum += coef_[j] * std::exp(-x2 * inv4tau_[j]);
    }
    return sum;
  }

 private:
  std::vector<double> tau_;
  std::vector<double> inv4tau_;
  std::vector<double> coef_;
};

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
};

LineFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

double log_step(const ProfileTable& t) {
  return std::log(t.radii[1] / t.radii[0]);
}

// Cubic Hermite in (ln r, ln F) on cell i with Fritsch-Carlson limiting.
double hermite_cell(const ProfileTable& t, std::size_t i, double s, double h) {
  const double p0 = std::log(t.values[i]);
  const double p1 = std::log(t.values[i + 1]);
  double m0 = t.log_slopes[i] * h;
  double m1 = t.log_slopes[i + 1] * h;
  const double d = p1 - p0;
  if (d == 0.0) {
    m0 = m1 = 0.0;
  } else {
    if (m0 * d < 0.0) m0 = 0.0;
    if (m1 * d < 0.0) m1 = 0.0;
    const double a = m0 / d, b = m1 / d;
    const double r2 = a * a + b * b;
    if (r2 > 9.0) {
      const double k = 3.0 / std::sqrt(r2);
      m0 *= k;
      m1 *= k;
    }
  }
  const double s2 = s * s, s3 = s2 * s;
  const double v = (2 * s3 - 3 * s2 + 1) * p0 + (s3 - 2 * s2 + s) * m0 + (-2 * s3 + 3 * s2) * p1 +
                   (s3 - s2) * m1;
  return std::exp(v);
}

double near_patch(const ProfileTable& t, double r) {
  const double r0 = t.radii.front();
  const double f0 = t.values.front();
  switch (t.dim) {
    case 1: return t.f_zero + (f0 - t.f_zero) * r / r0;
    case 2: return f0 + t.kappa * std::log(r0 / r);
    default: return (t.kappa + (r0 * f0 - t.kappa) * r / r0) / r;
  }
}

double far_patch(const ProfileTable& t, double r) {
  const double rl = t.radii.back();
  const double fl = t.values.back();
  if (t.sigma_hat > 0.0) {
    return fl * std::pow(r / rl, t.tail_power) *
           std::exp(-t.sigma_hat * (std::pow(r, t.tail_exponent) - std::pow(rl, t.tail_exponent)));
  }
  return fl * std::pow(r / rl, t.log_slopes.back());
}

// Integral of F(r) r^k over [a, b] inside the table, by 8-point Gauss on
// each cell in ln r.
double table_moment(const ProfileTable& t, int k) {
  const auto& rule = quad::gauss_legendre(8);
  const double h = log_step(t);
  std::vector<double> cells;
  cells.reserve(t.radii.size());
  for (std::size_t i = 0; i + 1 < t.radii.size(); ++i) {
    const double v0 = std::log(t.radii[i]);
    double sum = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      const double s = 0.5 * (rule.nodes[j] + 1.0);
      const double v = v0 + s * h;
      sum += rule.weights[j] * hermite_cell(t, i, s, h) * std::exp((k + 1) * v);
    }
    cells.push_back(0.5 * h * sum);
  }
  // Near-origin piece [0, r0] from the patch.
  const double r0 = t.radii.front();
  cells.push_back(quad::gauss_panel(rule, [&](double r) { return near_patch(t, r) * std::pow(r, k); }, 0.0, r0));
  return quad::pairwise_sum(cells);
}

void fill_derived(ProfileTable& t) {
  const std::size_t n = t.radii.size();
  if (n < 8) throw DomainError("profile table needs at least 8 nodes");
  const double h = log_step(t);
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(std::log(t.radii[i] / t.radii[i - 1]) - h) > 1e-9 * std::max(1.0, h) + 1e-12) {
      throw DomainError("profile table radii must be log-uniform");
    }
  }
  for (double v : t.values) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("profile values must be positive and finite");
  }
  std::vector<double> lf(n);
  for (std::size_t i = 0; i < n; ++i) lf[i] = std::log(t.values[i]);
  t.log_slopes.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double d;
    if (i >= 2 && i + 2 < n) {
      d = (lf[i - 2] - 8 * lf[i - 1] + 8 * lf[i + 1] - lf[i + 2]) / 12.0;
    } else if (i < 2) {
      d = (-25 * lf[i] + 48 * lf[i + 1] - 36 * lf[i + 2] + 16 * lf[i + 3] - 3 * lf[i + 4]) / 12.0;
    } else {
      d = (25 * lf[i] - 48 * lf[i - 1] + 36 * lf[i - 2] - 16 * lf[i - 3] + 3 * lf[i - 4]) / 12.0;
    }
    t.log_slopes[i] = d / h;
  }
}

void fill_shell(ProfileTable& t) {
  const auto& rule = quad::gauss_legendre(8);
  const double h = log_step(t);
  const std::size_t n = t.radii.size();
  t.shell.assign(n, 0.0);
  t.tail_shell.assign(n, 0.0);
  const double r0 = t.radii.front();
  t.shell[0] = quad::gauss_panel(rule, [&](double r) { return near_patch(t, r) * r; }, 0.0, r0);
  std::vector<double> cells(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double v0 = std::log(t.radii[i]);
    double sum = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      const double s = 0.5 * (rule.nodes[j] + 1.0);
      sum += rule.weights[j] * hermite_cell(t, i, s, h) * std::exp(2.0 * (v0 + s * h));
    }
    cells[i] = 0.5 * h * sum;
    t.shell[i + 1] = t.shell[i] + cells[i];
  }
  for (std::size_t i = n - 1; i-- > 0;) t.tail_shell[i] = t.tail_shell[i + 1] + cells[i];
  t.shell_cells = std::move(cells);
}

// int of F r dr over the part [s0, s1] of cell i (unit cell coordinates).
double cell_partial(const ProfileTable& t, std::size_t i, double s0, double s1) {
  const auto& rule = quad::gauss_legendre(8);
  const double h = log_step(t);
  const double v0 = std::log(t.radii[i]);
  const double len = s1 - s0;
  double sum = 0.0;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    const double s = s0 + 0.5 * len * (rule.nodes[j] + 1.0);
    sum += rule.weights[j] * hermite_cell(t, i, s, h) * std::exp(2.0 * (v0 + s * h));
  }
  return 0.5 * len * h * sum;
}

double near_model(const ProfileTable& t, double r) {
  switch (t.dim) {
    case 1: return t.f_zero + t.kappa_slope * r;
    case 2: return t.kappa * (-std::log(r)) + t.kappa_slope;
    default: return (t.kappa + t.kappa_slope * r) / r;
  }
}

double tail_model(const ProfileTable& t, double r) {
  return t.kappa_hat * std::pow(r, t.tail_power) * std::exp(-t.sigma_hat * std::pow(r, t.tail_exponent));
}

void find_patch_radii(ProfileTable& t) {
  t.r_inner = t.radii.front();
  for (std::size_t i = 0; i < t.radii.size(); ++i) {
    const double r = t.radii[i];
    if (std::abs(near_model(t, r) / t.values[i] - 1.0) > 1e-3) break;
    t.r_inner = r;
  }
  t.r_outer = t.radii.back();
  for (std::size_t i = t.radii.size(); i-- > 0;) {
    const double r = t.radii[i];
    if (r < 1.0 || std::abs(tail_model(t, r) / t.values[i] - 1.0) > 1e-3) break;
    t.r_outer = r;
  }
}

}  // namespace

double laplace_kernel(int dim, double xi) {
  switch (dim) {
    case 2: return -std::log(std::abs(xi));
    case 3: return 1.0 / std::abs(xi);
    default: throw DomainError("Laplace kernel defined here for N = 2, 3 only");
  }
}

double tail_sigma_asymptotic(double alpha) {
  return 0.5 * (2.0 - alpha) * std::pow(0.5 * alpha, alpha / (2.0 - alpha));
}

ProfileTable ProfileTable::from_values(int dim, FractionalOrder order, std::vector<double> radii,
                                       std::vector<double> values) {
  check_dimension(dim);
  if (radii.size() != values.size()) throw DomainError("radii and values differ in length");
  ProfileTable t;
  t.dim = dim;
  t.order = order;
  t.radii = std::move(radii);
  t.values = std::move(values);
  fill_derived(t);
  if (dim == 1) t.f_zero = t.values.front();
  fill_shell(t);
  return t;
}

ProfileTable build_profile(int dim, FractionalOrder order, const ProfileOptions& opts) {
  check_dimension(dim);
  const double alpha = order.value();
  const SubordinationGrid grid(dim, alpha, opts.panel_width, opts.order);

  const double sigma = tail_sigma_asymptotic(alpha);
  const double r_guess = std::pow(std::log(1.0 / opts.tail_floor) / sigma, 0.5 * (2.0 - alpha)) * 1.2;
  const int max_nodes = static_cast<int>(std::ceil(std::log(r_guess / opts.r_min) / opts.log_step)) + 1;
  std::vector<double> radii, values;
  for (int i = 0; i < max_nodes; ++i) {
    const double r = opts.r_min * std::exp(i * opts.log_step);
    const double f = grid(r);
    if (!(f >= opts.tail_floor)) break;
    radii.push_back(r);
    values.push_back(f);
  }
  ProfileTable t = ProfileTable::from_values(dim, order, std::move(radii), std::move(values));
  if (dim == 1) {
    t.f_zero = grid(0.0);
    std::vector<double> x, y;
    for (std::size_t i = 0; i < t.radii.size() && t.radii[i] <= 1e-2; ++i) {
      if (t.radii[i] >= 1e-5) {
        x.push_back(t.radii[i]);
        y.push_back(t.values[i] - t.f_zero);
      }
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxy += x[i] * y[i];
      sxx += x[i] * x[i];
    }
    t.kappa_slope = sxy / sxx;
  } else {
    const KappaFit kf = estimate_kappa(t);
    t.kappa = kf.kappa;
    t.kappa_slope = kf.slope;
    t.kappa_residual = kf.residual;
  }
  const TailFit tf = fit_tail(t);
  t.kappa_hat = tf.kappa_hat;
  t.sigma_hat = tf.sigma_hat;
  t.tail_power = tf.power;
  t.tail_exponent = tf.exponent;
  t.tail_r_squared = tf.r_squared;
  fill_shell(t);
  find_patch_radii(t);

  if (opts.validate) {
    for (double r : {0.5, 2.0}) {
      const double a = eval_profile(t, r);
      const double b = profile_oracle_fourier(dim, order, r);
      if (std::abs(a - b) > opts.validate_tol * std::abs(b)) {
        std::ostringstream msg;
        msg << "profile cross-route check failed at r=" << r << ": subordination " << a
            << " vs Fourier " << b;
        throw ToleranceError(msg.str());
      }
    }
  }
  return t;
}

std::shared_ptr<const ProfileTable> cached_profile(int dim, FractionalOrder order) {
  static std::mutex mu;
  static std::map<std::pair<int, double>, std::shared_ptr<const ProfileTable>> cache;
  const auto key = std::make_pair(dim, order.value());
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto table = std::make_shared<const ProfileTable>(build_profile(dim, order));
  std::lock_guard lock(mu);
  return cache.emplace(key, std::move(table)).first->second;
}

double eval_profile(const ProfileTable& t, double r) {
  if (!(r >= 0.0)) throw DomainError("eval_profile: r must be nonnegative");
  if (r == 0.0) {
    return t.dim == 1 ? t.f_zero : std::numeric_limits<double>::infinity();
  }
  if (r < t.radii.front()) return near_patch(t, r);
  if (r >= t.radii.back()) return r == t.radii.back() ? t.values.back() : far_patch(t, r);
  const double h = log_step(t);
  const double x = std::log(r / t.radii.front()) / h;
  auto i = static_cast<std::size_t>(x);
  if (i + 1 >= t.radii.size()) i = t.radii.size() - 2;
  return hermite_cell(t, i, x - static_cast<double>(i), h);
}

double eval_shell(const ProfileTable& t, double eta) {
  if (!(eta > 0.0)) return 0.0;
  const double r0 = t.radii.front();
  const auto& rule = quad::gauss_legendre(8);
  if (eta <= r0) {
    return quad::gauss_panel(rule, [&](double r) { return near_patch(t, r) * r; }, 0.0, eta);
  }
  if (eta >= t.radii.back()) {
    // Remaining tail mass is below the table floor.
    return t.shell.back();
  }
  const double h = log_step(t);
  const double x = std::log(eta / r0) / h;
  auto i = static_cast<std::size_t>(x);
  if (i + 1 >= t.radii.size()) i = t.radii.size() - 2;
  const double s_end = x - static_cast<double>(i);
  const double v0 = std::log(t.radii[i]);
  double sum = 0.0;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    const double s = 0.5 * s_end * (rule.nodes[j] + 1.0);
    sum += rule.weights[j] * hermite_cell(t, i, s, h) * std::exp(2.0 * (v0 + s * h));
  }
  return t.shell[i] + 0.5 * s_end * h * sum;
}

namespace {

// Cell index and unit offset of eta inside the table range.
std::pair<std::size_t, double> locate(const ProfileTable& t, double eta) {
  const double x = std::log(eta / t.radii.front()) / log_step(t);
  auto i = static_cast<std::size_t>(x);
  if (i + 1 >= t.radii.size()) i = t.radii.size() - 2;
  return {i, std::min(x - static_cast<double>(i), 1.0)};
}

}  // namespace

double eval_tail_shell(const ProfileTable& t, double eta) {
  if (!(eta > t.radii.front())) return t.tail_shell.front() + (t.shell.front() - eval_shell(t, eta));
  if (eta >= t.radii.back()) return 0.0;
  const auto [i, s] = locate(t, eta);
  return t.tail_shell[i + 1] + cell_partial(t, i, s, 1.0);
}

double shell_between(const ProfileTable& t, double a, double b) {
  if (!(b > a)) return 0.0;
  const double r0 = t.radii.front();
  if (a <= r0) return eval_shell(t, b) - eval_shell(t, a);
  b = std::min(b, t.radii.back());
  if (!(b > a)) return 0.0;
  const auto [ia, sa] = locate(t, a);
  const auto [ib, sb] = locate(t, b);
  if (ia == ib) return cell_partial(t, ia, sa, sb);
  double sum = cell_partial(t, ia, sa, 1.0) + cell_partial(t, ib, 0.0, sb);
  if (ib - ia <= 64) {
    for (std::size_t k = ia + 1; k < ib; ++k) sum += t.shell_cells[k];
  } else if (t.shell[ia + 1] > 0.5 * t.shell.back()) {
    sum += t.tail_shell[ia + 1] - t.tail_shell[ib];
  } else {
    sum += t.shell[ib] - t.shell[ia + 1];
  }
  return sum;
}

double fundamental_solution(const ProfileTable& t, double x_norm, double time) {
  if (!(time > 0.0)) throw DomainError("fundamental_solution: t must be positive");
  const double alpha = t.alpha();
  return std::pow(time, -0.5 * alpha * t.dim) * eval_profile(t, x_norm * std::pow(time, -0.5 * alpha));
}

KappaFit estimate_kappa(const ProfileTable& t, double lo, double hi) {
  if (t.dim < 2) throw DomainError("estimate_kappa requires dim >= 2");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < t.radii.size(); ++i) {
    const double r = t.radii[i];
    if (r < lo || r > hi) continue;
    if (t.dim == 3) {
      x.push_back(r);
      y.push_back(r * t.values[i]);
    } else {
      x.push_back(-std::log(r));
      y.push_back(t.values[i]);
    }
  }
  if (x.size() < 3) throw FitError("estimate_kappa: fewer than 3 nodes in the fit window");
  const LineFit lf = least_squares_line(x, y);
  KappaFit out;
  if (t.dim == 3) {
    out.kappa = lf.intercept;
    out.slope = lf.slope;
  } else {
    out.kappa = lf.slope;
    out.slope = lf.intercept;
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double model = lf.intercept + lf.slope * x[i];
    out.residual = std::max(out.residual, std::abs(model - y[i]) / std::abs(y[i]));
  }
  if (out.residual > 1e-3) {
    throw FitError("estimate_kappa: linear model residual " + shortest(out.residual) +
                   " exceeds 1e-3");
  }
  return out;
}

TailFit fit_tail(const ProfileTable& t, const TailFitOptions& opts) {
  const double alpha = t.alpha();
  TailFit out;
  out.exponent = opts.exponent.value_or(2.0 / (2.0 - alpha));
  out.power = opts.power.value_or(-t.dim * (1.0 - alpha) / (2.0 - alpha));
  out.lo = opts.lo;
  out.hi = opts.hi > 0.0 ? opts.hi : t.radii.back();
  std::vector<double> x, y, lnf;
  for (std::size_t i = 0; i < t.radii.size(); ++i) {
    const double r = t.radii[i];
    if (r < out.lo || r > out.hi) continue;
    x.push_back(-std::pow(r, out.exponent));
    lnf.push_back(std::log(t.values[i]));
    y.push_back(lnf.back() - out.power * std::log(r));
  }
  if (x.size() < 4) throw FitError("fit_tail: fewer than 4 nodes in the fit window");
  const LineFit lf = least_squares_line(x, y);
  out.kappa_hat = std::exp(lf.intercept);
  out.sigma_hat = lf.slope;
  double mean = 0.0;
  for (double v : lnf) mean += v;
  mean /= static_cast<double>(lnf.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (lf.intercept + lf.slope * x[i]);
    ss_res += e * e;
    ss_tot += (lnf[i] - mean) * (lnf[i] - mean);
  }
  out.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  out.rms_residual = std::sqrt(ss_res / static_cast<double>(x.size()));
  if (out.r_squared < 0.999) {
    throw FitError("fit_tail: R^2 = " + shortest(out.r_squared) + " below 0.999");
  }
  return out;
}

double profile_mass(const ProfileTable& t) { return surface_area(t.dim) * table_moment(t, t.dim - 1); }

double second_moment(const ProfileTable& t) { return surface_area(t.dim) * table_moment(t, t.dim + 1); }

double profile_subordination(int dim, FractionalOrder order, double r) {
  check_dimension(dim);
  if (!(r >= 0.0) || (dim >= 2 && r == 0.0)) throw DomainError("profile_subordination: bad radius");
  const double alpha = order.value();
  const double q = 1.0 / (1.0 - alpha);
  const double b = (1.0 - alpha) * std::pow(alpha, alpha / (1.0 - alpha));
  const double u_hi = std::log(kExpCut / b) / q + 0.5;
  const double u_lo = r > 0.0 ? std::max(-80.0, std::log(r * r / (4.0 * kExpCut))) : -80.0;
  auto f = [&](double u) {
    const double tau = std::exp(u);
    return tau * mainardi(order, tau) * std::pow(4.0 * kPi * tau, -0.5 * dim) *
           std::exp(-r * r / (4.0 * tau));
  };
  std::vector<double> breaks;
  const int n = static_cast<int>(std::ceil((u_hi - u_lo) / 0.5));
  for (int i = 0; i <= n; ++i) breaks.push_back(u_lo + (u_hi - u_lo) * i / n);
  quad::Options o;
  o.abs_tol = 0.0;
  o.rel_tol = 1e-13;
  return quad::adaptive_breaks(f, breaks, o).value;
}

double profile_oracle_fourier(int dim, FractionalOrder order, double r) {
  check_dimension(dim);
  if (!(r >= 0.0) || (dim >= 2 && r == 0.0)) throw DomainError("profile_oracle_fourier: bad radius");
  const double m0 = recip_gamma(1.0 - order.value());
  // Subtract m0/(1+rho^2), whose transform is known, so the remainder decays
  // like rho^{-4}.
  auto rem = [&](double rho) { return ml_neg(order, rho * rho) - m0 / (1.0 + rho * rho); };
  OscillatoryOptions opts;
  opts.abs_tol = 1e-15;
  if (dim == 1) {
    if (r == 0.0) {
      auto g = [&](double th) {
        const double c = std::cos(th);
        if (c <= 0.0) return 0.0;
        const double rho = std::tan(th);
        return rem(rho) / (c * c);
      };
      std::vector<double> br;
      for (int i = 0; i <= 32; ++i) br.push_back(0.5 * kPi * i / 32.0);
      quad::Options o;
      o.abs_tol = 1e-16;
      const double v = quad::adaptive_breaks(g, br, o).value;
      return (v + m0 * 0.5 * kPi) / kPi;
    }
    const double v = oscillatory_integral(1, rem, r, {}, opts).value;
    return (v + m0 * 0.5 * kPi * std::exp(-r)) / kPi;
  }
  if (dim == 2) {
    auto a = [&](double rho) { return rho * rem(rho); };
    const double v = oscillatory_integral(2, a, r, {}, opts).value;
    return (v + m0 * std::cyl_bessel_k(0.0, r)) / (2.0 * kPi);
  }
  // sin(rho r) = (rho r) * radial_kernel(3, rho r)
  auto a = [&](double rho) { return rho * rho * r * rem(rho); };
  const double v = oscillatory_integral(3, a, r, {}, opts).value;
  return (v + m0 * 0.5 * kPi * std::exp(-r)) / (2.0 * kPi * kPi * r);
}

void write_profile_csv(const ProfileTable& t, std::ostream& out) {
  char buf[96];
  auto kv = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, "# %s=%.17g\n", key, v);
    out << buf;
  };
  out << "# subdiff profile table v1\n";
  out << "# dim=" << t.dim << "\n";
  kv("alpha", t.alpha());
  kv("kappa", t.kappa);
  kv("kappa_slope", t.kappa_slope);
  kv("kappa_residual", t.kappa_residual);
  kv("f_zero", t.f_zero);
  kv("kappa_hat", t.kappa_hat);
  kv("sigma_hat", t.sigma_hat);
  kv("tail_power", t.tail_power);
  kv("tail_exponent", t.tail_exponent);
  kv("tail_r_squared", t.tail_r_squared);
  kv("r_inner", t.r_inner);
  kv("r_outer", t.r_outer);
  out << "r,F,patch_flag\n";
  for (std::size_t i = 0; i < t.radii.size(); ++i) {
    const int flag = t.radii[i] <= t.r_inner ? 1 : (t.radii[i] >= t.r_outer ? 2 : 0);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d\n", t.radii[i], t.values[i], flag);
    out << buf;
  }
}

ProfileTable read_profile_csv(std::istream& in) {
  std::map<std::string, double> meta;
  std::vector<double> radii, values;
  std::string line;
  int lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = line.substr(2, eq - 2);
      meta[key] = std::stod(line.substr(eq + 1));
      continue;
    }
    if (!header_seen) {
      if (line != "r,F,patch_flag") {
        throw DomainError("profile CSV line " + std::to_string(lineno) + ": expected column header");
      }
      header_seen = true;
      continue;
    }
    double r, f;
    int flag;
    if (std::sscanf(line.c_str(), "%lf,%lf,%d", &r, &f, &flag) != 3) {
      throw DomainError("profile CSV line " + std::to_string(lineno) + ": malformed row");
    }
    radii.push_back(r);
    values.push_back(f);
  }
  for (const char* key : {"dim", "alpha"}) {
    if (!meta.count(key)) throw DomainError(std::string("profile CSV missing header key ") + key);
  }
  ProfileTable t = ProfileTable::from_values(static_cast<int>(meta["dim"]), FractionalOrder(meta["alpha"]),
                                             std::move(radii), std::move(values));
  t.kappa = meta["kappa"];
  t.kappa_slope = meta["kappa_slope"];
  t.kappa_residual = meta["kappa_residual"];
  t.f_zero = meta["f_zero"];
  t.kappa_hat = meta["kappa_hat"];
  t.sigma_hat = meta["sigma_hat"];
  t.tail_power = meta["tail_power"];
  t.tail_exponent = meta["tail_exponent"];
  t.tail_r_squared = meta["tail_r_squared"];
  t.r_inner = meta["r_inner"];
  t.r_outer = meta["r_outer"];
  fill_shell(t);
  return t;
}

}  // namespace subdiff
