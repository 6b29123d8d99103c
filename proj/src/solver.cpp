#include "subdiff/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "subdiff/errors.hpp"
#include "subdiff/parallel.hpp"
#include "subdiff/transforms.hpp"

namespace subdiff {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kSpectralOrder = 20;
constexpr std::size_t kMaxSpectralPanels = 2'000'000;

double feature_length(const Datum& d) {
  return std::visit(
      [](const auto& x) -> double {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Gaussian>) return std::sqrt(x.scale);
        else if constexpr (std::is_same_v<T, PowerTail>) return 2.0 * x.core;
        else return x.radius;
      },
      d.variant());
}

quad::Options conv_options() {
  quad::Options o;
  o.abs_tol = 0.0;
  o.rel_tol = 1e-11;
  o.max_intervals = 4000;
  return o;
}

// Sorted breakpoints in (lo, hi) around the kernel centre r, on the kernel
// scale w, plus the datum's own breakpoints.
std::vector<double> conv_breaks(const Datum& d, double r, double w, double lo, double hi) {
  std::vector<double> b{lo, hi};
  auto add = [&](double x) {
    if (x > lo && x < hi) b.push_back(x);
  };
  for (double x : d.breakpoints()) add(x);
  add(r);
  for (double k : {1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0}) {
    add(r - k * w);
    add(r + k * w);
  }
  // Geometric refinement towards the origin, where radial weights vanish.
  for (double x = std::min(hi, 1.0) * 0.5; x > 1e-6 * std::min(hi, 1.0); x *= 0.25) add(x);
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

double conv_dim1(const Datum& d, const ProfileTable& table, double w, double r) {
  const double reach = table.radii.back() * w;
  const double lo = std::max(0.0, r - reach);
  const double hi = std::min(d.effective_radius(), r + reach);
  if (!(lo < hi)) return 0.0;
  auto zf = [&](double x) { return eval_profile(table, std::abs(x) / w) / w; };
  auto f = [&](double s) { return d(s) * (zf(r - s) + zf(r + s)); };
  return quad::adaptive_breaks(f, conv_breaks(d, r, w, lo, hi), conv_options()).value;
}

double conv_dim3(const Datum& d, const ProfileTable& table, double w, double r) {
  const double reach = table.radii.back() * w;
  const double lo = std::max(0.0, r - reach);
  const double hi = std::min(d.effective_radius(), r + reach);
  if (!(lo < hi)) return 0.0;
  if (r < 1e-9 * w) {
    auto f = [&](double s) { return s == 0.0 ? 0.0 : d(s) * s * s * eval_profile(table, s / w); };
    return 4.0 * kPi / (w * w * w) * quad::adaptive_breaks(f, conv_breaks(d, 0.0, w, lo, hi), conv_options()).value;
  }
  auto f = [&](double s) { return d(s) * s * shell_between(table, std::abs(r - s) / w, (r + s) / w); };
  return 2.0 * kPi / (r * w) * quad::adaptive_breaks(f, conv_breaks(d, r, w, lo, hi), conv_options()).value;
}

double conv_dim2(const Datum& d, const ProfileTable& table, double w, double r) {
  const double reach = table.radii.back() * w;
  const double lo = std::max(0.0, r - reach);
  const double hi = std::min(d.effective_radius(), r + reach);
  if (!(lo < hi)) return 0.0;
  const quad::Options opts = conv_options();
  if (r == 0.0) {
    auto f = [&](double s) { return s == 0.0 ? 0.0 : d(s) * s * eval_profile(table, s / w); };
    return 2.0 * kPi / (w * w) * quad::adaptive_breaks(f, conv_breaks(d, 0.0, w, lo, hi), opts).value;
  }
  auto inner = [&](double s) {
    if (s == 0.0) return 2.0 * kPi * eval_profile(table, r / w);
    const double dr = r - s;
    const double rs4 = 4.0 * r * s;
    // theta range where the kernel is above the table floor
    const double room = (reach * reach - dr * dr) / rs4;
    const double theta_max = room >= 1.0 ? kPi : 2.0 * std::asin(std::sqrt(std::max(room, 0.0)));
    if (theta_max <= 0.0) return 0.0;
    auto g = [&](double th) {
      const double sh = std::sin(0.5 * th);
      const double dist = std::sqrt(dr * dr + rs4 * sh * sh);
      return dist == 0.0 ? 0.0 : eval_profile(table, dist / w);
    };
    std::vector<double> br{0.0};
    const double delta = std::max(std::abs(dr) / std::sqrt(r * s), 1e-12);
    for (double x = delta; x < theta_max; x *= 4.0) br.push_back(x);
    br.push_back(theta_max);
    quad::Options io = opts;
    io.rel_tol = 1e-12;
    return 2.0 * quad::adaptive_breaks(g, br, io).value;
  };
  auto f = [&](double s) { return d(s) * s * inner(s); };
  return quad::adaptive_breaks(f, conv_breaks(d, r, w, lo, hi), opts).value / (w * w);
}

}  // namespace

const char* method_name(Method m) {
  switch (m) {
    case Method::spectral: return "spectral";
    case Method::convolution: return "convolution";
    default: return "l1";
  }
}

SpectralEvaluator::SpectralEvaluator(const Datum& d, FractionalOrder order, double t, double r_max,
                                     bool refined)
    : d_(d), order_(order), t_(t), r_max_(r_max), refined_(refined) {
  if (!(t > 0.0)) throw DomainError("spectral solver: t must be positive");
  if (!(r_max >= 0.0)) throw DomainError("spectral solver: r_max must be nonnegative");
  const double rho_cut = d.transform_cutoff();
  if (!std::isfinite(rho_cut)) {
    throw DomainError("spectral route needs a datum with rapidly decaying transform (" + d.name() +
                      " decays algebraically); use the convolution route");
  }
  const int n = d.dim();
  const double w = std::pow(t, 0.5 * order.value());
  scale_ = 1.0 / w;
  prefactor_ = surface_area(n) / std::pow(2.0 * kPi, n) * std::pow(w, -n);
  const double s_end = rho_cut * w;
  const double xi_max = r_max * scale_;
  const double w_osc = xi_max > 0.0 ? 1.2 / xi_max : kInf;
  const double w_feat = 1.2 * w / feature_length(d);
  std::vector<double> breaks{0.0};
  for (double s = 0.0; s < s_end;) {
    const double h = std::min({std::max(0.2 * s, 0.02), w_osc, w_feat});
    s = std::min(s + h, s_end);
    breaks.push_back(s);
    if (breaks.size() > kMaxSpectralPanels) {
      throw ResourceError("spectral grid exceeds " + std::to_string(kMaxSpectralPanels) +
                          " panels; reduce r_max or t");
    }
  }
  if (refined) {
    std::vector<double> fine;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
      fine.push_back(breaks[i]);
      fine.push_back(0.5 * (breaks[i] + breaks[i + 1]));
    }
    fine.push_back(breaks.back());
    breaks.swap(fine);
  }
  const auto& rule = quad::gauss_legendre(kSpectralOrder);
  s_.reserve((breaks.size() - 1) * kSpectralOrder);
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double half = 0.5 * (breaks[p + 1] - breaks[p]);
    const double mid = 0.5 * (breaks[p + 1] + breaks[p]);
    for (int i = 0; i < kSpectralOrder; ++i) {
      s_.push_back(mid + half * rule.nodes[i]);
      amp_.push_back(half * rule.weights[i]);
    }
  }
  std::vector<double> values(s_.size());
  parallel_for(s_.size(), [&](std::size_t j) {
    const double s = s_[j];
    values[j] = std::pow(s, n - 1) * ml_neg(order, s * s) * d.transform(s * scale_);
  });
  for (std::size_t j = 0; j < s_.size(); ++j) amp_[j] *= values[j];
}

double SpectralEvaluator::operator()(double r) const {
  if (!(r >= 0.0)) throw DomainError("spectral solver: r must be nonnegative");
  if (r > r_max_ * (1.0 + 1e-12)) throw DomainError("spectral solver: r beyond the evaluator's r_max");
  const double xi = r * scale_;
  const int n = d_.dim();
  double sum = 0.0, comp = 0.0;
  for (std::size_t j = 0; j < s_.size(); ++j) {
    const double term = amp_[j] * radial_kernel(n, s_[j] * xi) - comp;
    const double next = sum + term;
    comp = (next - sum) - term;
    sum = next;
  }
  return prefactor_ * sum;
}

double SpectralEvaluator::refinement_error(double r) const {
  const SpectralEvaluator fine(d_, order_, t_, r_max_, true);
  return std::abs(fine(r) - (*this)(r));
}

double mild_solution_spectral(const Datum& d, FractionalOrder order, double t, double r) {
  const SpectralEvaluator ev(d, order, t, r);
  const double u = ev(r);
  const double err = ev.refinement_error(r);
  const double floor = 1e-14 * d.mass() * std::pow(t, -0.5 * order.value() * d.dim());
  if (err > 1e-9 * std::abs(u) + floor) {
    throw QuadratureError("spectral quadrature did not converge at r=" + shortest(r) +
                          ", t=" + shortest(t));
  }
  return u;
}

double mild_solution_convolution(const Datum& d, const ProfileTable& table, double t, double r) {
  if (!(t > 0.0)) throw DomainError("convolution solver: t must be positive");
  if (!(r >= 0.0)) throw DomainError("convolution solver: r must be nonnegative");
  if (table.dim != d.dim()) throw DomainError("profile table dimension does not match the datum");
  const double w = std::pow(t, 0.5 * table.alpha());
  switch (d.dim()) {
    case 1: return conv_dim1(d, table, w, r);
    case 2: return conv_dim2(d, table, w, r);
    default: return conv_dim3(d, table, w, r);
  }
}

double newtonian_potential(const Datum& d, double x) {
  if (d.dim() != 3) throw DomainError("Newtonian potential is implemented for dim = 3 only");
  if (!(x >= 0.0)) throw DomainError("newtonian_potential: |x| must be nonnegative");
  const quad::Options opts = conv_options();
  const TailClass tc = d.tail_class();
  const double end = d.effective_radius();
  // int_a^b u0(s) s^k ds, b may be infinite for power tails.
  auto moment = [&](double a, double b, int k) {
    if (!(a < b)) return 0.0;
    double analytic = 0.0;
    if (tc.kind == TailKind::exact_power && b > tc.radius) {
      const double from = std::max(a, tc.radius);
      const double e = k + 1 - tc.beta;
      analytic = std::isinf(b) ? -tc.constant * std::pow(from, e) / e
                               : tc.constant * (std::pow(b, e) - std::pow(from, e)) / e;
      b = from;
    }
    b = std::min(b, end);
    if (!(a < b)) return analytic;
    std::vector<double> br{a, b};
    for (double p : d.breakpoints())
      if (p > a && p < b) br.push_back(p);
    std::sort(br.begin(), br.end());
    auto f = [&](double s) { return d(s) * std::pow(s, k); };
    return analytic + quad::adaptive_breaks(f, br, opts).value;
  };
  const double inner = x > 0.0 ? moment(0.0, x, 2) / x : 0.0;
  return 4.0 * kPi * (inner + moment(x, kInf, 1));
}

Snapshot spectral_snapshot(const Datum& d, FractionalOrder order, double t, std::vector<double> radii) {
  Snapshot snap{d.dim(), order.value(), d.id(), t, std::move(radii), {}, Method::spectral};
  const SpectralEvaluator ev(d, order, t, snap.radii.empty() ? 0.0 : snap.radii.back());
  snap.values.resize(snap.radii.size());
  parallel_for(snap.radii.size(), [&](std::size_t i) { snap.values[i] = ev(snap.radii[i]); });
  return snap;
}

Snapshot convolution_snapshot(const Datum& d, const ProfileTable& table, double t, std::vector<double> radii) {
  Snapshot snap{d.dim(), table.alpha(), d.id(), t, std::move(radii), {}, Method::convolution};
  snap.values.resize(snap.radii.size());
  parallel_for(snap.radii.size(),
               [&](std::size_t i) { snap.values[i] = mild_solution_convolution(d, table, t, snap.radii[i]); });
  return snap;
}

std::vector<double> uniform_radii(double lo, double hi, int n) {
  if (n < 2 || !(hi > lo)) throw DomainError("uniform_radii needs n >= 2 and hi > lo");
  std::vector<double> r(n);
  for (int i = 0; i < n; ++i) r[i] = lo + (hi - lo) * i / (n - 1);
  return r;
}

std::vector<double> graded_radii(double r_first, double hi, int n_uniform, int per_decade) {
  if (!(r_first > 0.0) || !(hi > r_first) || n_uniform < 2) throw DomainError("graded_radii: bad arguments");
  const double h = hi / n_uniform;
  std::vector<double> r;
  if (r_first < h) {
    const int m = static_cast<int>(std::ceil(per_decade * std::log10(h / r_first)));
    for (int i = 0; i < m; ++i) r.push_back(r_first * std::pow(h / r_first, static_cast<double>(i) / m));
  }
  for (int i = 1; i <= n_uniform; ++i) r.push_back(h * i);
  return r;
}

}  // namespace subdiff
