#include "subdiff/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "subdiff/errors.hpp"

namespace subdiff {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end(),
                      [](double a, double b) { return std::abs(a - b) <= 1e-15 * std::max(1.0, std::abs(b)); }),
          v.end());
  return v;
}

double j0_zero_mcmahon(int k) {
  const double b = (k - 0.25) * kPi;
  const double b8 = 8.0 * b;
  const double b8_2 = b8 * b8;
  return b + 1.0 / b8 - 124.0 / (3.0 * b8 * b8_2) + 120928.0 / (15.0 * b8 * b8_2 * b8_2);
}

}  // namespace

void check_dimension(int dim) {
  if (dim < 1 || dim > 3) {
    throw DomainError("dimension must be 1, 2 or 3, got " + std::to_string(dim));
  }
}

double surface_area(int dim) {
  check_dimension(dim);
  switch (dim) {
    case 1: return 2.0;
    case 2: return 2.0 * kPi;
    default: return 4.0 * kPi;
  }
}

double unit_ball_volume(int dim) { return surface_area(dim) / dim; }

double radial_kernel(int dim, double z) {
  switch (dim) {
    case 1: return std::cos(z);
    case 2: return std::cyl_bessel_j(0.0, std::abs(z));
    case 3: {
      if (std::abs(z) < 1e-4) {
        const double z2 = z * z;
        return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
      }
      return std::sin(z) / z;
    }
    default: check_dimension(dim); return 0.0;
  }
}

double bessel_j0_zero(int k) {
  constexpr int kTabulated = 4096;
  static std::once_flag once;
  static std::vector<double> zeros;
  std::call_once(once, [] {
    zeros.resize(kTabulated);
    for (int i = 1; i <= kTabulated; ++i) {
      double x = j0_zero_mcmahon(i);
      for (int it = 0; it < 20; ++it) {
        // J0' = -J1
        const double dx = std::cyl_bessel_j(0.0, x) / std::cyl_bessel_j(1.0, x);
        x += dx;
        if (std::abs(dx) < 1e-15 * x) break;
      }
      zeros[i - 1] = x;
    }
  });
  if (k < 1) throw DomainError("Bessel zero index must be >= 1");
  if (k <= kTabulated) return zeros[k - 1];
  return j0_zero_mcmahon(k);
}

double kernel_zero(int dim, int k) {
  switch (dim) {
    case 1: return (k - 0.5) * kPi;
    case 2: return bessel_j0_zero(k);
    case 3: return k * kPi;
    default: check_dimension(dim); return 0.0;
  }
}

// ---------------------------------------------------------------------------
// RadialGrid

RadialGrid::RadialGrid(std::vector<double> breaks, int order, GridKind kind)
    : breaks_(sorted_unique(std::move(breaks))), order_(order), kind_(kind) {
  if (breaks_.size() < 2 || breaks_.front() < 0.0) {
    throw DomainError("radial grid needs at least one panel on [0, inf)");
  }
  const auto& rule = quad::gauss_legendre(order);
  nodes_.reserve((breaks_.size() - 1) * order);
  weights_.reserve((breaks_.size() - 1) * order);
  for (std::size_t p = 0; p + 1 < breaks_.size(); ++p) {
    const double a = breaks_[p];
    const double b = breaks_[p + 1];
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (int i = 0; i < order; ++i) {
      nodes_.push_back(mid + half * rule.nodes[i]);
      weights_.push_back(half * rule.weights[i]);
    }
  }
}

RadialGrid RadialGrid::hybrid(double r_cut, double r_min, int panels_per_decade,
                              double linear_width, int order) {
  if (!(r_cut > 0.0) || !(r_min > 0.0) || panels_per_decade < 1 || !(linear_width > 0.0)) {
    throw DomainError("invalid hybrid grid parameters");
  }
  std::vector<double> breaks{0.0};
  const double log_end = std::min(1.0, r_cut);
  if (r_min < log_end) {
    const int panels =
        std::max(1, static_cast<int>(std::ceil(panels_per_decade * std::log10(log_end / r_min))));
    for (int i = 0; i <= panels; ++i) {
      breaks.push_back(r_min * std::pow(log_end / r_min, static_cast<double>(i) / panels));
    }
  } else {
    breaks.push_back(log_end);
  }
  if (r_cut > 1.0) {
    const int panels = std::max(1, static_cast<int>(std::ceil((r_cut - 1.0) / linear_width)));
    for (int i = 1; i <= panels; ++i) breaks.push_back(1.0 + (r_cut - 1.0) * i / panels);
  }
  return RadialGrid(std::move(breaks), order, GridKind::log_linear_hybrid);
}

RadialGrid RadialGrid::linear(double r_max, int panels, int order) {
  std::vector<double> breaks;
  for (int i = 0; i <= panels; ++i) breaks.push_back(r_max * i / panels);
  return RadialGrid(std::move(breaks), order, GridKind::linear);
}

RadialGrid RadialGrid::from_breaks(std::vector<double> breaks, int order, GridKind kind) {
  return RadialGrid(std::move(breaks), order, kind);
}

RadialGrid RadialGrid::with_breaks(std::span<const double> extra) const {
  std::vector<double> b = breaks_;
  for (double x : extra) {
    if (x > breaks_.front() && x < breaks_.back()) b.push_back(x);
  }
  return RadialGrid(std::move(b), order_, kind_);
}

RadialGrid RadialGrid::refined() const {
  std::vector<double> b;
  for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
    b.push_back(breaks_[i]);
    b.push_back(0.5 * (breaks_[i] + breaks_[i + 1]));
  }
  b.push_back(breaks_.back());
  return RadialGrid(std::move(b), order_, kind_);
}

RadialGrid RadialGrid::limited_width(double max_width) const {
  std::vector<double> b;
  for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
    const double a = breaks_[i];
    const double c = breaks_[i + 1];
    const int pieces = std::max(1, static_cast<int>(std::ceil((c - a) / max_width)));
    for (int k = 0; k < pieces; ++k) b.push_back(a + (c - a) * k / pieces);
  }
  b.push_back(breaks_.back());
  return RadialGrid(std::move(b), order_, kind_);
}

// ---------------------------------------------------------------------------
// Transforms

double radial_fourier(int dim, const std::function<double(double)>& f, double rho,
                      const RadialGrid& grid, double rel_tol) {
  check_dimension(dim);
  if (!(rho >= 0.0)) throw DomainError("radial_fourier: rho must be nonnegative");
  RadialGrid g = grid;
  if (rho * grid.r_max() > 50.0) g = g.limited_width(kPi / rho);
  auto integrand = [&](double r) {
    return std::pow(r, dim - 1) * radial_kernel(dim, rho * r) * f(r);
  };
  auto abs_integrand = [&](double r) { return std::abs(integrand(r)); };
  const double coarse = g.integrate(integrand);
  const RadialGrid fine_grid = g.refined();
  const double fine = fine_grid.integrate(integrand);
  const double scale = fine_grid.integrate(abs_integrand);
  if (std::abs(fine - coarse) > rel_tol * std::max(std::abs(fine), 1e-3 * scale) + 1e-300) {
    throw QuadratureError("radial_fourier: panel refinement changed the result by " +
                          shortest(std::abs(fine - coarse)) + " at rho=" +
                          shortest(rho));
  }
  return surface_area(dim) * fine;
}

double inverse_radial_fourier(int dim, const std::function<double(double)>& f_hat, double r,
                              const RadialGrid& grid, double rel_tol) {
  return radial_fourier(dim, f_hat, r, grid, rel_tol) / std::pow(2.0 * kPi, dim);
}

quad::Result oscillatory_integral(int dim, const std::function<double(double)>& amplitude,
                                  double omega, std::span<const double> breaks,
                                  const OscillatoryOptions& opts) {
  check_dimension(dim);
  if (!(omega > 0.0)) throw DomainError("oscillatory_integral: omega must be positive");
  auto integrand = [&](double x) { return amplitude(x) * radial_kernel(dim, omega * x); };
  std::vector<double> extra(breaks.begin(), breaks.end());
  std::sort(extra.begin(), extra.end());
  const bool finite_support = opts.support_end > 0.0;

  quad::Options panel_opts;
  panel_opts.abs_tol = 0.05 * opts.abs_tol;
  panel_opts.rel_tol = 1e-13;
  panel_opts.max_intervals = 200;

  quad::WynnEpsilon wynn;
  quad::Result out;
  std::vector<double> panel_values;
  double lo = 0.0;
  std::size_t next_break = 0;
  int quiet = 0;
  int stable = 0;
  for (int k = 1; k <= opts.max_panels; ++k) {
    double hi = kernel_zero(dim, k) / omega;
    bool last = false;
    if (finite_support && hi >= opts.support_end) {
      hi = opts.support_end;
      last = true;
    }
    std::vector<double> pts{lo};
    while (next_break < extra.size() && extra[next_break] < hi) {
      if (extra[next_break] > lo) pts.push_back(extra[next_break]);
      ++next_break;
    }
    pts.push_back(hi);
    // Long panels get geometric sub-breaks so a localized amplitude is not
    // missed by the first Kronrod sample.
    std::vector<double> geo;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      geo.push_back(pts[i]);
      double a = pts[i] > 0.0 ? pts[i] : std::min(1.0, 0.5 * pts[i + 1]);
      if (pts[i] == 0.0) geo.push_back(a);
      for (a *= 2.0; a < 0.75 * pts[i + 1]; a *= 2.0) geo.push_back(a);
    }
    geo.push_back(hi);
    pts = sorted_unique(std::move(geo));
    const quad::Result panel = quad::adaptive_breaks(integrand, pts, panel_opts);
    out.evaluations += panel.evaluations;
    out.error += panel.error;
    panel_values.push_back(panel.value);
    const double partial = quad::pairwise_sum(panel_values);
    wynn.push(partial);
    lo = hi;
    if (last) {
      out.value = partial;
      out.converged = true;
      return out;
    }
    if (k < opts.min_panels) continue;
    // Amplitude has died out: plain summation is exact.
    if (std::abs(panel.value) < opts.abs_tol && next_break >= extra.size()) {
      if (++quiet >= 3) {
        out.value = partial;
        out.converged = true;
        return out;
      }
    } else {
      quiet = 0;
    }
    if (wynn.size() > 8 && wynn.error() < opts.abs_tol) {
      if (++stable >= 3) {
        out.value = wynn.estimate();
        out.error += wynn.error();
        out.converged = true;
        return out;
      }
    } else {
      stable = 0;
    }
  }
  throw QuadratureError("oscillatory_integral did not converge within " +
                        std::to_string(opts.max_panels) + " panels");
}

}  // namespace subdiff
