#include "subdiff/l1_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "subdiff/errors.hpp"
#include "subdiff/profile.hpp"
#include "subdiff/transforms.hpp"

namespace subdiff {

namespace {

// Coefficients a_{n,k}, k = 1..n, of the nonuniform L1 formula
// D^alpha u(t_n) ~ sum_k a_{n,k} (u^k - u^{k-1}).
std::vector<double> l1_row(const std::vector<double>& t, int n, double alpha) {
  const double g = std::tgamma(2.0 - alpha);
  std::vector<double> a(n + 1, 0.0);
  for (int k = 1; k <= n; ++k) {
    const double dt = t[k] - t[k - 1];
    a[k] = (std::pow(t[n] - t[k - 1], 1.0 - alpha) - std::pow(t[n] - t[k], 1.0 - alpha)) / (g * dt);
  }
  return a;
}

// Thomas algorithm; sub/diag/sup are copied.
std::vector<double> tridiagonal(std::vector<double> sub, std::vector<double> diag, std::vector<double> sup,
                                std::vector<double> rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double m = sub[i] / diag[i - 1];
    diag[i] -= m * sup[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / diag[i];
  return rhs;
}

// Radial Laplacian on nodes r_i = i h, i = 0..m-1 (node m is the Dirichlet
// boundary). Returns (sub, diag, sup) of -Delta_h.
void radial_laplacian(int dim, int m, double h, std::vector<double>& sub, std::vector<double>& diag,
                      std::vector<double>& sup) {
  sub.assign(m, 0.0);
  diag.assign(m, 0.0);
  sup.assign(m, 0.0);
  const double ih2 = 1.0 / (h * h);
  diag[0] = 2.0 * dim * ih2;
  sup[0] = -2.0 * dim * ih2;
  for (int i = 1; i < m; ++i) {
    const double c = (dim - 1) / (2.0 * i);
    sub[i] = -(1.0 - c) * ih2;
    diag[i] = 2.0 * ih2;
    sup[i] = -(1.0 + c) * ih2;
  }
}

void check_cost(int steps, int n_space, double cap) {
  const double cost = static_cast<double>(steps) * steps * n_space;
  if (cost > cap) {
    throw ResourceError("L1 history cost " + std::to_string(cost) + " exceeds cap " + std::to_string(cap));
  }
}

}  // namespace

std::vector<double> l1_weights(FractionalOrder order, int n) {
  if (n < 1) throw DomainError("l1_weights needs n >= 1");
  const double e = 1.0 - order.value();
  std::vector<double> b(n);
  for (int j = 0; j < n; ++j) b[j] = std::pow(j + 1.0, e) - std::pow(static_cast<double>(j), e);
  return b;
}

std::vector<double> L1Grid::time_nodes() const {
  if (steps < 1 || !(t_final > 0.0) || !(grading >= 1.0)) throw DomainError("invalid L1 time mesh");
  std::vector<double> t(steps + 1);
  for (int n = 0; n <= steps; ++n) t[n] = t_final * std::pow(static_cast<double>(n) / steps, grading);
  return t;
}

std::vector<Snapshot> solve_l1(const Datum& d, const L1Grid& grid, const std::vector<double>& output_times,
                               const L1Options& opts) {
  if (d.dim() != grid.dim) throw DomainError("L1 grid dimension does not match the datum");
  if (grid.n_space < 4) throw DomainError("L1 grid needs at least 4 spatial intervals");
  check_cost(grid.steps, grid.n_space, opts.cost_cap);
  const double alpha = grid.order.value();
  if (opts.check_truncation) {
    const double reach = grid.r_trunc - d.effective_radius();
    if (!(reach > 0.0)) throw DomainError("r_trunc must exceed the datum's effective radius");
    const auto table = cached_profile(grid.dim, grid.order);
    const double xi0 = reach * std::pow(grid.t_final, -0.5 * alpha);
    double outside = 0.0;
    const auto& rule = quad::gauss_legendre(16);
    for (double a = xi0; a < table->radii.back(); a *= 1.1) {
      outside += quad::gauss_panel(rule, [&](double x) { return eval_profile(*table, x) * std::pow(x, grid.dim - 1); },
                                   a, a * 1.1);
    }
    outside *= surface_area(grid.dim);
    if (outside > 1e-8) {
      throw DomainError("r_trunc too small: kernel mass " + shortest(outside) +
                        " lies outside the truncated domain at t_final");
    }
  }
  for (double t : output_times) {
    if (!(t >= 0.0) || t > grid.t_final * (1.0 + 1e-12)) throw DomainError("output time outside [0, t_final]");
  }
  const int m = grid.n_space;
  const double h = grid.h();
  const std::vector<double> t = grid.time_nodes();
  std::vector<double> sub, diag, sup;
  radial_laplacian(grid.dim, m, h, sub, diag, sup);

  std::vector<std::vector<double>> u(grid.steps + 1, std::vector<double>(m));
  for (int i = 0; i < m; ++i) u[0][i] = d(i * h);
  for (int n = 1; n <= grid.steps; ++n) {
    const std::vector<double> a = l1_row(t, n, alpha);
    // sum_k a_k (u^k - u^{k-1}) = a_n u^n - sum_{k<n} (a_{k+1} - a_k) u^k - a_1 u^0
    std::vector<double> rhs(m, 0.0);
    for (int k = 0; k < n; ++k) {
      const double c = k == 0 ? a[1] : a[k + 1] - a[k];
      const std::vector<double>& uk = u[k];
      for (int i = 0; i < m; ++i) rhs[i] += c * uk[i];
    }
    std::vector<double> dg = diag;
    for (double& v : dg) v += a[n];
    u[n] = tridiagonal(sub, dg, sup, rhs);
  }

  std::vector<Snapshot> out;
  for (double tq : output_times) {
    auto it = std::lower_bound(t.begin(), t.end(), tq);
    std::size_t hi = std::min<std::size_t>(it - t.begin(), t.size() - 1);
    std::size_t lo = hi == 0 ? 0 : hi - 1;
    const double lam = hi == lo ? 0.0 : (tq - t[lo]) / (t[hi] - t[lo]);
    Snapshot s{grid.dim, alpha, d.id(), tq, {}, {}, Method::l1};
    for (int i = 0; i <= m; ++i) {
      s.radii.push_back(i * h);
      s.values.push_back(i == m ? 0.0 : (1.0 - lam) * u[lo][i] + lam * u[hi][i]);
    }
    out.push_back(std::move(s));
  }
  return out;
}

double solve_l1_eigenmode(FractionalOrder order, double k, double t_final, int steps, double grading) {
  L1Grid g;
  g.t_final = t_final;
  g.steps = steps;
  g.grading = grading;
  const std::vector<double> t = g.time_nodes();
  const double lambda = k * k;
  std::vector<double> u(steps + 1);
  u[0] = 1.0;
  for (int n = 1; n <= steps; ++n) {
    const std::vector<double> a = l1_row(t, n, order.value());
    double rhs = a[1] * u[0];
    for (int j = 1; j < n; ++j) rhs += (a[j + 1] - a[j]) * u[j];
    u[n] = rhs / (a[n] + lambda);
  }
  return u[steps];
}

std::vector<double> solve_l1_periodic(const std::vector<double>& u0, double length, FractionalOrder order,
                                      double t_final, int steps, double grading) {
  const int m = static_cast<int>(u0.size());
  if (m < 3) throw DomainError("periodic grid needs at least 3 points");
  check_cost(steps, m, 4e10);
  L1Grid g;
  g.t_final = t_final;
  g.steps = steps;
  g.grading = grading;
  const std::vector<double> t = g.time_nodes();
  const double h = length / m;
  const double ih2 = 1.0 / (h * h);
  std::vector<std::vector<double>> u{u0};
  for (int n = 1; n <= steps; ++n) {
    const std::vector<double> a = l1_row(t, n, order.value());
    std::vector<double> rhs(m, 0.0);
    for (int k = 0; k < n; ++k) {
      const double c = k == 0 ? a[1] : a[k + 1] - a[k];
      for (int i = 0; i < m; ++i) rhs[i] += c * u[k][i];
    }
    // Cyclic tridiagonal (a_n + 2/h^2) u_i - (u_{i-1} + u_{i+1})/h^2 by
    // Sherman-Morrison on the corner entries.
    const double off = -ih2;
    const double dg = a[n] + 2.0 * ih2;
    const double gamma = -dg;
    std::vector<double> sub(m, off), sup(m, off), diag(m, dg);
    diag[0] -= gamma;
    diag[m - 1] -= off * off / gamma;
    std::vector<double> x = tridiagonal(sub, diag, sup, rhs);
    std::vector<double> uvec(m, 0.0);
    uvec[0] = gamma;
    uvec[m - 1] = off;
    std::vector<double> z = tridiagonal(sub, diag, sup, uvec);
    const double fac = (x[0] + off / gamma * x[m - 1]) / (1.0 + z[0] + off / gamma * z[m - 1]);
    for (int i = 0; i < m; ++i) x[i] -= fac * z[i];
    u.push_back(std::move(x));
  }
  return u.back();
}

Snapshot solve_heat_backward_euler(const Datum& d, const L1Grid& grid) {
  const int m = grid.n_space;
  const double h = grid.h();
  const std::vector<double> t = grid.time_nodes();
  std::vector<double> sub, diag, sup;
  radial_laplacian(grid.dim, m, h, sub, diag, sup);
  std::vector<double> u(m);
  for (int i = 0; i < m; ++i) u[i] = d(i * h);
  for (int n = 1; n <= grid.steps; ++n) {
    const double dt = t[n] - t[n - 1];
    std::vector<double> s = sub, dg = diag, sp = sup;
    for (int i = 0; i < m; ++i) {
      s[i] *= dt;
      dg[i] = 1.0 + dt * dg[i];
      sp[i] *= dt;
    }
    u = tridiagonal(s, dg, sp, u);
  }
  Snapshot snap{grid.dim, 1.0, d.id(), grid.t_final, {}, {}, Method::l1};
  for (int i = 0; i <= m; ++i) {
    snap.radii.push_back(i * h);
    snap.values.push_back(i == m ? 0.0 : u[i]);
  }
  return snap;
}

}  // namespace subdiff
