#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "subdiff/special_functions.hpp"

namespace subdiff {

/// E_N(xi): |xi|^{2-N} for N=3, -ln|xi| for N=2.
double laplace_kernel(int dim, double xi);

struct ProfileOptions {
  double r_min = 1e-6;
  double log_step = 0.01;     // node spacing in ln r
  double tail_floor = 1e-200; // table stops where F drops below this
  double panel_width = 0.04;  // subordination panels in ln tau
  int order = 16;
  bool validate = true;       // cross-check against the Fourier route
  double validate_tol = 1e-6;
};

struct KappaFit {
  double kappa = 0.0;
  double slope = 0.0;     // C in the linear near-origin model
  double residual = 0.0;  // max relative deviation from the model
};

struct TailFit {
  double kappa_hat = 0.0;
  double sigma_hat = 0.0;
  double power = 0.0;      // algebraic prefactor exponent (held fixed)
  double exponent = 0.0;   // q in exp(-sigma r^q)
  double r_squared = 0.0;
  double rms_residual = 0.0;
  double lo = 0.0, hi = 0.0;
};

struct TailFitOptions {
  double lo = 2.0;
  double hi = 0.0;                    // 0: last node
  std::optional<double> exponent;     // default 2/(2-alpha)
  std::optional<double> power;        // default -N(1-alpha)/(2-alpha)
};

/// Tabulated radial profile F of the fundamental solution for one (N, alpha).
/// Immutable once built; share through std::shared_ptr<const ProfileTable>.
struct ProfileTable {
  int dim = 1;
  FractionalOrder order{0.5};
  std::vector<double> radii;        // log-uniform, ascending
  std::vector<double> values;       // F at radii
  std::vector<double> log_slopes;   // d ln F / d ln r
  std::vector<double> shell;        // int_0^r F(s) s ds
  std::vector<double> tail_shell;   // int_r^{r_max} F(s) s ds
  std::vector<double> shell_cells;  // int of F(s) s over each log cell
  double kappa = 0.0;
  double kappa_slope = 0.0;
  double kappa_residual = 0.0;
  double f_zero = 0.0;
  double kappa_hat = 0.0;
  double sigma_hat = 0.0;
  double tail_power = 0.0;
  double tail_exponent = 0.0;
  double tail_r_squared = 0.0;
  double r_inner = 0.0;
  double r_outer = 0.0;

  double alpha() const { return order.value(); }

  /// Table from given samples (log-uniform radii). Derived columns are filled,
  /// fitted constants are left at zero.
  static ProfileTable from_values(int dim, FractionalOrder order, std::vector<double> radii,
                                  std::vector<double> values);
};

ProfileTable build_profile(int dim, FractionalOrder order, const ProfileOptions& opts = {});

/// Process-wide cache of default-option tables.
std::shared_ptr<const ProfileTable> cached_profile(int dim, FractionalOrder order);

/// F(r). +infinity at r = 0 for N >= 2 (profile singular at origin).
double eval_profile(const ProfileTable& table, double r);
/// int_0^eta F(s) s ds.
double eval_shell(const ProfileTable& table, double eta);
/// int_eta^{r_max} F(s) s ds without cancellation in the far field.
double eval_tail_shell(const ProfileTable& table, double eta);
/// int_a^b F(s) s ds from the same cell quadrature as the shell tables.
double shell_between(const ProfileTable& table, double a, double b);
/// Z(x, t) = t^{-alpha N/2} F(|x| t^{-alpha/2}).
double fundamental_solution(const ProfileTable& table, double x_norm, double t);

KappaFit estimate_kappa(const ProfileTable& table, double lo = 1e-5, double hi = 1e-2);
TailFit fit_tail(const ProfileTable& table, const TailFitOptions& opts = {});
/// Saddle-point value ((2-alpha)/2)(alpha/2)^{alpha/(2-alpha)} of the tail rate.
double tail_sigma_asymptotic(double alpha);

double profile_mass(const ProfileTable& table);
double second_moment(const ProfileTable& table);

/// F(r) by subordination with adaptive quadrature (pointwise reference).
double profile_subordination(int dim, FractionalOrder order, double r);
/// F(r) by inverse radial Fourier transform of rho -> E_alpha(-rho^2).
double profile_oracle_fourier(int dim, FractionalOrder order, double r);

void write_profile_csv(const ProfileTable& table, std::ostream& out);
ProfileTable read_profile_csv(std::istream& in);

}  // namespace subdiff
