#pragma once

#include <string>
#include <vector>

#include "subdiff/initial_data.hpp"
#include "subdiff/profile.hpp"
#include "subdiff/quadrature.hpp"

namespace subdiff {

enum class Method { spectral, convolution, l1 };

const char* method_name(Method m);

/// Solution sampled on a radial grid at one time.
struct Snapshot {
  int dim = 1;
  double alpha = 0.5;
  std::string datum_id;
  double t = 1.0;
  std::vector<double> radii;
  std::vector<double> values;
  Method method = Method::spectral;
};

/// Mild solution at fixed t through the Fourier representation with the
/// substitution rho = s t^{-alpha/2}. Amplitudes E(-s^2) u0^(s t^{-alpha/2})
/// are computed once on a composite Gauss grid in s; each radius up to r_max
/// then costs one weighted sum.
class SpectralEvaluator {
 public:
  SpectralEvaluator(const Datum& d, FractionalOrder order, double t, double r_max,
                    bool refined = false);

  double operator()(double r) const;
  /// |u - u_refined| at r, using a grid with every panel bisected.
  double refinement_error(double r) const;
  std::size_t size() const { return s_.size(); }

 private:
  Datum d_;
  FractionalOrder order_;
  double t_, r_max_;
  bool refined_;
  double scale_;   // t^{-alpha/2}
  double prefactor_;
  std::vector<double> s_;
  std::vector<double> amp_;  // weight * amplitude
};

double mild_solution_spectral(const Datum& d, FractionalOrder order, double t, double r);
double mild_solution_convolution(const Datum& d, const ProfileTable& table, double t, double r);

/// Newtonian potential int u0(x - y) |y|^{-1} dy of a radial datum in R^3.
double newtonian_potential(const Datum& d, double x_norm);

Snapshot spectral_snapshot(const Datum& d, FractionalOrder order, double t, std::vector<double> radii);
Snapshot convolution_snapshot(const Datum& d, const ProfileTable& table, double t,
                              std::vector<double> radii);

/// n uniform radii on [lo, hi] (lo may be 0).
std::vector<double> uniform_radii(double lo, double hi, int n);
/// Radii for functions singular at the origin: geometric from r_first up to
/// hi / n_uniform, then uniform to hi.
std::vector<double> graded_radii(double r_first, double hi, int n_uniform, int per_decade = 24);

}  // namespace subdiff
