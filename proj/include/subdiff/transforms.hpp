#pragma once

#include <functional>
#include <span>
#include <vector>

#include "subdiff/quadrature.hpp"

namespace subdiff {

enum class GridKind { linear, log_linear_hybrid, custom };

/// Composite Gauss-Legendre quadrature grid on [0, r_max]. Immutable after
/// construction; nodes are strictly increasing and positive, weights positive.
class RadialGrid {
 public:
  /// Log-spaced panels on [r_min, 1] (after a first panel [0, r_min]) glued to
  /// linear panels of width `linear_width` from 1 up to r_cut.
  static RadialGrid hybrid(double r_cut, double r_min = 1e-6, int panels_per_decade = 6,
                           double linear_width = 0.25, int order = 16);
  static RadialGrid linear(double r_max, int panels, int order = 16);
  static RadialGrid from_breaks(std::vector<double> breaks, int order = 16,
                                GridKind kind = GridKind::custom);

  /// Same grid with extra panel boundaries inserted (discontinuities, kinks).
  RadialGrid with_breaks(std::span<const double> extra) const;
  /// Every panel bisected.
  RadialGrid refined() const;
  /// Panels subdivided so none is longer than max_width.
  RadialGrid limited_width(double max_width) const;

  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  std::span<const double> breaks() const { return breaks_; }
  GridKind kind() const { return kind_; }
  int order() const { return order_; }
  double r_max() const { return breaks_.back(); }

  template <class F>
  double integrate(F&& f) const {
    std::vector<double> terms(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) terms[i] = weights_[i] * f(nodes_[i]);
    return quad::pairwise_sum(terms);
  }

 private:
  RadialGrid(std::vector<double> breaks, int order, GridKind kind);

  std::vector<double> breaks_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  int order_;
  GridKind kind_;
};

/// |S^{N-1}|: 2, 2 pi, 4 pi.
double surface_area(int dim);
/// Volume of the unit ball in R^dim.
double unit_ball_volume(int dim);
/// Radial Fourier kernel: cos z (N=1), J0(z) (N=2), sin z / z (N=3).
double radial_kernel(int dim, double z);
/// k-th positive zero (k >= 1) of the radial kernel.
double kernel_zero(int dim, int k);
double bessel_j0_zero(int k);

void check_dimension(int dim);

/// f^(rho) = int_{R^N} e^{-i rho e.x} f(|x|) dx for radial f, by quadrature on
/// `grid`. When rho * r_max > 50 the panels are split to at most half a period.
/// Throws QuadratureError if a refined grid disagrees beyond rel_tol.
double radial_fourier(int dim, const std::function<double(double)>& f, double rho,
                      const RadialGrid& grid, double rel_tol = 1e-9);

/// Inverse transform (2 pi)^{-N} int f^(rho) e^{i rho e.x} d rho at radius r.
double inverse_radial_fourier(int dim, const std::function<double(double)>& f_hat, double r,
                              const RadialGrid& grid, double rel_tol = 1e-9);

struct OscillatoryOptions {
  double abs_tol = 1e-13;
  int min_panels = 6;
  int max_panels = 200000;
  /// Amplitude vanishes beyond this point (compact support).
  double support_end = 0.0;
};

/// int_0^inf amplitude(x) radial_kernel(dim, omega x) dx for omega > 0.
/// Integrates between consecutive kernel zeros (plus `breaks`) and
/// accelerates the panel sums with the Wynn epsilon algorithm, so amplitudes
/// with slow algebraic decay are handled.
quad::Result oscillatory_integral(int dim, const std::function<double(double)>& amplitude,
                                  double omega, std::span<const double> breaks,
                                  const OscillatoryOptions& opts = {});

}  // namespace subdiff
