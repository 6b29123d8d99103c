#pragma once

#include "subdiff/errors.hpp"

namespace subdiff {

/// Order alpha of the Caputo time derivative, strictly inside (0, 1).
class FractionalOrder {
 public:
  explicit FractionalOrder(double alpha);

  double value() const noexcept { return alpha_; }
  operator double() const noexcept { return alpha_; }

  friend bool operator==(const FractionalOrder&, const FractionalOrder&) = default;

 private:
  double alpha_;
};

/// 1/Gamma(z); exactly zero at the poles z = 0, -1, -2, ...
double recip_gamma(double z);

/// sin(pi x) with exact zeros at the integers.
double sin_pi(double x);

/// Mittag-Leffler function E_alpha(-x) for x >= 0.
///
/// Power series below the cancellation threshold x*(alpha), completely
/// monotone spectral integral above it. Absolute error is below 1e-12.
double ml_neg(FractionalOrder order, double x);

// The individual evaluation routes, exposed for cross-checking.
double ml_neg_series(double alpha, double x);
double ml_neg_spectral(double alpha, double x);
/// Large-x expansion sum_{k=1..terms} (-1)^{k+1} x^{-k} / Gamma(1 - k alpha).
double ml_neg_asymptotic(double alpha, double x, int terms = 12);
/// Crossover between series and integral evaluation.
double ml_series_threshold(double alpha);

/// Mainardi (Wright) function M_alpha(tau), tau >= 0; the probability density
/// that subordinates the fractional kernel to the heat kernel.
double mainardi(FractionalOrder order, double tau);

double mainardi_series(double alpha, double tau);
/// Non-oscillatory integral representation obtained from the Zolotarev
/// formula for the one-sided stable density. Keeps full relative accuracy in
/// the super-exponential tail where the series cancels catastrophically.
double mainardi_integral(double alpha, double tau);
double mainardi_series_threshold(double alpha);

}  // namespace subdiff
