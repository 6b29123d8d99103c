#include "subdiff/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "subdiff/quadrature.hpp"

namespace subdiff {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_nonpositive_integer(double z) { return z <= 0.0 && z == std::floor(z); }

void require_nonnegative(double x, const char* what) {
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw DomainError(std::string(what) + ": argument must be finite and nonnegative, got " +
                      shortest(x));
  }
}

}  // namespace

FractionalOrder::FractionalOrder(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("alpha must lie in (0,1), got " + shortest(alpha));
  }
}

double sin_pi(double x) {
  if (x == std::floor(x)) return 0.0;
  double r = x - 2.0 * std::round(0.5 * x);  // r in [-1, 1]
  if (r > 0.5) r = 1.0 - r;
  if (r < -0.5) r = -1.0 - r;
  return std::sin(kPi * r);
}

double recip_gamma(double z) {
  if (is_nonpositive_integer(z)) return 0.0;
  if (z >= 0.5) {
    if (z > 171.0) return std::exp(-std::lgamma(z));
    return 1.0 / std::tgamma(z);
  }
  // Reflection keeps the zeros exact and avoids evaluating Gamma near poles.
  const double s = sin_pi(z);
  const double w = 1.0 - z;
  if (w > 171.0) return std::copysign(std::exp(std::lgamma(w) + std::log(std::abs(s)) - std::log(kPi)), s);
  return s * std::tgamma(w) / kPi;
}

// ---------------------------------------------------------------------------
// Mittag-Leffler on the negative axis

double ml_series_threshold(double alpha) {
  // The largest series term is about exp(x^{1/alpha})/alpha; keep its rounding
  // error under 1e-13.
  return std::pow(std::log(454.0 * alpha), alpha);
}

double ml_neg_series(double alpha, double x) {
  if (x == 0.0) return 1.0;
  const double logx = std::log(x);
  double sum = 1.0;
  double comp = 0.0;  // Kahan compensation
  int small_run = 0;
  for (int k = 1; k < 2000; ++k) {
    const double arg = 1.0 + alpha * k;
    const double mag = std::exp(k * logx - std::lgamma(arg));
    const double term = (k % 2 == 0) ? mag : -mag;
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    // Terms decrease once k*alpha exceeds x^{1/alpha}; stop after a run of
    // negligible ones.
    if (mag < 1e-17) {
      if (++small_run >= 3) break;
    } else {
      small_run = 0;
    }
  }
  return sum;
}

double ml_neg_spectral(double alpha, double x) {
  if (x == 0.0) return 1.0;
  // E_a(-t^a) = int_0^inf exp(-r t) K_a(r) dr with t = x^{1/a}; substituting
  // r = w^{1/a} turns r^{a-1} dr into dw/a and the integrand is smooth at 0.
  const double s = std::sin(alpha * kPi);
  const double c = std::cos(alpha * kPi);
  const double inv_alpha = 1.0 / alpha;
  const double pref = s / (alpha * kPi);
  auto integrand = [=](double w) {
    const double den = w * w + 2.0 * w * c + 1.0;
    return pref * std::exp(-std::pow(x * w, inv_alpha)) / den;
  };
  const double w_end = std::pow(42.0, alpha) / x;
  std::vector<double> breaks{0.0};
  for (double b : {1.0 / x, std::max(-c, 0.0), 1.0}) {
    if (b > 0.0 && b < w_end) breaks.push_back(b);
  }
  breaks.push_back(w_end);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  quad::Options opts;
  opts.abs_tol = 1e-16;
  opts.rel_tol = 1e-14;
  opts.max_intervals = 400;
  return quad::adaptive_breaks(integrand, breaks, opts).value;
}

double ml_neg_asymptotic(double alpha, double x, int terms) {
  double sum = 0.0;
  double xp = 1.0;
  for (int k = 1; k <= terms; ++k) {
    xp /= x;
    const double term = xp * recip_gamma(1.0 - k * alpha);
    sum += (k % 2 == 1) ? term : -term;
  }
  return sum;
}

double ml_neg(FractionalOrder order, double x) {
  require_nonnegative(x, "ml_neg");
  const double alpha = order.value();
  if (x <= ml_series_threshold(alpha)) return ml_neg_series(alpha, x);
  return ml_neg_spectral(alpha, x);
}

// ---------------------------------------------------------------------------
// Mainardi function

double mainardi_series_threshold(double alpha) { return alpha <= 0.95 ? 1.0 : 0.5; }

double mainardi_series(double alpha, double tau) {
  double sum = recip_gamma(1.0 - alpha);
  double comp = 0.0;
  double power = 1.0;  // (-tau)^n / n!
  int small_run = 0;
  for (int n = 1; n < 1000; ++n) {
    power *= -tau / n;
    const double term = power * recip_gamma(1.0 - alpha - alpha * n);
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    if (std::abs(term) < 1e-17 * std::abs(sum)) {
      if (++small_run >= 20) break;
    } else {
      small_run = 0;
    }
  }
  return sum;
}

double mainardi_integral(double alpha, double tau) {
  if (tau == 0.0) return recip_gamma(1.0 - alpha);
  const double q = 1.0 / (1.0 - alpha);
  // A(phi) = [sin(a phi)/sin(phi)]^{1/(1-a)} sin((1-a)phi)/sin(a phi), increasing
  // from A(0) = (1-a) a^{a/(1-a)} to +inf at phi = pi.
  auto log_sinc = [](double x) {
    if (std::abs(x) < 1e-4) return -x * x / 6.0;
    return std::log(std::sin(x) / x);
  };
  auto log_a = [=](double phi) {
    const double log_sinc_phi =
        phi < 1.0 ? log_sinc(phi) : std::log(std::sin(kPi - phi) / phi);
    return q * (std::log(alpha) + log_sinc(alpha * phi) - log_sinc_phi) +
           std::log((1.0 - alpha) / alpha) + log_sinc((1.0 - alpha) * phi) -
           log_sinc(alpha * phi);
  };
  const double c = std::pow(tau, q);
  const double a0 = std::exp(log_a(0.0));
  auto integrand = [&](double phi) {
    const double la = log_a(phi);
    const double a = std::exp(la);
    if (!std::isfinite(a)) return 0.0;
    return std::exp(la - c * (a - a0));
  };
  // Peak of A e^{-cA} sits where A = 1/c; for large c it is pinned at phi = 0.
  std::vector<double> breaks{0.0};
  if (1.0 / c > a0) {
    double lo = 0.0;
    double hi = kPi;
    for (int i = 0; i < 80; ++i) {
      const double mid = 0.5 * (lo + hi);
      (std::exp(log_a(mid)) < 1.0 / c ? lo : hi) = mid;
    }
    const double peak = 0.5 * (lo + hi);
    for (double b : {0.5 * peak, peak, 0.5 * (peak + kPi)}) {
      if (b > 0.0 && b < kPi) breaks.push_back(b);
    }
  } else {
    const double width = 1.0 / std::sqrt(c * a0 + 1.0);
    for (double b : {width, 4.0 * width, 16.0 * width}) {
      if (b < kPi) breaks.push_back(b);
    }
  }
  breaks.push_back(kPi);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  quad::Options opts;
  opts.abs_tol = 0.0;
  opts.rel_tol = 1e-14;
  opts.max_intervals = 600;
  const double integral = quad::adaptive_breaks(integrand, breaks, opts).value;
  const double log_m = alpha * q * std::log(tau) - std::log((1.0 - alpha) * kPi) - c * a0 +
                       std::log(integral);
  return std::exp(log_m);
}

double mainardi(FractionalOrder order, double tau) {
  require_nonnegative(tau, "mainardi");
  const double alpha = order.value();
  if (tau <= mainardi_series_threshold(alpha)) return mainardi_series(alpha, tau);
  return mainardi_integral(alpha, tau);
}

}  // namespace subdiff
