#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace subdiff::quad {

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Rule of the given order; cached, thread-safe after first use.
const GaussLegendre& gauss_legendre(int order);

/// Apply an n-point rule on [a, b].
template <class F>
double gauss_panel(const GaussLegendre& rule, F&& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return half * sum;
}

struct Result {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

struct Options {
  double abs_tol = 1e-14;
  double rel_tol = 1e-12;
  int max_intervals = 2000;
};

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature on [a, b]
/// (QUADPACK QAG strategy: bisect the interval with the largest error).
Result adaptive(const std::function<double(double)>& f, double a, double b,
                const Options& opts = {});

/// Adaptive integration over consecutive breakpoints; the error budget is
/// shared across panels.
Result adaptive_breaks(const std::function<double(double)>& f,
                       std::span<const double> breaks, const Options& opts = {});

/// Pairwise (cascade) summation.
double pairwise_sum(std::span<const double> values);

/// Wynn epsilon algorithm for accelerating partial sums of slowly
/// converging (typically alternating) series.
class WynnEpsilon {
 public:
  /// Feed the next partial sum; returns the current extrapolated estimate.
  double push(double partial_sum);
  double estimate() const { return estimate_; }
  /// Difference between the last two extrapolated estimates.
  double error() const { return error_; }
  std::size_t size() const { return count_; }

 private:
  std::vector<double> row_;
  std::size_t count_ = 0;
  double estimate_ = 0.0;
  double previous_ = 0.0;
  double error_ = 0.0;
};

}  // namespace subdiff::quad
