#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "subdiff/solver.hpp"

namespace subdiff {

/// Named growth families g(t):
///   pow(gamma)    t^gamma
///   charlog(theta) t^{alpha/2} (log t)^theta  (theta may be negative)
///   linlog        t (log t)^{(2-alpha)/alpha}
struct GFunction {
  enum class Family { power, charlog, linlog };
  Family family = Family::power;
  double param = 0.0;

  double operator()(double t, double alpha) const;
  std::string str() const;
  static GFunction parse(std::string_view s);
  bool operator==(const GFunction&) const = default;
};

enum class ScaleKind { compact, intermediate, characteristic, fast, very_fast, global, outer };

/// Space-time region family. Spec strings:
///   compact(mu)              |x| <= mu
///   intermediate(g, nu, mu)  nu g(t) <= |x| <= mu g(t), g = o(t^{alpha/2})
///   characteristic(nu, mu)   nu t^{alpha/2} <= |x| <= mu t^{alpha/2}
///   fast(g, nu, mu)          nu g(t) <= |x| <= mu g(t), g t^{-alpha/2} -> inf
///   very_fast(nu[, mu])      nu L <= |x| <= mu L, L = t^{alpha/2} (log t)^{(2-alpha)/2}, mu = 2 nu by default
///   global                   all of R^N (radius cap mu, default 40 t^{alpha/2})
///   outer(nu)                |x| >= nu t^{alpha/2} (same cap)
struct ScaleSpec {
  ScaleKind kind = ScaleKind::compact;
  GFunction g;
  double nu = 0.0;
  double mu = 1.0;

  std::string str() const;
  static ScaleSpec parse(std::string_view s);
  /// Throws ConfigError when g violates the family's growth condition for alpha.
  void validate(double alpha) const;
  bool operator==(const ScaleSpec&) const = default;
};

struct NormSpec {
  bool weak = false;  // Marcinkiewicz M^{p_c}
  double p = 2.0;     // may be +inf

  std::string str() const;
  static NormSpec parse(std::string_view s);
  bool operator==(const NormSpec&) const = default;
};

/// t^power (log t)^log_power g(t)^scale_power |log(g(t) t^{-alpha/2})|^ratio_log_power
struct RateLaw {
  double power = 0.0;
  double log_power = 0.0;
  double scale_power = 0.0;
  double ratio_log_power = 0.0;

  double operator()(double t, double alpha, double g = 1.0) const;
  std::string str() const;
  bool operator==(const RateLaw&) const = default;
};

struct Region {
  double lo = 0.0;
  double hi = 0.0;
};

/// p_c: 3 for N=3, +inf for N=2, none for N=1.
std::optional<double> critical_exponent(int dim);

Region region_at(const ScaleSpec& scale, double alpha, double t);

double lp_region_norm(const Snapshot& snap, Region region, double p);
double weak_pc_norm(const Snapshot& snap, Region region);
double region_norm(const Snapshot& snap, Region region, const NormSpec& norm);

RateLaw theoretical_rate(int dim, double alpha, const NormSpec& norm, const ScaleSpec& scale);

/// Clamped cubic spline through snapshot values.
class SnapshotInterpolant {
 public:
  explicit SnapshotInterpolant(const Snapshot& snap);
  double operator()(double r) const;
  std::size_t cell(double r) const;
  const std::vector<double>& radii() const { return x_; }
  /// Monotone pieces of |s| on [a, b], split at zeros and critical points.
  std::vector<std::pair<double, double>> monotone_pieces(double a, double b) const;

 private:
  std::vector<double> x_, y_, m_;
};

}  // namespace subdiff
