#pragma once

#include <limits>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace subdiff {

struct Gaussian {
  double scale = 1.0;  // u0 = M (4 pi a)^{-N/2} exp(-r^2 / (4a))
  double mass = 1.0;
  bool operator==(const Gaussian&) const = default;
};

struct BallIndicator {
  double radius = 1.0;
  double height = 1.0;
  bool operator==(const BallIndicator&) const = default;
};

/// height * exp(1 - 1/(1 - (r/R)^2)) inside the ball, zero outside.
struct SmoothBump {
  double radius = 1.0;
  double height = 1.0;
  bool operator==(const SmoothBump&) const = default;
};

/// Bounded on the core, C^1 monotone blend on [core, 2 core], exactly
/// amplitude * r^{-beta} beyond 2 core.
struct PowerTail {
  double amplitude = 1.0;
  double beta = 4.0;
  double core = 1.0;
  bool operator==(const PowerTail&) const = default;
};

using DatumVariant = std::variant<Gaussian, BallIndicator, SmoothBump, PowerTail>;

enum class TailKind { compact, d_beta, exact_power };

struct TailClass {
  TailKind kind = TailKind::compact;
  double radius = 0.0;   // support radius (compact) or onset of the bound
  double beta = 0.0;     // infinity for Gaussian data
  double constant = 0.0; // C in |x|^beta u0 <= C, or A for exact power
};

/// Radial, nonnegative, integrable initial datum in R^dim. Immutable.
class Datum {
 public:
  Datum(int dim, DatumVariant v);

  /// "gaussian(scale=1,mass=1)", "ball_indicator(radius=1,height=2)",
  /// "ball_indicator(radius=1,mass=1)", "smooth_bump(radius=1)",
  /// "power_tail(amplitude=1,beta=5,core=1)". Bare names take defaults.
  static Datum parse(int dim, std::string_view spec);
  static Datum from_params(int dim, const std::string& name, const std::map<std::string, double>& params);

  int dim() const { return dim_; }
  const DatumVariant& variant() const { return v_; }
  double mass() const { return mass_; }
  double operator()(double r) const;
  double transform(double rho) const;
  TailClass tail_class() const;
  /// Radii where u0 or a derivative jumps.
  std::vector<double> breakpoints() const;
  /// Beyond this radius u0 is zero or below 1e-18 of its peak; +inf for power tails.
  double effective_radius() const;
  /// |u0^(rho)| < 1e-15 M for rho beyond this; +inf for algebraic decay.
  double transform_cutoff() const;
  double peak() const;
  std::string id() const;
  std::string name() const;

  bool operator==(const Datum& o) const { return dim_ == o.dim_ && v_ == o.v_; }

 private:
  int dim_;
  DatumVariant v_;
  double mass_ = 0.0;
  struct Lazy;
  std::shared_ptr<Lazy> lazy_;
};

double datum_mass(const Datum& d);
double datum_eval(const Datum& d, double r);
double datum_radial_transform(const Datum& d, double rho);

}  // namespace subdiff
