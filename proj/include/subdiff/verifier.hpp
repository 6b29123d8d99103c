#pragma once

#include <optional>
#include <string>
#include <vector>

#include "subdiff/scales_norms.hpp"
#include "subdiff/solver.hpp"

namespace subdiff {

struct Comparand {
  enum class Kind { none, mz, kappa_phi, kappa_en, constant, power_tail };
  Kind kind = Kind::none;
  double factor = 1.0;     // multiplies kappa for kappa_phi / kappa_en
  double value = 0.0;      // constant
  double amplitude = 1.0;  // power_tail
  double beta = 0.0;
  /// Measure |prefactor u / C - 1| instead of |prefactor u - C|.
  bool relative = false;

  std::string str() const;
};

struct Check {
  enum class Kind { to_zero, to_zero_log, threshold, rate_fit, far_field };
  Kind kind = Kind::to_zero;
  double bound = 0.1;           // final/initial ratio, or absolute threshold
  bool require_decrease = true; // threshold: also demand a decreasing tail
  double power_tol = 0.02;
  double log_tol = 0.2;
  bool fit_log = false;
  std::optional<double> max_power;  // fitted power of the series must not exceed this
};

/// One time sweep: measured(t) = weight(t) * || prefactor(t) u(., t) - C ||
/// over region(t).
struct Experiment {
  std::string id;       // "V6", "V1/N2-p2", ...
  std::string theorem;  // "V6"
  int dim = 1;
  FractionalOrder order{0.5};
  Datum datum{1, Gaussian{}};
  ScaleSpec scale;
  NormSpec norm;
  std::vector<double> times;
  Comparand comparand;
  RateLaw prefactor;
  RateLaw weight;
  Check check;
  Method method = Method::convolution;
  int nodes = 96;
  bool expect_failure = false;
  std::vector<double> probe_radii;  // far_field checks only
};

struct SeriesPoint {
  double t = 0.0;
  double measured = 0.0;
  double theoretical = 0.0;
};

struct RateFit {
  double power = 0.0;
  std::optional<double> log_power;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<std::pair<int, double>> decade_residuals;  // (floor log10 t, rms residual)

  std::string str() const;
};

struct Verdict {
  std::string id;
  std::string theorem;
  bool passed = false;
  bool check_met = false;
  bool expect_failure = false;
  std::string law;
  std::string threshold;
  std::string detail;
  std::vector<SeriesPoint> series;
  std::optional<RateFit> fit;
};

/// 10^lo .. 10^hi with per_decade points per decade.
std::vector<double> log_times(int lo_decade, int hi_decade, int per_decade = 2);

/// Throws HypothesisError when e breaks the assumptions of its theorem.
void check_hypotheses(const Experiment& e);

/// Applies prefactor, comparand and norm to a solution snapshot.
double measure_snapshot(const Experiment& e, const Snapshot& u);
/// Radii at which the solution is sampled for time t.
std::vector<double> experiment_radii(const Experiment& e, double t);
Snapshot solve_snapshot(const Experiment& e, double t, const std::vector<double>& radii);

std::vector<SeriesPoint> run_experiment(const Experiment& e);
RateFit fit_rate(const std::vector<double>& t, const std::vector<double>& v, bool with_log = false);

Verdict evaluate(const Experiment& e);

/// Default experiments of the suite, including the negative control "NC6".
std::vector<Experiment> standard_suite();
/// Experiments whose theorem (or full id) equals id.
std::vector<Experiment> suite_for(const std::string& id);

/// Characteristic-scale and compact-set rate experiments (comparand none).
Experiment rate_experiment(int dim, double alpha, const Datum& d, const ScaleSpec& scale,
                           const NormSpec& norm, std::vector<double> times);

}  // namespace subdiff

namespace subdiff {

/// Threshold (alpha (beta - N) / (2 sigma))^{(2-alpha)/2} separating the
/// kernel-dominated and tail-dominated very fast regimes; sigma is the fitted
/// tail rate of the profile table.
double mu_beta(const ProfileTable& table, double beta);

/// Gaussian scale a for which t^alpha u(0, t) = M kappa (alpha/2) log t + o(1)
/// in N = 2, i.e. the datum's log-moment cancels the profile constant c0:
/// a = exp(2 c0 / kappa + gamma_E) / 4.
double log_centred_scale(const ProfileTable& table);

}  // namespace subdiff
