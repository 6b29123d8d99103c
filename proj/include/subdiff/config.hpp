#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "subdiff/verifier.hpp"

namespace subdiff {

/// Parsed run configuration. Sections:
///   [problem] dim, alpha
///   [datum]   name, plus the datum's parameters
///   [scale]   spec      e.g. "characteristic(1,2)"
///   [norm]    spec      e.g. "p=inf", "weak-pc"
///   [run]     decade_lo, decade_hi, per_decade, times, r_max, n_radii,
///             nodes, method, output, experiment, power_tol, log_tol, bound,
///             steps, n_space, r_trunc, grading
struct RunConfig {
  int dim = 1;
  double alpha = 0.5;
  std::string datum_name = "gaussian";
  std::map<std::string, double> datum_params;
  std::string scale = "characteristic(1,2)";
  std::string norm = "p=inf";
  int decade_lo = 2;
  int decade_hi = 6;
  int per_decade = 2;
  std::vector<double> times{1.0};
  double r_max = 10.0;
  int n_radii = 201;
  int nodes = 96;
  std::string method = "convolution";
  std::string output = ".";
  std::string experiment;
  std::map<std::string, double> tolerances;  // power_tol, log_tol, bound
  int steps = 1000;
  int n_space = 400;
  double r_trunc = 40.0;
  double grading = 2.0;

  /// "section.key" entries present in the source text.
  std::set<std::string> given;

  Datum datum() const;
  ScaleSpec scale_spec() const;
  NormSpec norm_spec() const;
  Method method_enum() const;
  std::vector<double> time_grid() const;

  /// Replaces experiment fields that the config sets explicitly.
  Experiment apply_to(Experiment e) const;

  bool operator==(const RunConfig& o) const;
};

/// Throws ConfigError listing every violated constraint (line-numbered for
/// syntax errors).
RunConfig parse_config(std::string_view text);
std::string serialize_config(const RunConfig& c);

}  // namespace subdiff
