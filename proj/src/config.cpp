#include "subdiff/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "subdiff/errors.hpp"

namespace subdiff {

namespace pt = boost::property_tree;

namespace {

std::string num(double v) { return shortest(v); }

std::string unquote(std::string s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\''))) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"problem", {"dim", "alpha"}},
      {"datum", {"name", "scale", "mass", "radius", "height", "amplitude", "beta", "core"}},
      {"scale", {"spec"}},
      {"norm", {"spec"}},
      {"run",
       {"decade_lo", "decade_hi", "per_decade", "times", "r_max", "n_radii", "nodes", "method", "output",
        "experiment", "power_tol", "log_tol", "bound", "steps", "n_space", "r_trunc", "grading"}},
  };
  return keys;
}

struct Collector {
  std::vector<std::string> errors;

  double number(const std::string& key, const std::string& text) {
    try {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used == text.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    errors.push_back(key + ": not a finite number: '" + text + "'");
    return 0.0;
  }

  int integer(const std::string& key, const std::string& text) {
    const double v = number(key, text);
    if (v != std::floor(v) || std::abs(v) > 1e9) {
      errors.push_back(key + ": not an integer: '" + text + "'");
      return 0;
    }
    return static_cast<int>(v);
  }
};

}  // namespace

RunConfig parse_config(std::string_view text) {
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("parse error at line " + std::to_string(e.line()) + ": " + e.message());
  }
  RunConfig c;
  Collector col;
  for (const auto& [section, body] : tree) {
    const auto known = known_keys().find(section);
    if (body.empty() && !body.data().empty()) {
      col.errors.push_back("key '" + section + "' outside any section");
      continue;
    }
    if (known == known_keys().end()) {
      col.errors.push_back("unknown section [" + section + "]");
      continue;
    }
    for (const auto& [key, node] : body) {
      const std::string full = section + "." + key;
      if (!known->second.contains(key)) {
        col.errors.push_back("unknown key '" + full + "'");
        continue;
      }
      c.given.insert(full);
      const std::string v = unquote(node.data());
      if (section == "problem") {
        if (key == "dim") c.dim = col.integer(full, v);
        if (key == "alpha") c.alpha = col.number(full, v);
      } else if (section == "datum") {
        if (key == "name") {
          c.datum_name = v;
        } else {
          c.datum_params[key] = col.number(full, v);
        }
      } else if (section == "scale") {
        c.scale = v;
      } else if (section == "norm") {
        c.norm = v;
      } else {
        if (key == "decade_lo") c.decade_lo = col.integer(full, v);
        else if (key == "decade_hi") c.decade_hi = col.integer(full, v);
        else if (key == "per_decade") c.per_decade = col.integer(full, v);
        else if (key == "r_max") c.r_max = col.number(full, v);
        else if (key == "n_radii") c.n_radii = col.integer(full, v);
        else if (key == "nodes") c.nodes = col.integer(full, v);
        else if (key == "method") c.method = v;
        else if (key == "output") c.output = v;
        else if (key == "experiment") c.experiment = v;
        else if (key == "steps") c.steps = col.integer(full, v);
        else if (key == "n_space") c.n_space = col.integer(full, v);
        else if (key == "r_trunc") c.r_trunc = col.number(full, v);
        else if (key == "grading") c.grading = col.number(full, v);
        else if (key == "times") {
          c.times.clear();
          std::stringstream ss(v);
          for (std::string item; std::getline(ss, item, ',');) c.times.push_back(col.number(full, unquote(item)));
        } else {
          c.tolerances[key] = col.number(full, v);
        }
      }
    }
  }

  // Semantic checks; every violation is reported.
  auto& err = col.errors;
  if (c.dim < 1 || c.dim > 3) err.push_back("problem.dim must be 1, 2 or 3");
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) err.push_back("problem.alpha: alpha must lie in (0,1), got " + num(c.alpha));
  const bool dims_ok = c.dim >= 1 && c.dim <= 3;
  if (dims_ok) {
    try {
      (void)c.datum();
    } catch (const Error& e) {
      err.push_back(std::string("datum: ") + e.what());
    }
  }
  try {
    const ScaleSpec sc = ScaleSpec::parse(c.scale);
    if (c.alpha > 0.0 && c.alpha < 1.0) sc.validate(c.alpha);
  } catch (const Error& e) {
    err.push_back(std::string("scale.spec: ") + e.what());
  }
  try {
    (void)NormSpec::parse(c.norm);
  } catch (const Error& e) {
    err.push_back(std::string("norm.spec: ") + e.what());
  }
  if (c.decade_hi <= c.decade_lo) err.push_back("run.decade_hi must exceed run.decade_lo");
  if (c.per_decade < 1) err.push_back("run.per_decade must be >= 1");
  if (c.times.empty()) err.push_back("run.times must list at least one time");
  for (double t : c.times) {
    if (!(t > 0.0)) {
      err.push_back("run.times must be positive");
      break;
    }
  }
  if (!(c.r_max > 0.0)) err.push_back("run.r_max must be positive");
  if (c.n_radii < 2) err.push_back("run.n_radii must be >= 2");
  if (c.nodes < 64) err.push_back("run.nodes must be >= 64");
  if (c.method != "spectral" && c.method != "convolution") err.push_back("run.method must be spectral or convolution");
  if (c.steps < 1 || c.n_space < 4) err.push_back("run.steps >= 1 and run.n_space >= 4 required");
  if (!(c.r_trunc > 0.0)) err.push_back("run.r_trunc must be positive");
  if (!(c.grading >= 1.0)) err.push_back("run.grading must be >= 1");
  for (const auto& [k, v] : c.tolerances) {
    if (!(v > 0.0)) err.push_back("run." + k + " must be positive");
  }
  if (!err.empty()) {
    std::string msg = "invalid config:";
    for (const auto& e : err) msg += "\n  - " + e;
    throw ConfigError(msg);
  }
  return c;
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream out;
  out << "[problem]\ndim = " << c.dim << "\nalpha = " << num(c.alpha) << "\n\n";
  out << "[datum]\nname = " << c.datum_name << "\n";
  for (const auto& [k, v] : c.datum_params) out << k << " = " << num(v) << "\n";
  out << "\n[scale]\nspec = \"" << c.scale << "\"\n\n[norm]\nspec = \"" << c.norm << "\"\n\n";
  out << "[run]\ndecade_lo = " << c.decade_lo << "\ndecade_hi = " << c.decade_hi << "\nper_decade = " << c.per_decade
      << "\ntimes = ";
  for (std::size_t i = 0; i < c.times.size(); ++i) out << (i ? "," : "") << num(c.times[i]);
  out << "\nr_max = " << num(c.r_max) << "\nn_radii = " << c.n_radii << "\nnodes = " << c.nodes
      << "\nmethod = " << c.method << "\noutput = " << c.output << "\n";
  if (!c.experiment.empty()) out << "experiment = " << c.experiment << "\n";
  for (const auto& [k, v] : c.tolerances) out << k << " = " << num(v) << "\n";
  out << "steps = " << c.steps << "\nn_space = " << c.n_space << "\nr_trunc = " << num(c.r_trunc)
      << "\ngrading = " << num(c.grading) << "\n";
  return out.str();
}

Datum RunConfig::datum() const { return Datum::from_params(dim, datum_name, datum_params); }
ScaleSpec RunConfig::scale_spec() const { return ScaleSpec::parse(scale); }
NormSpec RunConfig::norm_spec() const { return NormSpec::parse(norm); }
Method RunConfig::method_enum() const { return method == "spectral" ? Method::spectral : Method::convolution; }
std::vector<double> RunConfig::time_grid() const { return log_times(decade_lo, decade_hi, per_decade); }

Experiment RunConfig::apply_to(Experiment e) const {
  const auto has = [&](const char* k) { return given.contains(k); };
  const auto has_section = [&](const std::string& s) {
    return std::any_of(given.begin(), given.end(), [&](const std::string& g) { return g.rfind(s + ".", 0) == 0; });
  };
  if (has("problem.dim")) e.dim = dim;
  if (has("problem.alpha")) e.order = FractionalOrder(alpha);
  if (has_section("datum") || has("problem.dim")) e.datum = datum();
  if (has("scale.spec")) e.scale = scale_spec();
  if (has("norm.spec")) e.norm = norm_spec();
  if (has("run.decade_lo") || has("run.decade_hi") || has("run.per_decade")) e.times = time_grid();
  if (has("run.nodes")) e.nodes = nodes;
  if (has("run.method")) e.method = method_enum();
  if (auto it = tolerances.find("power_tol"); it != tolerances.end()) e.check.power_tol = it->second;
  if (auto it = tolerances.find("log_tol"); it != tolerances.end()) e.check.log_tol = it->second;
  if (auto it = tolerances.find("bound"); it != tolerances.end()) e.check.bound = it->second;
  return e;
}

bool RunConfig::operator==(const RunConfig& o) const {
  return dim == o.dim && alpha == o.alpha && datum_name == o.datum_name && datum_params == o.datum_params &&
         scale == o.scale && norm == o.norm && decade_lo == o.decade_lo && decade_hi == o.decade_hi &&
         per_decade == o.per_decade && times == o.times && r_max == o.r_max && n_radii == o.n_radii &&
         nodes == o.nodes && method == o.method && output == o.output && experiment == o.experiment &&
         tolerances == o.tolerances && steps == o.steps && n_space == o.n_space && r_trunc == o.r_trunc &&
         grading == o.grading;
}

}  // namespace subdiff
