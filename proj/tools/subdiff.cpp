#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "subdiff/config.hpp"
#include "subdiff/errors.hpp"
#include "subdiff/l1_oracle.hpp"
#include "subdiff/parallel.hpp"
#include "subdiff/profile.hpp"
#include "subdiff/solver.hpp"
#include "subdiff/special_functions.hpp"
#include "subdiff/verifier.hpp"

#ifndef SUBDIFF_VERSION
#define SUBDIFF_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace subdiff;

namespace {

std::string full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

class Outputs {
 public:
  Outputs(fs::path dir, std::string command) : dir_(std::move(dir)), command_(std::move(command)) {
    fs::create_directories(dir_);
  }

  void write(const std::string& name, const std::string& content) {
    const fs::path target = dir_ / name;
    const fs::path tmp = dir_ / (name + ".tmp");
    {
      std::ofstream out(tmp, std::ios::binary);
      out << content;
      if (!out) throw Error("cannot write " + tmp.string());
    }
    fs::rename(tmp, target);
    files_.push_back({{"file", name}, {"bytes", content.size()}, {"fnv1a64", fnv1a(content)}});
  }

  void table(int dim, double alpha) {
    if (!seen_.insert({dim, alpha}).second) return;
    std::ostringstream s;
    write_profile_csv(*cached_profile(dim, FractionalOrder(alpha)), s);
    tables_.push_back({{"dim", dim}, {"alpha", alpha}, {"fnv1a64", fnv1a(s.str())}});
  }

  void finish(const std::string& config_text, json extra = json::object()) {
    json m;
    m["tool"] = "subdiff";
    m["version"] = SUBDIFF_VERSION;
    m["command"] = command_;
    m["config"] = config_text;
    m["outputs"] = files_;
    m["tables"] = tables_;
    m["threads"] = worker_count();
    for (auto& [k, v] : extra.items()) m[k] = v;
    const std::string text = m.dump(2) + "\n";
    const fs::path tmp = dir_ / "manifest.json.tmp";
    {
      std::ofstream out(tmp);
      out << text;
    }
    fs::rename(tmp, dir_ / "manifest.json");
  }

 private:
  fs::path dir_;
  std::string command_;
  json files_ = json::array();
  json tables_ = json::array();
  std::set<std::pair<int, double>> seen_;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

RunConfig load_config(const std::string& path) {
  return path.empty() ? parse_config("") : parse_config(read_file(path));
}

std::string file_id(std::string id) {
  for (char& c : id) {
    if (c == '/' || c == '=' || c == ' ') c = '_';
  }
  return id;
}

std::string series_csv(const Verdict& v) {
  std::ostringstream s;
  s << "t,measured,theoretical\n";
  for (const auto& p : v.series) s << full(p.t) << "," << full(p.measured) << "," << full(p.theoretical) << "\n";
  return s.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += (c == '"') ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fundamental solution, mild solutions and decay rates of the Caputo time-fractional heat equation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", SUBDIFF_VERSION);

  std::string command;
  for (int i = 0; i < argc; ++i) command += (i ? " " : "") + std::string(argv[i]);

  // ml
  double ml_alpha = 0.5, ml_x = 0.0;
  bool ml_mainardi = false;
  auto* ml = app.add_subcommand("ml", "Print E_alpha(-x) (or M_alpha(x) with --mainardi) in full precision");
  ml->add_option("--alpha", ml_alpha, "order in (0,1)")->required();
  ml->add_option("--x", ml_x, "argument >= 0")->required();
  ml->add_flag("--mainardi", ml_mainardi, "evaluate the Mainardi function instead");

  // profile
  int pr_dim = 1;
  double pr_alpha = 0.5;
  std::string out_dir = ".";
  auto* profile = app.add_subcommand("profile", "Build and write the profile table F for (dim, alpha)");
  profile->add_option("--dim", pr_dim)->required()->check(CLI::Range(1, 3));
  profile->add_option("--alpha", pr_alpha)->required();
  profile->add_option("--out", out_dir, "output directory");

  std::string config_path;
  auto* solve = app.add_subcommand("solve", "Mild solution snapshots u(r, t) for the configured datum");
  solve->add_option("--config", config_path, "INI config file");
  solve->add_option("--out", out_dir, "output directory");

  auto* oracle = app.add_subcommand("oracle-l1", "L1 time stepping against the mild-solution routes");
  oracle->add_option("--config", config_path, "INI config file");
  oracle->add_option("--out", out_dir, "output directory");

  std::string suite, id;
  auto* verify = app.add_subcommand("verify", "Run theorem checks and write a report");
  auto* suite_opt = verify->add_option("--suite", suite, "'all'");
  verify->add_option("--id", id, "single theorem or experiment id, e.g. V7")->excludes(suite_opt);
  verify->add_option("--config", config_path, "INI config overriding experiment fields");
  verify->add_option("--out", out_dir, "report directory");

  auto* rates = app.add_subcommand("rates", "Fit the decay law of ||u|| over the configured scale and norm");
  rates->add_option("--config", config_path, "INI config file");
  rates->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (ml->parsed()) {
      const FractionalOrder ord(ml_alpha);
      std::printf("%.17g\n", ml_mainardi ? mainardi(ord, ml_x) : ml_neg(ord, ml_x));
      return 0;
    }

    if (profile->parsed()) {
      const auto table = cached_profile(pr_dim, FractionalOrder(pr_alpha));
      Outputs out(out_dir, command);
      std::ostringstream s;
      write_profile_csv(*table, s);
      const std::string name = "profile_N" + std::to_string(pr_dim) + "_alpha" + full(pr_alpha) + ".csv";
      out.write(name, s.str());
      out.table(pr_dim, pr_alpha);
      json summary{{"mass", profile_mass(*table)},   {"second_moment", second_moment(*table)},
                   {"kappa", table->kappa},          {"f_zero", table->f_zero},
                   {"kappa_hat", table->kappa_hat},  {"sigma_hat", table->sigma_hat},
                   {"r_inner", table->r_inner},      {"r_outer", table->r_outer},
                   {"nodes", table->radii.size()}};
      out.finish("", {{"profile", summary}});
      std::cout << name << "\n" << summary.dump(2) << "\n";
      return 0;
    }

    const RunConfig cfg = load_config(config_path);
    const std::string cfg_text = serialize_config(cfg);

    if (solve->parsed()) {
      const Datum d = cfg.datum();
      const FractionalOrder ord(cfg.alpha);
      const auto radii = uniform_radii(0.0, cfg.r_max, cfg.n_radii);
      Outputs out(out_dir, command);
      std::ostringstream s;
      s << "t,r,u\n";
      for (double t : cfg.times) {
        const Snapshot snap = cfg.method_enum() == Method::spectral
                                  ? spectral_snapshot(d, ord, t, radii)
                                  : convolution_snapshot(d, *cached_profile(cfg.dim, ord), t, radii);
        for (std::size_t i = 0; i < radii.size(); ++i) s << full(t) << "," << full(radii[i]) << "," << full(snap.values[i]) << "\n";
      }
      out.write("solution.csv", s.str());
      if (cfg.method_enum() == Method::convolution) out.table(cfg.dim, cfg.alpha);
      out.finish(cfg_text, {{"method", cfg.method}});
      return 0;
    }

    if (oracle->parsed()) {
      const Datum d = cfg.datum();
      const FractionalOrder ord(cfg.alpha);
      L1Grid grid;
      grid.dim = cfg.dim;
      grid.order = ord;
      grid.r_trunc = cfg.r_trunc;
      grid.n_space = cfg.n_space;
      grid.t_final = *std::max_element(cfg.times.begin(), cfg.times.end());
      grid.steps = cfg.steps;
      grid.grading = cfg.grading;
      const auto snaps = solve_l1(d, grid, cfg.times);
      const auto table = cached_profile(cfg.dim, ord);
      Outputs out(out_dir, command);
      std::ostringstream s;
      s << "t,r,u_l1,u_reference\n";
      json errors = json::array();
      for (const auto& sn : snaps) {
        double peak = 0.0, worst = 0.0;
        for (std::size_t i = 0; i < sn.radii.size(); ++i) {
          const double ref = mild_solution_convolution(d, *table, sn.t, sn.radii[i]);
          peak = std::max(peak, std::abs(ref));
          worst = std::max(worst, std::abs(sn.values[i] - ref));
          s << full(sn.t) << "," << full(sn.radii[i]) << "," << full(sn.values[i]) << "," << full(ref) << "\n";
        }
        errors.push_back({{"t", sn.t}, {"max_relative_error", worst / peak}});
        std::printf("t=%.6g  max |u_l1 - u| / max|u| = %.3e\n", sn.t, worst / peak);
      }
      out.write("l1.csv", s.str());
      out.table(cfg.dim, cfg.alpha);
      out.finish(cfg_text, {{"errors", errors}});
      return 0;
    }

    if (verify->parsed()) {
      std::string which = !id.empty() ? id : (!suite.empty() ? suite : (!cfg.experiment.empty() ? cfg.experiment : ""));
      if (which.empty()) throw ConfigError("verify needs --suite all or --id <experiment>");
      if (!suite.empty() && suite != "all") throw ConfigError("--suite accepts only 'all'");
      Outputs out(out_dir, command);
      std::ostringstream summary;
      summary << "id,verdict,fitted_law,threshold,detail\n";
      bool all_pass = true;
      for (Experiment e : suite_for(which)) {
        if (!config_path.empty()) e = cfg.apply_to(std::move(e));
        const Verdict v = evaluate(e);
        all_pass = all_pass && v.passed;
        out.write(file_id(v.id) + ".csv", series_csv(v));
        out.table(e.dim, e.order.value());
        const std::string verdict = std::string(v.passed ? "PASS" : "FAIL") + (v.expect_failure ? " (expected failure)" : "");
        summary << csv_field(v.id) << "," << verdict << "," << csv_field(v.fit ? v.fit->str() : v.law) << ","
                << csv_field(v.threshold) << "," << csv_field(v.detail) << "\n";
        std::printf("%-14s %-4s %s\n", v.id.c_str(), v.passed ? "PASS" : "FAIL", v.detail.c_str());
        std::fflush(stdout);
      }
      out.write("summary.csv", summary.str());
      out.finish(cfg_text, {{"suite", which}});
      return all_pass ? 0 : 1;
    }

    if (rates->parsed()) {
      Experiment e = rate_experiment(cfg.dim, cfg.alpha, cfg.datum(), cfg.scale_spec(), cfg.norm_spec(), cfg.time_grid());
      e = cfg.apply_to(std::move(e));
      e.check.kind = Check::Kind::rate_fit;
      const Verdict v = evaluate(e);
      Outputs out(out_dir, command);
      out.write("rates.csv", series_csv(v));
      out.table(cfg.dim, cfg.alpha);
      out.finish(cfg_text, {{"theoretical", v.law}, {"fit", v.fit ? v.fit->str() : ""}, {"passed", v.passed}});
      std::printf("theoretical %s\nfitted      %s\n%s (%s)\n", v.law.c_str(), v.fit ? v.fit->str().c_str() : "-",
                  v.passed ? "PASS" : "FAIL", v.threshold.c_str());
      return v.passed ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const HypothesisError& e) {
    std::cerr << "hypothesis violation: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const ToleranceError& e) {
    std::cerr << "tolerance failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
