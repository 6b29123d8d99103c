#include <doctest.h>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(SUBDIFF_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const char* name) {
  const fs::path dir = fs::temp_directory_path() / ("subdiff_cli_test_" + std::string(name));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("exit codes") {
  CHECK(run("ml --alpha 0.5 --x 1") == 0);
  CHECK(run("ml --alpha 1.0 --x 1") == 2);
  CHECK(run("ml --alpha 0.5") == 2);
  CHECK(run("frobnicate") == 2);
  const fs::path dir = scratch("codes");
  std::ofstream(dir / "bad.ini") << "[problem]\nalpha = 0.5\n[scale]\nspec = intermediate(pow(0.3),1,2)\n";
  CHECK(run("rates --config " + (dir / "bad.ini").string() + " --out " + dir.string()) == 2);
  CHECK(run("verify --id nope --out " + dir.string()) == 2);
}

TEST_CASE("verify writes series, summary and manifest") {
  const fs::path dir = scratch("verify");
  REQUIRE(run("verify --id V10 --out " + dir.string()) == 0);
  CHECK(fs::exists(dir / "V10.csv"));
  const std::string summary = slurp(dir / "summary.csv");
  CHECK(summary.rfind("id,verdict,fitted_law,threshold", 0) == 0);
  CHECK(summary.find("V10,PASS") != std::string::npos);

  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["tool"] == "subdiff");
  CHECK(manifest["tables"].size() == 1);
  bool found = false;
  for (const auto& f : manifest["outputs"]) {
    if (f["file"] == "summary.csv") {
      found = true;
      CHECK(f["bytes"] == summary.size());
    }
  }
  CHECK(found);
  for (const auto& entry : fs::directory_iterator(dir)) CHECK(entry.path().extension() != ".tmp");
}

TEST_CASE("profile output") {
  const fs::path dir = scratch("profile");
  REQUIRE(run("profile --dim 1 --alpha 0.5 --out " + dir.string()) == 0);
  const std::string csv = slurp(dir / "profile_N1_alpha0.5.csv");
  CHECK_FALSE(csv.empty());
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["outputs"][0]["fnv1a64"] == manifest["tables"][0]["fnv1a64"]);
}
