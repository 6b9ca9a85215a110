// Drives the installed binary end to end: exit codes, artifacts and
// byte-reproducibility of outputs.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

std::string tmp_dir(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("gpelab_cli_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

int run(const std::string& args) {
  std::string cmd = std::string(GPELAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("cli runs, fails and reproduces byte-identically") {
  std::string dir = tmp_dir("main");
  std::string cfg = dir + "/config.json";
  {
    std::ofstream out(cfg);
    out << R"({
      "potential": {"family": "double_well", "params": [1.0, 1.0]},
      "grid": {"half_width": 8.0, "points": 1024},
      "physics": {"hbar": 0.25, "eta": 0.5, "sigma": 2},
      "run": {"modes": 64, "record_stride": 8}
    })";
  }

  CHECK(run("spectrum") == 1);  // --config required
  CHECK(run("--config " + dir + "/missing.json spectrum") == 1);

  REQUIRE(run("--config " + cfg + " --out " + dir + "/a spectrum") == 0);
  REQUIRE(run("--config " + cfg + " --out " + dir + "/b spectrum") == 0);
  for (const char* name : {"summary.json", "eigenvalues.csv", "eigenvectors.csv"}) {
    CHECK(slurp(dir + "/a/" + name) == slurp(dir + "/b/" + name));
    CHECK_FALSE(slurp(dir + "/a/" + name).empty());
  }

  REQUIRE(run("--config " + cfg + " --out " + dir + "/cmp compare") == 0);
  CHECK(fs::exists(dir + "/cmp/comparison.csv"));
  CHECK(fs::exists(dir + "/cmp/summary.json"));

  // numerically impossible request surfaces as a numerical failure
  std::string bad = dir + "/bad.json";
  {
    std::ofstream out(bad);
    out << R"({
      "potential": {"family": "double_well", "params": [1.0, 1.0]},
      "grid": {"half_width": 1.5, "points": 1024},
      "physics": {"hbar": 0.25}
    })";
  }
  CHECK(run("--config " + bad + " --out " + dir + "/x spectrum") == 2);
}
