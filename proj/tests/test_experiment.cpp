#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "gpelab/experiment.hpp"

using namespace gpelab;
namespace fs = std::filesystem;

namespace {

std::string tmp_dir(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("gpelab_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  nlohmann::json j;
  in >> j;
  return j;
}

}  // namespace

TEST_CASE("config parsing, defaults and validation") {
  ExperimentConfig c = config_from_json(R"({
    "seed": 7,
    "potential": {"family": "double_well", "params": [1.0, 1.0]},
    "grid": {"half_width": 8.0, "points": 1024},
    "physics": {"hbar": 0.2, "eta": 1.0, "sigma": 2},
    "run": {"modes": 48, "method": "eigenbasis"}
  })");
  CHECK(c.seed == 7);
  CHECK(c.hbar == 0.2);
  REQUIRE(c.eta.has_value());
  CHECK(*c.eta == 1.0);
  CHECK(c.modes == 48);
  CHECK(c.potential.well_count() == 2);
  CHECK_FALSE(c.digest.empty());

  CHECK_THROWS_AS(config_from_json(R"({"schema": "other"})"), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json(R"({"physics": {"hbar": -1}})"), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json(R"({"run": {"method": "magic"}})"), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json(R"({"potential": {"family": "well?"}})"),
                  std::invalid_argument);
}

TEST_CASE("digest is canonical") {
  std::string a = R"({"seed": 1, "physics": {"hbar": 0.2}})";
  std::string b = R"({"physics": {"hbar": 0.2}, "seed": 1})";
  CHECK(config_from_json(a).digest == config_from_json(b).digest);
  CHECK(config_from_json(a).digest != config_from_json(R"({"seed": 2})").digest);
}

TEST_CASE("requested eta is realized by the derived eps") {
  ExperimentConfig c;
  c.potential = make_double_well(1.0, 1.0);
  c.hbar = 0.2;
  c.points = 1024;
  c.discretization = "fourier";
  Workspace ws = make_workspace(c, 8);
  double eps = eps_for_eta(ws, c, 1.7);
  DnlsModel m = extract_coefficients(ws.spectral, ws.basis, eps, c.sigma);
  CHECK(m.eta_eom() == doctest::Approx(1.7).epsilon(1e-9));
}

TEST_CASE("spectrum subcommand writes the full artifact set") {
  ExperimentConfig c = config_from_json(R"({
    "potential": {"family": "double_well", "params": [1.0, 1.0]},
    "grid": {"half_width": 8.0, "points": 1024},
    "physics": {"hbar": 0.2}
  })");
  c.out_dir = tmp_dir("spectrum");
  REQUIRE(run_subcommand("spectrum", c) == 0);

  nlohmann::json s = read_json(c.out_dir + "/summary.json");
  CHECK(s["config_digest"] == c.digest);
  CHECK(s["agmon"][0].get<double>() == doctest::Approx(4.0 / 3.0).epsilon(1e-8));
  CHECK(s["omega"].get<double>() > 0.0);
  CHECK(s["hypothesis1"]["pass"].get<bool>());
  CHECK(fs::exists(c.out_dir + "/eigenvalues.csv"));
  CHECK(fs::exists(c.out_dir + "/eigenvectors.csv"));
  CHECK(fs::exists(c.out_dir + "/potential.csv"));
}

TEST_CASE("reduced-model run reproduces the linear beat through the CLI layer") {
  ExperimentConfig c = config_from_json(R"({
    "potential": {"family": "double_well", "params": [1.0, 1.0]},
    "physics": {"eta": 0.0, "sigma": 2},
    "run": {"tau_end": 6.0, "dtau": 0.001},
    "initial": {"type": "well", "index": 1}
  })");
  c.out_dir = tmp_dir("dnls");
  REQUIRE(run_subcommand("simulate-dnls", c) == 0);

  std::ifstream csv(c.out_dir + "/trajectory.csv");
  REQUIRE(csv.good());
  std::string line;
  std::getline(csv, line);  // digest comment
  std::getline(csv, line);  // header
  double worst = 0.0;
  while (std::getline(csv, line)) {
    double tau, re1, im1, p1;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &tau, &re1, &im1, &p1) == 4);
    worst = std::max(worst, std::abs(p1 - std::cos(tau) * std::cos(tau)));
  }
  CHECK(worst < 1e-6);

  nlohmann::json s = read_json(c.out_dir + "/summary.json");
  CHECK(s["invariant_drift"].get<double>() <= 1e-10);
  CHECK(s["classification"] == "beating");
}

TEST_CASE("unknown subcommand and broken config map to the config exit code") {
  ExperimentConfig c;
  c.out_dir = tmp_dir("err");
  CHECK(run_subcommand("does-not-exist", c) == 1);
}

TEST_CASE("sweep produces per-run directories and a merged index") {
  ExperimentConfig c = config_from_json(R"({
    "potential": {"family": "double_well", "params": [1.0, 1.0]},
    "physics": {"sigma": 2},
    "sweep": {"subcommand": "spectrum", "hbar": [0.2, 0.3]}
  })");
  c.out_dir = tmp_dir("sweep");
  REQUIRE(run_subcommand("sweep", c) == 0);
  nlohmann::json idx = read_json(c.out_dir + "/index.json");
  REQUIRE(idx["runs"].size() == 2);
  CHECK(idx["runs"][0]["hbar"].get<double>() == 0.2);
  CHECK(idx["runs"][1]["summary"]["omega"].get<double>() >
        idx["runs"][0]["summary"]["omega"].get<double>());
}
