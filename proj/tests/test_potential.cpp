#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gpelab/potential.hpp"

using namespace gpelab;

TEST_CASE("double well family values and symmetry") {
  PotentialSpec v = make_double_well(1.0, 1.0);
  CHECK(v.value(0.0) == doctest::Approx(2.0));
  CHECK(v.value(1.0) == doctest::Approx(1.0));
  CHECK(v.value(-1.0) == doctest::Approx(1.0));
  Grid g = make_grid(6.0, 512);
  for (int i = 0; i < g.n; ++i)
    CHECK(v.value(g.x[i]) == doctest::Approx(v.value(-g.x[i])).epsilon(1e-14));

  // curvature at the wells by finite differences
  double h = 1e-4;
  double v2 = (v.value(1.0 + h) - 2.0 * v.value(1.0) + v.value(1.0 - h)) / (h * h);
  CHECK(v2 == doctest::Approx(8.0).epsilon(1e-5));

  PotentialSpec w = make_double_well(2.0, 0.5);
  CHECK(w.wells[0] == doctest::Approx(-2.0));
  CHECK(w.wells[1] == doctest::Approx(2.0));
  CHECK(w.value(2.0) == doctest::Approx(1.0));

  CHECK_THROWS_AS(make_double_well(-1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_double_well(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("n-well family matches the double well geometry at n = 2") {
  PotentialSpec nw = make_n_well(2, 2.0);
  PotentialSpec dw = make_double_well(1.0, 1.0);
  REQUIRE(nw.well_count() == 2);
  CHECK(nw.wells[0] == doctest::Approx(dw.wells[0]));
  CHECK(nw.wells[1] == doctest::Approx(dw.wells[1]));
  double h = 1e-4;
  auto curv = [&](const PotentialSpec& s, double x) {
    return (s.value(x + h) - 2.0 * s.value(x) + s.value(x - h)) / (h * h);
  };
  CHECK(curv(nw, 1.0) == doctest::Approx(curv(dw, 1.0)).epsilon(1e-4));
}

TEST_CASE("n-well minima all at depth one") {
  PotentialSpec v = make_n_well(3, 2.0);
  REQUIRE(v.well_count() == 3);
  for (double xj : v.wells) CHECK(v.value(xj) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(make_n_well(1, 2.0), std::invalid_argument);
}

TEST_CASE("hypothesis validation passes for the built-in families") {
  Grid g = make_grid(6.0, 2048);
  CHECK(validate_hypothesis1(make_double_well(1.0, 1.0), g).pass);
  CHECK(validate_hypothesis1(make_n_well(3, 2.0), make_grid(8.0, 2048)).pass);
  CHECK(validate_hypothesis1(make_n_well(4, 1.5), make_grid(8.0, 2048)).pass);
}

TEST_CASE("validation rejects a single declared well") {
  std::vector<double> xs, vs;
  for (int i = 0; i <= 256; ++i) {
    double x = -6.0 + 12.0 * i / 256.0;
    xs.push_back(x);
    vs.push_back(1.0 + x * x);
  }
  PotentialSpec v = make_tabulated(xs, vs, {0.0});
  CHECK_THROWS_AS(validate_hypothesis1(v, make_grid(6.0, 512)), std::invalid_argument);
}

TEST_CASE("validation flags a perturbed well depth") {
  std::vector<double> xs, vs;
  PotentialSpec dw = make_double_well(1.0, 1.0);
  for (int i = 0; i <= 2048; ++i) {
    double x = -6.0 + 12.0 * i / 2048.0;
    xs.push_back(x);
    // lift the right well by 0.01
    double lift = 0.01 * std::exp(-8.0 * (x - 1.0) * (x - 1.0));
    vs.push_back(dw.value(x) + lift);
  }
  PotentialSpec bad = make_tabulated(xs, vs, {-1.0, 1.0});
  ValidationReport rep = validate_hypothesis1(bad, make_grid(6.0, 1024), 1e-4);
  CHECK_FALSE(rep.pass);
  bool depth_clause = false;
  for (const auto& c : rep.clauses)
    if (c.clause == "i.well_depth" && !c.pass && c.worst_x > 0.0) depth_clause = true;
  CHECK(depth_clause);
}

TEST_CASE("barrier integral closed forms") {
  CHECK(agmon_distance(make_double_well(1.0, 1.0), 1) == doctest::Approx(4.0 / 3.0).epsilon(1e-8));
  double a = 1.3, b = 0.7;
  CHECK(agmon_distance(make_double_well(a, b), 1) ==
        doctest::Approx(4.0 / 3.0 * std::sqrt(b) * a * a * a).epsilon(1e-8));
  CHECK_THROWS_AS(agmon_distance(make_double_well(1.0, 1.0), 2), std::invalid_argument);

  // lattice family: every gap carries the same sine barrier
  PotentialSpec nw = make_n_well(4, 1.5);
  double d = 1.5, height = std::pow(d, 4) / (M_PI * M_PI);
  double expected = std::sqrt(height) * 2.0 * d / M_PI;
  for (int j = 1; j <= 3; ++j)
    CHECK(agmon_distance(nw, j) == doctest::Approx(expected).epsilon(1e-7));
  CHECK(gamma_effective(nw) == doctest::Approx(0.9 * expected).epsilon(1e-7));
}

TEST_CASE("flat stretch has zero barrier integral") {
  std::vector<double> xs, vs;
  for (int i = 0; i <= 64; ++i) {
    xs.push_back(-2.0 + 4.0 * i / 64.0);
    vs.push_back(1.0);
  }
  PotentialSpec flat = make_tabulated(xs, vs, {-1.0, 1.0});
  CHECK(agmon_distance(flat, 1) == doctest::Approx(0.0));
}

TEST_CASE("adaptive quadrature meets its tolerance") {
  double val = integrate_adaptive([](double x) { return std::exp(-x * x); }, -8.0, 8.0, 1e-12);
  CHECK(val == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-10));
}

TEST_CASE("modified potential realizes the two-branch definition") {
  PotentialSpec dw = make_double_well(1.0, 1.0);
  Grid g = make_grid(6.0, 1024);
  CHECK(default_threshold(dw) == doctest::Approx(1.5));

  std::vector<double> v2 = modified_potential(dw, 2, 1.5, g);
  for (int i = 0; i < g.n; ++i) {
    double x = g.x[i];
    double v = dw.value(x);
    CHECK(v2[i] >= std::min(v, 1.5) - 1e-14);
    if (x < -0.2 && v < 1.5) CHECK(v2[i] == doctest::Approx(1.5));  // left component flooded
    if (std::abs(x - 1.0) < 0.3) CHECK(v2[i] == doctest::Approx(v));  // own well untouched
  }
  CHECK_THROWS_AS(modified_potential(dw, 2, 2.0, g), std::runtime_error);   // merged components
  CHECK_THROWS_AS(modified_potential(dw, 1, 0.9, g), std::invalid_argument);
  CHECK_THROWS_AS(modified_potential(dw, 3, 1.5, g), std::invalid_argument);
}

TEST_CASE("potential JSON round trip") {
  PotentialSpec v = make_n_well(3, 1.8);
  PotentialSpec w = potential_from_json(potential_to_json(v));
  CHECK(w.well_count() == 3);
  for (double x : {-2.0, -0.3, 0.9, 2.7}) CHECK(w.value(x) == doctest::Approx(v.value(x)));
}
