#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gpelab/diagnostics.hpp"
#include "gpelab/spectral.hpp"

using namespace gpelab;

namespace {

std::vector<double> harmonic_samples(const Grid& g) {
  std::vector<double> v(g.n);
  for (int i = 0; i < g.n; ++i) v[i] = 1.0 + g.x[i] * g.x[i];
  return v;
}

WaveField gaussian_state(const Grid& g, double x0, double w) {
  WaveField f = make_field(g);
  for (int i = 0; i < g.n; ++i) {
    double u = (g.x[i] - x0) / w;
    f.values[i] = std::exp(-0.5 * u * u);
  }
  normalize_l2(g, f.values);
  return f;
}

}  // namespace

TEST_CASE("harmonic spectrum oracle, both discretizations") {
  Grid g = make_grid(8.0, 1024);
  auto v = harmonic_samples(g);
  double hbar = 0.1;
  SpectralData fd = eigensolve_samples(v, g, hbar, 5, Discretization::FiniteDifference);
  SpectralData sp = eigensolve_samples(v, g, hbar, 5, Discretization::Fourier);
  for (int k = 0; k < 5; ++k) {
    double exact = 1.0 + hbar * (2 * k + 1);
    CHECK(std::abs(fd.eigenvalues[k] - exact) / exact < 5e-3);
    CHECK(std::abs(sp.eigenvalues[k] - exact) / exact < 1e-9);
  }
  for (int k = 0; k + 1 < 5; ++k) CHECK(fd.eigenvalues[k] < fd.eigenvalues[k + 1]);
}

TEST_CASE("eigenpairs are orthonormal with small residuals") {
  Grid g = make_grid(8.0, 1024);
  SpectralData sd =
      eigensolve(make_double_well(1.0, 1.0), g, 0.2, 8, Discretization::Fourier);
  for (int i = 0; i < 8; ++i) {
    for (int j = i; j < 8; ++j) {
      double ip = inner(g, sd.eigenvectors[i], sd.eigenvectors[j]);
      CHECK(std::abs(ip - (i == j ? 1.0 : 0.0)) < 1e-10);
    }
    CHECK(sd.residuals[i] < 1e-8);
  }
}

TEST_CASE("double well shows a quasi-degenerate doublet") {
  Grid g = make_grid(8.0, 1024);
  SpectralData sd =
      eigensolve(make_double_well(1.0, 1.0), g, 0.2, 4, Discretization::FiniteDifference);
  double d12 = sd.eigenvalues[1] - sd.eigenvalues[0];
  double d23 = sd.eigenvalues[2] - sd.eigenvalues[1];
  CHECK(d12 < 0.05 * d23);
}

TEST_CASE("eigensolve preconditions") {
  Grid g = make_grid(8.0, 1024);
  PotentialSpec dw = make_double_well(1.0, 1.0);
  CHECK_THROWS_AS(eigensolve(dw, g, 0.2, 300, Discretization::FiniteDifference),
                  std::invalid_argument);  // count > N/4
  CHECK_THROWS_AS(eigensolve(dw, g, -0.1, 4, Discretization::FiniteDifference),
                  std::invalid_argument);
}

TEST_CASE("grid convergence utility settles on the Fourier grid") {
  SpectralData sd = eigensolve_converged(make_double_well(1.0, 1.0), 8.0, 512, 0.2, 4,
                                         Discretization::Fourier, 1e-8, 3);
  CHECK(sd.grid.n >= 1024);
}

TEST_CASE("splitting and mean level") {
  Grid g = make_grid(8.0, 1024);
  auto v = harmonic_samples(g);
  SpectralData sd = eigensolve_samples(v, g, 0.1, 4, Discretization::Fourier);
  SplittingResult one = splitting(sd, 1);
  CHECK(one.omega == doctest::Approx(0.0));
  SplittingResult two = splitting(sd, 2);
  CHECK(two.omega == doctest::Approx(0.1).epsilon(1e-6));  // (lambda2 - lambda1)/2 = hbar
  CHECK(two.Omega == doctest::Approx(0.5 * (sd.eigenvalues[0] + sd.eigenvalues[1])));
  CHECK_THROWS_AS(splitting(sd, 9), std::invalid_argument);
}

TEST_CASE("single-well basis reproduces the symmetric structure") {
  PotentialSpec dw = make_double_well(1.0, 1.0);
  Grid g = make_grid(8.0, 1024);
  double hbar = 0.2;
  WellBasis wb = single_well_basis(dw, g, hbar, default_threshold(dw));
  REQUIRE(wb.wells() == 2);

  // mirror symmetry of the two ground states
  double mirror_dev = 0.0;
  for (int i = 0; i < g.n; ++i)
    mirror_dev = std::max(mirror_dev,
                          std::abs(wb.phi_hat[0][i] - wb.phi_hat[1][g.mirror(i)]));
  CHECK(mirror_dev < 1e-8);

  CHECK(std::abs(wb.lambda_hat[0] - wb.lambda_hat[1]) < 1e-10);

  // c-matrix close to the symmetric/antisymmetric combination
  double r = 1.0 / std::sqrt(2.0);
  CHECK(wb.c[0][0] == doctest::Approx(r).epsilon(2e-2));
  CHECK(wb.c[1][0] == doctest::Approx(r).epsilon(2e-2));
  CHECK(wb.c[0][1] == doctest::Approx(r).epsilon(2e-2));
  CHECK(wb.c[1][1] == doctest::Approx(-r).epsilon(2e-2));

  for (int j = 0; j < 2; ++j) CHECK(wb.eq8_residual[j] < 0.05);

  // orthonormalized frame really is orthonormal
  for (int i = 0; i < 2; ++i)
    for (int j = i; j < 2; ++j)
      CHECK(std::abs(inner(g, wb.phi_orth[i], wb.phi_orth[j]) - (i == j ? 1.0 : 0.0)) < 1e-10);
}

TEST_CASE("overlap decay follows the barrier integral across the sweep") {
  PotentialSpec dw = make_double_well(1.0, 1.0);
  double gamma = agmon_distance(dw, 1);
  std::vector<double> inv_h, overlap, level_match;
  for (double hbar : {0.1, 0.15, 0.2, 0.3}) {
    Grid g = make_grid(8.0, 1024);
    WellBasis wb = single_well_basis(dw, g, hbar, default_threshold(dw));
    SpectralData sd = eigensolve(dw, g, hbar, 2, Discretization::FiniteDifference);
    inv_h.push_back(1.0 / hbar);
    overlap.push_back(wb.overlap_inf);
    level_match.push_back(std::abs(sd.eigenvalues[0] - wb.lambda_hat[0]));
  }
  FitResult fit = fit_semilog(inv_h, overlap);
  CHECK(std::abs(fit.slope + gamma) / gamma < 0.15);
  // full and single-well levels agree at an exponentially small scale
  FitResult match = fit_semilog(inv_h, level_match);
  CHECK(match.slope < -0.5 * gamma);
}

TEST_CASE("spectral gap below and above the distinguished block") {
  PotentialSpec dw = make_double_well(1.0, 1.0);
  for (double hbar : {0.1, 0.2, 0.4}) {
    SpectralData sd = eigensolve(dw, make_grid(8.0, 1024), hbar, 4,
                                 Discretization::FiniteDifference);
    double gap = sd.eigenvalues[2] - sd.eigenvalues[1];
    CHECK(gap > 0.2 * hbar);  // fitted constant stays of order one
  }
}

TEST_CASE("projection splits states exactly") {
  PotentialSpec dw = make_double_well(1.0, 1.0);
  Grid g = make_grid(8.0, 1024);
  SpectralData sd = eigensolve(dw, g, 0.2, 8, Discretization::FiniteDifference);

  WaveField phi1 = make_field(g);
  for (int i = 0; i < g.n; ++i) phi1.values[i] = sd.eigenvectors[0][i];
  ModeProjection p1 = project(sd, 2, phi1);
  CHECK(l2_norm(g, p1.outside.values) < 1e-12);

  WaveField phi3 = make_field(g);
  for (int i = 0; i < g.n; ++i) phi3.values[i] = sd.eigenvectors[2][i];
  ModeProjection p3 = project(sd, 2, phi3);
  CHECK(l2_norm(g, p3.inside.values) < 1e-12);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  WaveField psi = make_field(g);
  for (int i = 0; i < g.n; ++i)
    psi.values[i] = cplx(uni(rng), uni(rng)) * std::exp(-0.5 * g.x[i] * g.x[i]);
  normalize_l2(g, psi.values);
  ModeProjection pr = project(sd, 2, psi);
  double in2 = l2_norm(g, pr.inside.values), out2 = l2_norm(g, pr.outside.values);
  CHECK(in2 * in2 + out2 * out2 == doctest::Approx(1.0).epsilon(1e-12));
  for (int i = 0; i < g.n; ++i) {
    cplx sum = pr.inside.values[i] + pr.outside.values[i];
    CHECK(std::abs(sum - psi.values[i]) < 1e-14);
  }
  // idempotence
  ModeProjection prr = project(sd, 2, pr.inside);
  for (int i = 0; i < g.n; ++i)
    CHECK(std::abs(prr.inside.values[i] - pr.inside.values[i]) < 1e-13);

  Grid g2 = make_grid(7.0, 512);
  WaveField bad = make_field(g2);
  CHECK_THROWS_AS(project(sd, 2, bad), std::invalid_argument);
}

TEST_CASE("graph norm on eigenmodes and at s = 0") {
  PotentialSpec dw = make_double_well(1.0, 1.0);
  Grid g = make_grid(8.0, 1024);
  SpectralData sd = eigensolve(dw, g, 0.2, 8, Discretization::FiniteDifference);
  WaveField phi2 = make_field(g);
  for (int i = 0; i < g.n; ++i) phi2.values[i] = sd.eigenvectors[1][i];
  for (int s : {0, 1, 2, 3})
    CHECK(xs_norm(sd, phi2, s) ==
          doctest::Approx(std::pow(sd.eigenvalues[1], 0.5 * s)).epsilon(1e-10));

  SpectralData sd96 = eigensolve(dw, g, 0.2, 96, Discretization::FiniteDifference);
  WaveField psi = gaussian_state(g, 0.3, 0.5);
  CHECK(xs_norm(sd96, psi, 0, 1e-6) == doctest::Approx(1.0).epsilon(1e-8));

  // an under-resolved state is refused
  WaveField spiky = make_field(g);
  for (int i = 0; i < g.n; ++i)
    spiky.values[i] = std::cos(40.0 * g.x[i]) * std::exp(-g.x[i] * g.x[i]);
  normalize_l2(g, spiky.values);
  CHECK_THROWS_AS(xs_norm(sd, spiky, 1), std::runtime_error);
}

TEST_CASE("multiplier norm basics") {
  PotentialSpec dw = make_double_well(1.0, 1.0);
  Grid g = make_grid(8.0, 1024);
  WaveField zero = make_field(g);
  CHECK(alt_norm(zero, 2, 0.2, dw) == doctest::Approx(0.0));
  WaveField psi = gaussian_state(g, 0.0, 0.6);
  CHECK(alt_norm(psi, 0, 0.2, dw) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));

  // at s = 1 the graph norm is the form sum, so the two coincide
  SpectralData sd = eigensolve(dw, g, 0.2, 96, Discretization::FiniteDifference);
  CHECK(xs_norm(sd, psi, 1, 1e-6) == doctest::Approx(alt_norm(psi, 1, 0.2, dw)).epsilon(1e-4));
}

TEST_CASE("product inequality constant measured against the Gaussian oracle") {
  // harmonic well: phi = (pi hbar)^(-1/4) exp(-x^2 / 2 hbar); closed-form moments
  double hbar = 0.1;
  Grid g = make_grid(8.0, 1024);
  std::vector<double> xs;
  PotentialSpec harm = make_tabulated(
      [&] {
        std::vector<double> t(g.x.begin(), g.x.end());
        return t;
      }(),
      [&] {
        std::vector<double> t(g.n);
        for (int i = 0; i < g.n; ++i) t[i] = 1.0 + g.x[i] * g.x[i];
        return t;
      }(),
      {0.0, 1e9});  // wells unused by algebra_check

  WaveField phi = make_field(g);
  for (int i = 0; i < g.n; ++i)
    phi.values[i] = std::pow(M_PI * hbar, -0.25) * std::exp(-0.5 * g.x[i] * g.x[i] / hbar);

  AlgebraCheck chk = algebra_check({phi}, 1, hbar, harm);
  REQUIRE(chk.ratios.size() == 1);

  // oracle from Gaussian integrals: with beta = 1/hbar,
  //   |phi|_1^2 = 2 hbar + 1, |phi^2|_1^2 computed from moments of e^(-2 beta x^2)
  auto gauss_alt1 = [&](double beta, double norm2) {
    // f = N e^{-beta x^2}, norm2 = int f^2; the squared multiplier norm at
    // s = 1 from Gaussian moments: <x^2> under f^2 dx is 1/(4 beta)
    double m0 = norm2;
    double m2 = norm2 / (4.0 * beta);
    double kin = hbar * hbar * (4.0 * beta * beta) * m2;  // = hbar^2 beta m0
    double pot = m0 + m2;                                 // V = 1 + x^2
    return kin + pot;
  };
  double beta = 0.5 / hbar;                      // phi ~ e^{-beta x^2}
  double n_phi2 = 1.0;                           // normalized
  double alt_phi = std::sqrt(gauss_alt1(beta, n_phi2));
  double n_sq = std::sqrt(1.0 / (2.0 * M_PI * hbar));  // int phi^4
  double alt_sq = std::sqrt(gauss_alt1(2.0 * beta, n_sq));
  double expected = alt_sq * std::sqrt(hbar) / (alt_phi * alt_phi);
  CHECK(chk.max_ratio == doctest::Approx(expected).epsilon(1e-3));
}

TEST_CASE("product inequality constant is hbar-uniform on ground pairs") {
  PotentialSpec dw = make_double_well(1.0, 1.0);
  std::vector<double> ratios;
  for (double hbar : {0.1, 0.2, 0.4}) {
    Grid g = make_grid(8.0, 1024);
    SpectralData sd = eigensolve(dw, g, hbar, 2, Discretization::FiniteDifference);
    std::vector<WaveField> states;
    for (int k = 0; k < 2; ++k) {
      WaveField f = make_field(g);
      for (int i = 0; i < g.n; ++i) f.values[i] = sd.eigenvectors[k][i];
      states.push_back(std::move(f));
    }
    AlgebraCheck chk = algebra_check(states, 1, hbar, dw);
    ratios.push_back(chk.max_ratio);
  }
  double lo = *std::min_element(ratios.begin(), ratios.end());
  double hi = *std::max_element(ratios.begin(), ratios.end());
  CHECK(hi / lo < 3.0);
}
