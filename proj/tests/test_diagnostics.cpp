#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gpelab/diagnostics.hpp"
#include "gpelab/experiment.hpp"

using namespace gpelab;

TEST_CASE("power-law fits recover exact exponents") {
  std::vector<double> x = {1.0, 2.0, 4.0, 8.0}, y;
  for (double v : x) y.push_back(7.0 * std::pow(v, -1.5));
  FitResult fit = fit_loglog(x, y);
  CHECK(fit.slope == doctest::Approx(-1.5).epsilon(1e-12));
  CHECK(std::exp(fit.intercept) == doctest::Approx(7.0).epsilon(1e-12));
  CHECK(fit.residual < 1e-12);

  std::vector<double> ye;
  for (double v : x) ye.push_back(3.0 * std::exp(-0.8 * v));
  FitResult sfit = fit_semilog(x, ye);
  CHECK(sfit.slope == doctest::Approx(-0.8).epsilon(1e-12));

  CHECK_THROWS_AS(fit_loglog({1.0, 2.0}, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(fit_loglog({1.0, 2.0, 3.0}, {1.0, -2.0, 3.0}), std::invalid_argument);
}

TEST_CASE("beating detector on synthetic series") {
  std::vector<double> t, x, flat;
  double period = 3.7;
  for (int i = 0; i <= 3000; ++i) {
    t.push_back(0.01 * i);
    x.push_back(0.8 * std::cos(2.0 * M_PI * t.back() / period));
    flat.push_back(1e-9);
  }
  BeatingReport rep = beating_detector(t, x, period);
  CHECK(rep.conclusive);
  CHECK(rep.is_beating);
  CHECK(rep.period == doctest::Approx(period).epsilon(0.02));
  CHECK(rep.amplitude == doctest::Approx(0.8).epsilon(1e-3));

  BeatingReport still = beating_detector(t, flat, period);
  CHECK(still.conclusive);
  CHECK_FALSE(still.is_beating);

  std::vector<double> t2(t.begin(), t.begin() + 300), x2(x.begin(), x.begin() + 300);
  BeatingReport shortrep = beating_detector(t2, x2, period);
  CHECK_FALSE(shortrep.conclusive);
}

namespace {

struct ComparePack {
  Workspace ws;
  DnlsModel model;
  GpeTrajectory gpe;
  DnlsTrajectory red;
  double eps;
  ExperimentConfig cfg;
};

ComparePack run_linear_compare(bool mirror) {
  ExperimentConfig c;
  c.potential = make_double_well(1.0, 1.0);
  c.hbar = 0.25;
  c.points = 1024;
  c.sigma = 2;
  c.discretization = "fourier";
  ComparePack p{make_workspace(c, 32), {}, {}, {}, 0.0, c};
  p.eps = 0.0;
  p.model = extract_coefficients(p.ws.spectral, p.ws.basis, 0.0, 2);

  GpeRunConfig cfg;
  cfg.hbar = c.hbar;
  cfg.eps = 0.0;
  cfg.sigma = 2;
  cfg.dt = p.ws.beat_period / 1000.0;
  cfg.t_end = p.ws.beat_period;
  cfg.modes = 32;
  cfg.record_stride = 4;
  double r = 1.0 / std::sqrt(2.0);
  double sgn = mirror ? -1.0 : 1.0;
  WaveField psi0 =
      field_from_eigenmodes(p.ws.spectral, {cplx(r, 0.0), cplx(sgn * r, 0.0)});
  p.gpe = gpe_integrate(p.ws.spectral, p.ws.basis, cfg, psi0);

  DnlsState red0 = p.gpe.obs.front().well_amplitudes;
  double tau_end = p.model.omega * cfg.t_end / c.hbar;
  p.red = dnls_integrate(p.model, red0, tau_end, p.model.omega * cfg.dt / c.hbar, 1);
  return p;
}

}  // namespace

TEST_CASE("linear comparison reduces to the two-level system") {
  ComparePack p = run_linear_compare(false);
  ComparisonReport rep = compare_gpe_dnls(p.gpe, p.red, p.ws.basis, p.model, 0.25);
  // residual only from the span mismatch of the orthonormalized well frame
  CHECK(rep.sup_discrepancy < 5e-3);

  // relabeling the wells through mirrored initial data gives the same picture
  ComparePack q = run_linear_compare(true);
  ComparisonReport rep2 = compare_gpe_dnls(q.gpe, q.red, q.ws.basis, q.model, 0.25);
  CHECK(rep2.sup_discrepancy == doctest::Approx(rep.sup_discrepancy).epsilon(1e-6));
}

TEST_CASE("drift report on a linear run shows only leakage") {
  ComparePack p = run_linear_compare(false);
  DriftReport rep = drift_report(p.gpe, p.model, 0.25, 0.0, 2);
  CHECK(rep.invariant_drift < 1e-6);
  CHECK(rep.k0_drift < 1e-4);
  CHECK(rep.mu == doctest::Approx(p.model.omega));
  CHECK(rep.time_budget > 0.0);
  CHECK(rep.window_fraction > 0.0);
}

TEST_CASE("manifold distance pins") {
  ExperimentConfig c;
  c.potential = make_double_well(1.0, 1.0);
  c.hbar = 0.2;
  c.points = 1024;
  c.discretization = "fourier";
  Workspace ws = make_workspace(c, 16);

  NormalFormOptions opt;
  opt.modes = 8;
  NormalFormResult ident = normal_form(ws.spectral, 2, 0.0, 2, opt);

  double r = 1.0 / std::sqrt(2.0);
  WaveField inblock = field_from_eigenmodes(ws.spectral, {cplx(r, 0.0), cplx(r, 0.0)});
  ManifoldDistance d = manifold_distance(inblock, ws.spectral, 2, 1, &ident);
  CHECK(d.picnorm < 1e-9);
  REQUIRE(d.d_manifold.has_value());
  CHECK(*d.d_manifold < 1e-7);

  // a pure high mode sits at exactly its graph-norm distance
  WaveField phi3 = field_from_eigenmodes(ws.spectral, {cplx(0, 0), cplx(0, 0), cplx(1, 0)});
  ManifoldDistance d3 = manifold_distance(phi3, ws.spectral, 2, 1);
  CHECK(d3.picnorm == doctest::Approx(std::sqrt(ws.spectral.eigenvalues[2])).epsilon(1e-9));
}
