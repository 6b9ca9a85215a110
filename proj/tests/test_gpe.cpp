#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gpelab/diagnostics.hpp"
#include "gpelab/experiment.hpp"
#include "gpelab/gpe.hpp"

using namespace gpelab;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.potential = make_double_well(1.0, 1.0);
  c.hbar = 0.25;
  c.points = 1024;
  c.sigma = 2;
  c.discretization = "fourier";
  return c;
}

const Workspace& ws() {
  static Workspace w = make_workspace(small_config(), 32);
  return w;
}

}  // namespace

TEST_CASE("eigenstate initial data stays put under the linear flow") {
  GpeRunConfig cfg;
  cfg.hbar = 0.25;
  cfg.eps = 0.0;
  cfg.dt = ws().beat_period / 500.0;
  cfg.t_end = ws().beat_period / 10.0;
  cfg.modes = 32;
  cfg.record_stride = 25;
  WaveField psi0 = field_from_eigenmodes(ws().spectral, {cplx(1.0, 0.0)});
  GpeTrajectory traj = gpe_integrate(ws().spectral, ws().basis, cfg, psi0);
  WaveField ref = psi0;
  for (const auto& o : traj.obs) {
    CHECK(std::abs(o.mass - 1.0) <= 1e-10);
    CHECK(std::abs(o.energy - traj.obs.front().energy) <= 1e-10);
  }
  // overlap with the eigenstate has unit magnitude at the endpoint
  cfg.field_stride = 1 << 30;
  traj = gpe_integrate(ws().spectral, ws().basis, cfg, psi0);
  REQUIRE_FALSE(traj.snapshots.empty());
  cplx ov = inner(ws().grid, ref.values, traj.snapshots.back().values);
  CHECK(std::abs(ov) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("even parity gives a vanishing position expectation") {
  WaveField psi0 = field_from_eigenmodes(ws().spectral, {cplx(1.0, 0.0)});
  GpeObservables o = observables(ws().spectral, ws().basis, psi0, 1, 0.0, 2);
  CHECK(std::abs(o.x_mean) < 1e-12);
}

TEST_CASE("population bookkeeping closes in the orthonormal frame") {
  double r = 1.0 / std::sqrt(2.0);
  WaveField psi = field_from_eigenmodes(ws().spectral, {cplx(r, 0.1), cplx(r, -0.1)});
  normalize_l2(psi.grid, psi.values);
  GpeObservables o = observables(ws().spectral, ws().basis, psi, 1, 0.0, 2);
  std::vector<cplx> residual = psi.values;
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < psi.grid.n; ++i)
      residual[i] -= o.well_amplitudes[j] * ws().basis.phi_orth[j][i];
  double perp = l2_norm(psi.grid, residual);
  CHECK(o.populations[0] + o.populations[1] + perp * perp ==
        doctest::Approx(o.mass).epsilon(1e-10));
}

TEST_CASE("the flow is Gauge equivariant") {
  GpeRunConfig cfg;
  cfg.hbar = 0.25;
  cfg.eps = 2e-3;
  cfg.sigma = 2;
  cfg.dt = ws().beat_period / 500.0;
  cfg.t_end = ws().beat_period / 20.0;
  cfg.modes = 32;
  cfg.record_stride = 1 << 30;
  cfg.field_stride = 1 << 30;
  double r = 1.0 / std::sqrt(2.0);
  WaveField psi0 = field_from_eigenmodes(ws().spectral, {cplx(r, 0.0), cplx(r, 0.0)});
  GpeTrajectory a = gpe_integrate(ws().spectral, ws().basis, cfg, psi0);

  cplx phase = std::polar(1.0, 0.7);
  WaveField rot = psi0;
  for (auto& v : rot.values) v *= phase;
  GpeTrajectory b = gpe_integrate(ws().spectral, ws().basis, cfg, rot);
  REQUIRE_FALSE(a.snapshots.empty());
  for (int i = 0; i < psi0.grid.n; ++i)
    CHECK(std::abs(b.snapshots.back().values[i] - phase * a.snapshots.back().values[i]) < 1e-9);
}

TEST_CASE("the two propagation methods agree on a short window") {
  GpeRunConfig cfg;
  cfg.hbar = 0.25;
  cfg.eps = 2e-3;
  cfg.sigma = 2;
  cfg.dt = ws().beat_period / 32000.0;
  cfg.t_end = ws().beat_period / 40.0;
  cfg.modes = 32;
  cfg.record_stride = 1 << 30;
  cfg.field_stride = 1 << 30;
  double r = 1.0 / std::sqrt(2.0);
  WaveField psi0 = field_from_eigenmodes(ws().spectral, {cplx(r, 0.0), cplx(r, 0.0)});
  GpeTrajectory a = gpe_integrate(ws().spectral, ws().basis, cfg, psi0);
  cfg.method = GpeRunConfig::Method::FourierSplit;
  cfg.record_subspace_norms = false;
  GpeTrajectory b = gpe_integrate(ws().spectral, ws().basis, cfg, psi0);
  double dev = 0.0;
  for (int i = 0; i < psi0.grid.n; ++i)
    dev = std::max(dev, std::abs(a.snapshots.back().values[i] - b.snapshots.back().values[i]));
  CHECK(dev < 2e-5);
  for (const auto& o : b.obs) CHECK(std::abs(o.mass - 1.0) <= 1e-10);
}

TEST_CASE("endpoint error of the splitting is second order") {
  GpeRunConfig cfg;
  cfg.hbar = 0.25;
  cfg.eps = 4e-3;
  cfg.sigma = 2;
  cfg.t_end = ws().beat_period / 16.0;
  cfg.modes = 32;
  cfg.method = GpeRunConfig::Method::FourierSplit;
  cfg.record_subspace_norms = false;
  cfg.record_stride = 1 << 30;
  cfg.field_stride = 1 << 30;
  double r = 1.0 / std::sqrt(2.0);
  WaveField psi0 = field_from_eigenmodes(ws().spectral, {cplx(r, 0.0), cplx(r, 0.0)});

  auto endpoint = [&](double div) {
    GpeRunConfig c2 = cfg;
    c2.dt = ws().beat_period / div;
    return gpe_integrate(ws().spectral, ws().basis, c2, psi0).snapshots.back();
  };
  WaveField ref = endpoint(131072.0);
  std::vector<double> dts, errs;
  for (double div : {8192.0, 16384.0, 32768.0}) {
    WaveField e = endpoint(div);
    double d = 0.0;
    for (int i = 0; i < psi0.grid.n; ++i) d += std::norm(e.values[i] - ref.values[i]);
    dts.push_back(ws().beat_period / div);
    errs.push_back(std::sqrt(d * psi0.grid.h));
  }
  FitResult fit = fit_loglog(dts, errs);
  CHECK(fit.slope == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("initial data validation") {
  GpeRunConfig cfg;
  cfg.hbar = 0.25;
  cfg.dt = 0.1;
  cfg.t_end = 1.0;
  cfg.modes = 32;
  WaveField junk = make_field(ws().grid);
  junk.values[10] = 3.0;  // not normalized
  CHECK_THROWS_AS(gpe_integrate(ws().spectral, ws().basis, cfg, junk), std::invalid_argument);

  WaveField spike = make_field(ws().grid);
  spike.values[ws().grid.n / 2] = 1.0 / std::sqrt(ws().grid.h);  // unresolved
  CHECK_THROWS_AS(gpe_integrate(ws().spectral, ws().basis, cfg, spike), std::invalid_argument);
}

TEST_CASE("validity parameter bookkeeping") {
  GpeRunConfig cfg;
  cfg.hbar = 0.2;
  cfg.eps = 1e-3;
  cfg.sigma = 2;
  CHECK(gpe_mu(cfg, 5e-3) == doctest::Approx(5e-3 + 1e-3 / 0.04));
}
