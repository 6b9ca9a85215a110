#include "gpelab/gpe.hpp"

#include <algorithm>
#include <cmath>

#include "gpelab/fft.hpp"

namespace gpelab {

namespace {

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

// exact flow of the pointwise part: psi *= exp(-i theta(x) dt / hbar)
void phase_step(std::vector<cplx>& psi, const std::vector<double>& theta, double dt_over_hbar) {
  for (size_t i = 0; i < psi.size(); ++i) {
    psi[i] *= std::polar(1.0, -theta[i] * dt_over_hbar);
  }
}

}  // namespace

double gpe_mu(const GpeRunConfig& cfg, double omega) {
  return omega + std::abs(cfg.eps) / std::pow(cfg.hbar, cfg.sigma);
}

GpeObservables observables(const SpectralData& spectral, const WellBasis& basis,
                           const WaveField& psi, int s, double eps, int sigma, double t,
                           bool subspace_norms) {
  const Grid& g = psi.grid;
  GpeObservables o;
  o.t = t;
  double mass = 0.0, xm = 0.0, nl = 0.0;
  for (int i = 0; i < g.n; ++i) {
    double d = std::norm(psi.values[i]);
    mass += d;
    xm += g.x[i] * d;
    nl += ipow(d, sigma + 1);
  }
  o.mass = mass * g.h;
  o.x_mean = xm * g.h;

  std::vector<cplx> hpsi;
  apply_h0(g, spectral.v_samples, spectral.hbar, spectral.method, psi.values, hpsi);
  double e0 = 0.0;
  for (int i = 0; i < g.n; ++i) e0 += (std::conj(psi.values[i]) * hpsi[i]).real();
  o.energy = e0 * g.h + eps / (sigma + 1) * nl * g.h;

  const int n = basis.wells();
  o.populations.resize(n);
  o.well_amplitudes.resize(n);
  for (int j = 0; j < n; ++j) {
    cplx a = inner(g, basis.phi_orth[j], psi.values);
    o.well_amplitudes[j] = a;
    o.populations[j] = std::norm(a);
  }

  if (subspace_norms) {
    ModeProjection proj = project(spectral, n, psi);
    o.picnorm = xs_norm(spectral, proj.outside, s, 0.1);
    o.xs_full = xs_norm(spectral, psi, s, 1e-4);
  }
  return o;
}

GpeTrajectory gpe_integrate(const SpectralData& spectral, const WellBasis& basis,
                            const GpeRunConfig& cfg, const WaveField& psi0) {
  const Grid& g = spectral.grid;
  if (!same_grid(g, psi0.grid)) throw std::invalid_argument("gpe_integrate: grid mismatch");
  if (cfg.dt <= 0.0) throw std::invalid_argument("gpe_integrate: dt must be positive");
  if (std::abs(l2_norm(g, psi0.values) - 1.0) > 1e-8)
    throw std::invalid_argument("gpe_integrate: initial state must be L2-normalized");
  if (cfg.hbar != spectral.hbar)
    throw std::invalid_argument("gpe_integrate: config and spectral hbar disagree");

  const int modes = std::min(cfg.modes, spectral.count());
  if (cfg.method == GpeRunConfig::Method::EigenBasis && modes < 1)
    throw std::invalid_argument("gpe_integrate: no eigenmodes available");

  std::vector<cplx> psi = psi0.values;

  // resolve the initial state when propagating in the eigenbasis
  if (cfg.method == GpeRunConfig::Method::EigenBasis) {
    std::vector<cplx> tail = psi;
    for (int k = 0; k < modes; ++k) {
      cplx z = inner(g, spectral.eigenvectors[k], psi);
      for (int i = 0; i < g.n; ++i) tail[i] -= z * spectral.eigenvectors[k][i];
    }
    double leak = 0.0;
    for (const auto& v : tail) leak += std::norm(v);
    if (std::sqrt(leak * g.h) > 1e-8)
      throw std::invalid_argument(
          "gpe_integrate: initial state not resolved by the eigenbasis truncation");
  }

  const long steps = std::lround(std::ceil(cfg.t_end / cfg.dt - 1e-12));
  const double half_dt = 0.5 * cfg.dt;

  Fft fft(g.n);
  std::vector<double> theta(g.n);
  std::vector<cplx> buf(g.n), tail(g.n);
  std::vector<cplx> zeta(modes);
  std::vector<double> kin_phase;  // kinetic multiplier phases for the Fourier step
  if (cfg.method == GpeRunConfig::Method::FourierSplit) {
    kin_phase.resize(g.n);
    for (int j = 0; j < g.n; ++j) {
      double k = fft_wavenumber(j, g.n, g.half_width);
      kin_phase[j] = cfg.hbar * k * k * cfg.dt;  // hbar^2 k^2 dt / hbar
    }
  }

  auto nonlinear_half = [&]() {
    if (cfg.eps == 0.0) return;
    for (int i = 0; i < g.n; ++i) theta[i] = cfg.eps * ipow(std::norm(psi[i]), cfg.sigma);
    phase_step(psi, theta, half_dt / cfg.hbar);
  };

  double dropped_mass = 0.0;  // cumulative squared norm projected away
  auto linear_full = [&]() {
    if (cfg.method == GpeRunConfig::Method::EigenBasis) {
      tail = psi;
      for (int k = 0; k < modes; ++k) {
        zeta[k] = inner(g, spectral.eigenvectors[k], psi);
        for (int i = 0; i < g.n; ++i) tail[i] -= zeta[k] * spectral.eigenvectors[k][i];
      }
      double leak = 0.0;
      for (const auto& v : tail) leak += std::norm(v);
      leak *= g.h;
      dropped_mass += leak;
      if (std::sqrt(leak) > cfg.tail_tol || dropped_mass > 5e-11)
        throw std::runtime_error(
            "gpe_integrate: energy leaking past the eigenbasis truncation (step leak " +
            std::to_string(std::sqrt(leak)) + ", cumulative mass " +
            std::to_string(dropped_mass) + "); increase the mode count");
      for (int k = 0; k < modes; ++k)
        zeta[k] *= std::polar(1.0, -spectral.eigenvalues[k] * cfg.dt / cfg.hbar);
      for (int i = 0; i < g.n; ++i) {
        cplx acc(0.0, 0.0);  // Galerkin step: the unresolved remainder is projected away
        for (int k = 0; k < modes; ++k) acc += zeta[k] * spectral.eigenvectors[k][i];
        psi[i] = acc;
      }
    } else {
      // kinetic step: V joins the pointwise phase in this method
      fft.forward(psi.data());
      for (int j = 0; j < g.n; ++j) psi[j] *= std::polar(1.0, -kin_phase[j]);
      fft.backward(psi.data());
    }
  };

  auto pointwise_half_fourier = [&]() {
    for (int i = 0; i < g.n; ++i)
      theta[i] = spectral.v_samples[i] + cfg.eps * ipow(std::norm(psi[i]), cfg.sigma);
    phase_step(psi, theta, half_dt / cfg.hbar);
  };

  GpeTrajectory traj;
  WaveField cur;
  cur.grid = g;
  auto record = [&](long step) {
    cur.values = psi;
    traj.obs.push_back(observables(spectral, basis, cur, cfg.s, cfg.eps, cfg.sigma,
                                   step * cfg.dt, cfg.record_subspace_norms));
    if (cfg.field_stride > 0 && (step % cfg.field_stride == 0 || step == steps)) {
      traj.snapshot_t.push_back(step * cfg.dt);
      traj.snapshots.push_back(cur);
    }
  };
  record(0);

  for (long s = 1; s <= steps; ++s) {
    if (cfg.method == GpeRunConfig::Method::EigenBasis) {
      nonlinear_half();
      linear_full();
      nonlinear_half();
    } else {
      pointwise_half_fourier();
      linear_full();
      pointwise_half_fourier();
    }
    if (s % cfg.record_stride == 0 || s == steps) record(s);
  }
  return traj;
}

WaveField field_from_eigenmodes(const SpectralData& spectral, const std::vector<cplx>& coeffs) {
  if (static_cast<int>(coeffs.size()) > spectral.count())
    throw std::invalid_argument("field_from_eigenmodes: more coefficients than modes");
  WaveField f = make_field(spectral.grid);
  for (size_t k = 0; k < coeffs.size(); ++k)
    for (int i = 0; i < spectral.grid.n; ++i)
      f.values[i] += coeffs[k] * spectral.eigenvectors[k][i];
  return f;
}

WaveField field_from_well(const WellBasis& basis, int well) {
  if (well < 1 || well > basis.wells())
    throw std::invalid_argument("field_from_well: well index out of range");
  WaveField f = make_field(basis.grid);
  for (int i = 0; i < basis.grid.n; ++i) f.values[i] = basis.phi_orth[well - 1][i];
  normalize_l2(f.grid, f.values);
  return f;
}

}  // namespace gpelab
