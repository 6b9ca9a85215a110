#include "gpelab/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace gpelab {

namespace {

// linear interpolation of a sampled reduced trajectory at tau
DnlsState interp_state(const DnlsTrajectory& traj, double tau) {
  const auto& ts = traj.tau;
  if (tau <= ts.front()) return traj.states.front();
  if (tau >= ts.back()) return traj.states.back();
  auto it = std::upper_bound(ts.begin(), ts.end(), tau);
  size_t hi = it - ts.begin();
  size_t lo = hi - 1;
  double w = (tau - ts[lo]) / (ts[hi] - ts[lo]);
  DnlsState out(traj.states[lo].size());
  for (size_t j = 0; j < out.size(); ++j)
    out[j] = (1.0 - w) * traj.states[lo][j] + w * traj.states[hi][j];
  return out;
}

}  // namespace

ComparisonReport compare_gpe_dnls(const GpeTrajectory& gpe, const DnlsTrajectory& dnls,
                                  const WellBasis& basis, const DnlsModel& model, double hbar) {
  if (gpe.obs.empty() || dnls.states.empty())
    throw std::invalid_argument("compare_gpe_dnls: empty trajectory");
  const int n = basis.wells();
  if (model.n != n) throw std::invalid_argument("compare_gpe_dnls: well count mismatch");

  ComparisonReport rep;
  rep.hbar = hbar;
  rep.omega = model.omega;
  rep.Omega = model.Omega;

  double tau_max = dnls.tau.back();
  double acc_sq = 0.0;
  int used = 0;
  for (const auto& o : gpe.obs) {
    double tau = model.omega * o.t / hbar;
    if (tau > tau_max * (1.0 + 1e-9))
      throw std::invalid_argument("compare_gpe_dnls: reduced run does not cover the window");
    DnlsState red = interp_state(dnls, tau);
    rep.t.push_back(o.t);
    std::vector<double> gp(n), rp(n);
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
      gp[j] = o.populations[j];
      rp[j] = std::norm(red[j]);
      worst = std::max(worst, std::abs(gp[j] - rp[j]));
    }
    rep.field_populations.push_back(std::move(gp));
    rep.reduced_populations.push_back(std::move(rp));
    rep.sup_discrepancy = std::max(rep.sup_discrepancy, worst);
    acc_sq += worst * worst;
    ++used;
  }
  rep.l2_discrepancy = std::sqrt(acc_sq / std::max(1, used));
  return rep;
}

DriftReport drift_report(const GpeTrajectory& gpe, const DnlsModel& model, double hbar,
                         double eps, int sigma, double mu_star) {
  if (gpe.obs.empty()) throw std::invalid_argument("drift_report: empty trajectory");
  DriftReport rep;
  rep.mu = model.omega + std::abs(eps) / std::pow(hbar, sigma);
  rep.mu_scaled = rep.mu / std::pow(hbar, 1.5);

  DnlsState amp0 = gpe.obs.front().well_amplitudes;
  double i0 = dnls_invariant(amp0);
  double k00 = k0_energy(model, amp0);
  for (const auto& o : gpe.obs) {
    rep.invariant_drift =
        std::max(rep.invariant_drift, std::abs(dnls_invariant(o.well_amplitudes) - i0));
    rep.k0_drift = std::max(rep.k0_drift, std::abs(k0_energy(model, o.well_amplitudes) - k00));
  }
  rep.window = gpe.obs.back().t - gpe.obs.front().t;
  rep.fitted_c_invariant = rep.invariant_drift / std::max(rep.mu_scaled, 1e-300);
  rep.fitted_c_k0 = rep.k0_drift / std::max(rep.mu_scaled, 1e-300);

  double d0 = gpe.obs.front().picnorm;
  double floor = std::exp(-0.5 * mu_star * std::pow(hbar, 1.5) / std::max(rep.mu, 1e-300));
  double delta = std::max(d0, floor);
  double c_fit = std::max({rep.fitted_c_invariant, rep.fitted_c_k0, 1e-12});
  rep.time_budget = 1.0 / (c_fit * hbar * rep.mu * delta);
  rep.window_fraction = rep.window / rep.time_budget;
  return rep;
}

namespace {

// Nelder-Mead over 2n real coordinates, adequate for the small block sizes
double nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                   std::vector<double>& x, double step, int max_iter, bool* converged) {
  const size_t d = x.size();
  std::vector<std::vector<double>> simplex(d + 1, x);
  std::vector<double> val(d + 1);
  for (size_t i = 1; i <= d; ++i) simplex[i][i - 1] += step;
  for (size_t i = 0; i <= d; ++i) val[i] = f(simplex[i]);
  *converged = false;

  for (int it = 0; it < max_iter; ++it) {
    std::vector<size_t> idx(d + 1);
    for (size_t i = 0; i <= d; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return val[a] < val[b]; });
    if (std::abs(val[idx[d]] - val[idx[0]]) < 1e-14 * (1.0 + std::abs(val[idx[0]]))) {
      *converged = true;
      x = simplex[idx[0]];
      return val[idx[0]];
    }
    std::vector<double> centroid(d, 0.0);
    for (size_t i = 0; i < d; ++i)
      for (size_t q = 0; q < d; ++q) centroid[q] += simplex[idx[i]][q] / d;
    auto blend = [&](double w) {
      std::vector<double> p(d);
      for (size_t q = 0; q < d; ++q)
        p[q] = centroid[q] + w * (centroid[q] - simplex[idx[d]][q]);
      return p;
    };
    auto refl = blend(1.0);
    double fr = f(refl);
    if (fr < val[idx[0]]) {
      auto exp_p = blend(2.0);
      double fe = f(exp_p);
      simplex[idx[d]] = fe < fr ? exp_p : refl;
      val[idx[d]] = std::min(fe, fr);
    } else if (fr < val[idx[d - 1]]) {
      simplex[idx[d]] = refl;
      val[idx[d]] = fr;
    } else {
      auto con = blend(-0.5);
      double fc = f(con);
      if (fc < val[idx[d]]) {
        simplex[idx[d]] = con;
        val[idx[d]] = fc;
      } else {
        for (size_t i = 1; i <= d; ++i) {
          for (size_t q = 0; q < d; ++q)
            simplex[idx[i]][q] = 0.5 * (simplex[idx[i]][q] + simplex[idx[0]][q]);
          val[idx[i]] = f(simplex[idx[i]]);
        }
      }
    }
  }
  size_t best = 0;
  for (size_t i = 1; i <= d; ++i)
    if (val[i] < val[best]) best = i;
  x = simplex[best];
  return val[best];
}

}  // namespace

ManifoldDistance manifold_distance(const WaveField& psi, const SpectralData& spectral, int wells,
                                   int s, const NormalFormResult* transform) {
  ModeProjection proj = project(spectral, wells, psi);
  ManifoldDistance out;
  out.picnorm = xs_norm(spectral, proj.outside, s);
  if (transform == nullptr) return out;

  const int modes = transform->truncation.modes;
  if (spectral.count() < modes)
    throw std::invalid_argument("manifold_distance: transform needs more modes than computed");

  // target coordinates of psi on the truncation
  std::vector<cplx> target(proj.zeta.begin(), proj.zeta.begin() + modes);
  std::vector<double> lam(transform->truncation.lambda);

  auto objective = [&](const std::vector<double>& par) {
    std::vector<cplx> phi(modes, cplx(0.0, 0.0));
    for (int j = 0; j < wells; ++j) phi[j] = cplx(par[2 * j], par[2 * j + 1]);
    std::vector<cplx> mapped = apply_transform(*transform, phi);
    double acc = 0.0;
    for (int m = 0; m < modes; ++m)
      acc += std::pow(lam[m], s) * std::norm(mapped[m] - target[m]);
    return std::sqrt(acc);
  };

  std::vector<double> par(2 * wells);
  for (int j = 0; j < wells; ++j) {
    par[2 * j] = proj.zeta[j].real();
    par[2 * j + 1] = proj.zeta[j].imag();
  }
  bool conv = false;
  double best = nelder_mead(objective, par, 0.05, 400, &conv);
  out.descent_converged = conv;
  if (conv)
    out.d_manifold = best;
  else
    out.d_manifold = std::nullopt;
  return out;
}

BeatingReport beating_detector(const std::vector<double>& t, const std::vector<double>& x,
                               double expected_period, double noise_floor) {
  if (t.size() != x.size() || t.size() < 4)
    throw std::invalid_argument("beating_detector: series too short");
  BeatingReport rep;
  double span = t.back() - t.front();
  if (expected_period > 0.0 && span < 2.0 * expected_period) {
    rep.conclusive = false;  // window shorter than two periods
    return rep;
  }
  rep.conclusive = true;
  for (double v : x) rep.amplitude = std::max(rep.amplitude, std::abs(v));

  std::vector<double> crossings;
  for (size_t i = 1; i < x.size(); ++i) {
    if (x[i - 1] == 0.0) continue;
    if ((x[i - 1] < 0.0) != (x[i] < 0.0)) {
      double w = x[i - 1] / (x[i - 1] - x[i]);
      crossings.push_back(t[i - 1] + w * (t[i] - t[i - 1]));
      ++rep.sign_changes;
    }
  }
  if (crossings.size() >= 2) {
    std::vector<double> gaps;
    for (size_t i = 1; i < crossings.size(); ++i)
      gaps.push_back(crossings[i] - crossings[i - 1]);
    std::sort(gaps.begin(), gaps.end());
    rep.period = 2.0 * gaps[gaps.size() / 2];
  }
  rep.is_beating = rep.sign_changes >= 2 && rep.amplitude > noise_floor;
  return rep;
}

namespace {

FitResult least_squares(const std::vector<double>& u, const std::vector<double>& v) {
  const size_t n = u.size();
  double su = 0.0, sv = 0.0, suu = 0.0, suv = 0.0;
  for (size_t i = 0; i < n; ++i) {
    su += u[i];
    sv += v[i];
    suu += u[i] * u[i];
    suv += u[i] * v[i];
  }
  double det = n * suu - su * su;
  FitResult r;
  r.slope = (n * suv - su * sv) / det;
  r.intercept = (sv - r.slope * su) / n;
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double e = v[i] - (r.slope * u[i] + r.intercept);
    acc += e * e;
  }
  r.residual = std::sqrt(acc / n);
  return r;
}

}  // namespace

FitResult fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3)
    throw std::invalid_argument("fit_loglog: need at least 3 points");
  std::vector<double> u(x.size()), v(y.size());
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0.0 || y[i] <= 0.0)
      throw std::invalid_argument("fit_loglog: data must be positive");
    u[i] = std::log(x[i]);
    v[i] = std::log(y[i]);
  }
  return least_squares(u, v);
}

FitResult fit_semilog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3)
    throw std::invalid_argument("fit_semilog: need at least 3 points");
  std::vector<double> v(y.size());
  for (size_t i = 0; i < y.size(); ++i) {
    if (y[i] <= 0.0) throw std::invalid_argument("fit_semilog: data must be positive");
    v[i] = std::log(y[i]);
  }
  return least_squares(x, v);
}

}  // namespace gpelab
