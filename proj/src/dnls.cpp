#include "gpelab/dnls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

namespace gpelab {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}
}  // namespace

DnlsModel DnlsModel::normalized(int n, double eta_eom, int sigma) {
  DnlsModel m;
  m.n = n;
  m.sigma = sigma;
  m.omega = 1.0;
  m.Omega = 0.0;
  m.c = 1.0;
  m.eta = eta_eom / (sigma + 1);
  m.eps = m.eta;  // eta = eps c / omega with c = omega = 1
  m.nu.assign(n, 0.0);
  m.delta.assign(n, 0.0);
  m.c_bond.assign(n - 1, 1.0);
  m.lambda.assign(n - 1, 1.0);
  return m;
}

DnlsModel extract_coefficients(const SpectralData& spectral, const WellBasis& basis, double eps,
                               int sigma) {
  if (sigma < 1) throw std::invalid_argument("extract_coefficients: sigma must be positive");
  if (!same_grid(spectral.grid, basis.grid) || spectral.hbar != basis.hbar)
    throw std::invalid_argument("extract_coefficients: basis and spectral data disagree");
  const int n = basis.wells();
  if (spectral.count() < n)
    throw std::invalid_argument("extract_coefficients: need at least n eigenvalues");

  SplittingResult sp = splitting(spectral, n);
  if (std::abs(sp.omega) < 1e-13 * std::max(1.0, std::abs(sp.Omega)))
    throw std::runtime_error(
        "extract_coefficients: level splitting is at the machine-noise floor; use a larger "
        "hbar or a lower barrier");

  DnlsModel m;
  m.n = n;
  m.sigma = sigma;
  m.omega = sp.omega;
  m.Omega = sp.Omega;
  m.eps = eps;

  // Matrix elements are taken in the symmetrically orthonormalized well
  // frame: at finite hbar the raw states carry overlaps whose contribution to
  // the hopping rivals omega itself, while the orthonormal frame reproduces
  // the +-omega structure of the restricted operator.
  const Grid& g = spectral.grid;
  const auto& frame = basis.phi_orth;
  m.nu.resize(n);
  m.delta.resize(n);
  for (int j = 0; j < n; ++j) {
    m.nu[j] = h0_matrix_element(g, spectral.v_samples, spectral.hbar, spectral.method,
                                frame[j], frame[j]) -
              sp.Omega;
    m.delta[j] = m.nu[j] / m.omega;
  }
  m.c_bond.resize(n - 1);
  m.lambda.resize(n - 1);
  for (int j = 0; j + 1 < n; ++j) {
    m.c_bond[j] = h0_matrix_element(g, spectral.v_samples, spectral.hbar, spectral.method,
                                    frame[j + 1], frame[j]);
    m.lambda[j] = m.c_bond[j] / m.omega;
  }
  double acc = 0.0;
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < g.n; ++i) s += ipow(frame[j][i] * frame[j][i], sigma + 1);
    acc += s * g.h;
  }
  m.c = acc / (n * (sigma + 1));
  m.eta = eps * m.c / m.omega;
  return m;
}

double dnls_invariant(const DnlsState& state) {
  double s = 0.0;
  for (const auto& z : state) s += std::norm(z);
  return s;
}

double k0_energy(const DnlsModel& model, const DnlsState& state) {
  const int n = model.n;
  double e = 0.0;
  for (int j = 0; j < n; ++j) {
    double p = std::norm(state[j]);
    e += model.delta[j] * p + model.eta * ipow(p, model.sigma + 1);
  }
  for (int j = 0; j + 1 < n; ++j)
    e += 2.0 * model.lambda[j] * (std::conj(state[j + 1]) * state[j]).real();
  return e;
}

DnlsState dnls_rhs(const DnlsModel& model, const DnlsState& state) {
  const int n = model.n;
  const double g = model.eta_eom();
  DnlsState out(n);
  for (int j = 0; j < n; ++j) {
    cplx acc = model.delta[j] * state[j];
    if (j + 1 < n) acc += model.lambda[j] * state[j + 1];
    if (j > 0) acc += model.lambda[j - 1] * state[j - 1];
    acc += g * ipow(std::norm(state[j]), model.sigma) * state[j];
    out[j] = cplx(0.0, -1.0) * acc;
  }
  return out;
}

namespace {

// One implicit midpoint step; updates psi in place.
void midpoint_step(const DnlsModel& model, DnlsState& psi, double dtau) {
  const int n = model.n;
  DnlsState mid = psi;
  {
    DnlsState f = dnls_rhs(model, psi);
    for (int j = 0; j < n; ++j) mid[j] = psi[j] + 0.5 * dtau * f[j];
  }
  double prev_change = std::numeric_limits<double>::max();
  bool done = false;
  for (int it = 0; it < 50 && !done; ++it) {
    DnlsState f = dnls_rhs(model, mid);
    double change = 0.0;
    for (int j = 0; j < n; ++j) {
      cplx next = psi[j] + 0.5 * dtau * f[j];
      change = std::max(change, std::abs(next - mid[j]));
      mid[j] = next;
    }
    if (change < 1e-14 || change >= prev_change) {
      if (change > 1e-12)
        throw std::runtime_error("dnls_integrate: midpoint iteration did not converge");
      done = true;
    }
    prev_change = change;
  }
  if (!done) throw std::runtime_error("dnls_integrate: midpoint iteration did not converge");
  for (int j = 0; j < n; ++j) psi[j] = 2.0 * mid[j] - psi[j];
}

}  // namespace

DnlsTrajectory dnls_integrate(const DnlsModel& model, const DnlsState& state0, double tau_end,
                              double dtau, int record_stride) {
  if (dtau <= 0.0) throw std::invalid_argument("dnls_integrate: dtau must be positive");
  if (static_cast<int>(state0.size()) != model.n)
    throw std::invalid_argument("dnls_integrate: state size mismatch");
  if (record_stride < 1) record_stride = 1;

  const long steps = std::lround(std::ceil(tau_end / dtau - 1e-12));
  DnlsTrajectory traj;
  DnlsState psi = state0;
  std::vector<double> p0(model.n);
  for (int j = 0; j < model.n; ++j) p0[j] = std::norm(state0[j]);
  const double i0 = dnls_invariant(state0);
  const double k0_init = k0_energy(model, state0);

  auto record = [&](double tau) {
    traj.tau.push_back(tau);
    traj.states.push_back(psi);
    traj.invariant.push_back(dnls_invariant(psi));
    traj.k0.push_back(k0_energy(model, psi));
  };
  record(0.0);

  for (long s = 1; s <= steps; ++s) {
    midpoint_step(model, psi, dtau);
    for (int j = 0; j < model.n; ++j)
      traj.max_action_drift =
          std::max(traj.max_action_drift, std::abs(std::norm(psi[j]) - p0[j]));
    traj.max_invariant_drift =
        std::max(traj.max_invariant_drift, std::abs(dnls_invariant(psi) - i0));
    traj.max_k0_drift = std::max(traj.max_k0_drift, std::abs(k0_energy(model, psi) - k0_init));
    if (s % record_stride == 0 || s == steps) record(s * dtau);
  }
  return traj;
}

DoubleWellAnalysis double_well_analysis(double eta, int sigma) {
  if (sigma != 2)
    throw std::invalid_argument("double_well_analysis: analysis specialized to sigma = 2");
  DoubleWellAnalysis out;
  out.eta = eta;
  out.sigma = sigma;

  // reduced energy on the sphere, normalized frame (unit hopping):
  //   h(p, alpha) = 2 sqrt(p(1-p)) cos(alpha) + eta/(sigma+1) (p^(s+1) + (1-p)^(s+1))
  auto level = [&](double p, double ca) {
    return 2.0 * std::sqrt(p * (1.0 - p)) * ca +
           eta / (sigma + 1) * (ipow(p, sigma + 1) + ipow(1.0 - p, sigma + 1));
  };
  auto dh_dp = [&](double p, double ca) {
    return ca * (1.0 - 2.0 * p) / std::sqrt(p * (1.0 - p)) +
           eta * (ipow(p, sigma) - ipow(1.0 - p, sigma));
  };

  const double lo = 1e-6, hi = 1.0 - 1e-6;
  const int scan = 4000;
  for (double ca : {1.0, -1.0}) {
    double prev_p = lo, prev_g = dh_dp(lo, ca);
    for (int i = 1; i <= scan; ++i) {
      double p = lo + (hi - lo) * i / scan;
      double gv = dh_dp(p, ca);
      if (prev_g == 0.0 || (prev_g < 0.0) != (gv < 0.0)) {
        double a = prev_p, b = p;
        for (int it = 0; it < 80; ++it) {
          double mid = 0.5 * (a + b);
          if ((dh_dp(a, ca) < 0.0) != (dh_dp(mid, ca) < 0.0))
            b = mid;
          else
            a = mid;
        }
        DnlsEquilibrium eq;
        eq.p = 0.5 * (a + b);
        eq.alpha = (ca > 0.0) ? 0.0 : 3.14159265358979323846;
        eq.level = level(eq.p, ca);
        double dp = 1e-5;
        double h_pp = (dh_dp(eq.p + dp, ca) - dh_dp(eq.p - dp, ca)) / (2.0 * dp);
        double h_aa = -2.0 * std::sqrt(eq.p * (1.0 - eq.p)) * ca;
        eq.stable = h_pp * h_aa > 0.0;
        eq.localized = std::abs(eq.p - 0.5) > 1e-4;
        out.equilibria.push_back(eq);
      }
      prev_p = p;
      prev_g = gv;
    }
  }
  for (const auto& eq : out.equilibria) out.bifurcated = out.bifurcated || eq.localized;

  out.homoclinic_level = kNan;
  if (eta > 2.0) out.homoclinic_level = 0.5 * eta - 1.0;
  if (eta < -2.0) out.homoclinic_level = 1.0 - 0.5 * eta;

  out.saddle_level_measured = kNan;
  for (const auto& eq : out.equilibria)
    if (!eq.stable) out.saddle_level_measured = eq.level;
  return out;
}

const char* to_string(TrajectoryClass c) {
  switch (c) {
    case TrajectoryClass::Beating: return "beating";
    case TrajectoryClass::SelfTrapped: return "self-trapped";
    case TrajectoryClass::NearHomoclinic: return "near-homoclinic";
    case TrajectoryClass::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

TrajectoryClass classify_trajectory(const DnlsModel& model, const DnlsState& state0,
                                    double horizon, const ClassifyOptions& opt) {
  if (model.n != 2) throw std::invalid_argument("classify_trajectory: two-site models only");

  const double eta_ax = model.eta_eom();
  if (std::abs(eta_ax) > 2.0) {
    double lvl = eta_ax > 0.0 ? 0.5 * eta_ax - 1.0 : 1.0 - 0.5 * eta_ax;
    if (std::abs(k0_energy(model, state0) - lvl) < opt.homoclinic_tol)
      return TrajectoryClass::NearHomoclinic;
  }

  double hop = 0.0;
  for (double l : model.lambda) hop = std::max(hop, std::abs(l));
  double beat_estimate = hop > 0.0 ? 3.14159265358979323846 / hop : horizon;
  if (horizon < beat_estimate) return TrajectoryClass::Inconclusive;

  DnlsTrajectory traj = dnls_integrate(model, state0, horizon, opt.dtau, 8);
  double p_start = std::norm(state0[0]);
  double pmin = 1.0, pmax = 0.0;
  int crossings = 0;
  double prev = p_start - opt.beat_level;
  for (const auto& st : traj.states) {
    double p = std::norm(st[0]);
    pmin = std::min(pmin, p);
    pmax = std::max(pmax, p);
    double cur = p - opt.beat_level;
    if (prev != 0.0 && cur != 0.0 && (prev < 0.0) != (cur < 0.0)) ++crossings;
    prev = cur;
  }
  bool trapped = (p_start >= opt.beat_level) ? (pmin > opt.trap_threshold)
                                             : (pmax < 1.0 - opt.trap_threshold);
  if (trapped) return TrajectoryClass::SelfTrapped;
  if (crossings >= 2) return TrajectoryClass::Beating;
  return TrajectoryClass::Inconclusive;
}

DriftStats action_drift_stats(const DnlsModel& model, int ensemble, double rho, double horizon,
                              double dtau, unsigned long long seed, int threads) {
  if (rho * std::sqrt(static_cast<double>(model.n)) >= 1.0)
    throw std::invalid_argument("action_drift_stats: rho sqrt(n) must be below 1");
  if (ensemble < 1) throw std::invalid_argument("action_drift_stats: empty ensemble");

  auto sample_state = [&](unsigned long long traj_seed) {
    std::mt19937_64 rng(traj_seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    DnlsState psi(model.n);
    for (int attempt = 0; attempt < 100000; ++attempt) {
      double nrm = 0.0;
      for (int j = 0; j < model.n; ++j) {
        psi[j] = cplx(gauss(rng), gauss(rng));
        nrm += std::norm(psi[j]);
      }
      nrm = std::sqrt(nrm);
      bool ok = true;
      for (int j = 0; j < model.n; ++j) {
        psi[j] /= nrm;
        if (std::abs(psi[j]) <= rho) ok = false;
      }
      if (ok) return psi;
    }
    throw std::runtime_error("action_drift_stats: rejection sampling exhausted");
  };

  DriftStats stats;
  stats.drifts.assign(ensemble, 0.0);
  threads = std::max(1, threads);
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= ensemble) break;
      DnlsState psi = sample_state(seed + 1000003ULL * static_cast<unsigned long long>(i));
      DnlsTrajectory t = dnls_integrate(model, psi, horizon, dtau, 1 << 30);
      stats.drifts[i] = t.max_action_drift;
    }
  };
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::vector<double> sorted = stats.drifts;
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double q) {
    double idx = q * (sorted.size() - 1);
    size_t lo = static_cast<size_t>(idx);
    size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (idx - lo) * (sorted[hi] - sorted[lo]);
  };
  stats.median = quantile(0.5);
  stats.q90 = quantile(0.9);
  return stats;
}

}  // namespace gpelab
