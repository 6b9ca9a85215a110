#include "gpelab/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "gpelab/diagnostics.hpp"
#include "gpelab/experiment.hpp"

namespace gpelab {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(const char* spec, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), spec, a, b, c);
  return buf;
}

// ---------------------------------------------------------------- criterion 1
CriterionResult c1_harmonic_oracle() {
  CriterionResult r{1, "harmonic oracle, Fourier grid", false, 0, ""};
  const double hbar = 0.1;
  Grid g = make_grid(8.0, 4096);
  std::vector<double> v(g.n);
  for (int i = 0; i < g.n; ++i) v[i] = 1.0 + g.x[i] * g.x[i];
  SpectralData sd = eigensolve_samples(v, g, hbar, 5, Discretization::Fourier);
  double worst = 0.0;
  for (int k = 0; k < 5; ++k) {
    double exact = 1.0 + hbar * (2 * k + 1);
    worst = std::max(worst, std::abs(sd.eigenvalues[k] - exact) / exact);
  }
  r.pass = worst < 1e-6;
  r.detail = fmt("max rel err %.3g (limit 1e-6)", worst);
  return r;
}

// ---------------------------------------------------------------- criterion 2
CriterionResult c2_splitting_asymptotics() {
  CriterionResult r{2, "tunneling splitting rate", false, 0, ""};
  PotentialSpec dw = make_double_well(1.0, 1.0);
  double gamma = agmon_distance(dw, 1);  // 4/3 for this well
  std::vector<double> inv_h, om;
  for (double hbar : {0.12, 0.15, 0.2, 0.25, 0.3}) {
    Grid g = make_grid(8.0, 1024);
    SpectralData sd = eigensolve(dw, g, hbar, 4, Discretization::Fourier);
    SplittingResult sp = splitting(sd, 2);
    inv_h.push_back(1.0 / hbar);
    om.push_back(sp.omega);
  }
  FitResult fit = fit_semilog(inv_h, om);
  double rel = std::abs(fit.slope + gamma) / gamma;
  r.pass = rel <= 0.10;
  r.detail = fmt("slope %.4f vs -%.4f, rel dev %.3f (limit 0.10)", fit.slope, gamma, rel);
  return r;
}

ExperimentConfig base_config() {
  ExperimentConfig c;
  c.potential = make_double_well(1.0, 1.0);
  c.half_width = 8.0;
  c.points = 1024;
  c.discretization = "fourier";
  c.hbar = 0.2;
  c.sigma = 2;
  c.s = 1;
  return c;
}

// ---------------------------------------------------------------- criterion 3
CriterionResult c3_linear_beating() {
  CriterionResult r{3, "linear beating period", false, 0, ""};
  ExperimentConfig c = base_config();
  Workspace ws = make_workspace(c, 16);
  const double T = ws.beat_period;

  GpeRunConfig cfg;
  cfg.hbar = c.hbar;
  cfg.eps = 0.0;
  cfg.sigma = c.sigma;
  cfg.dt = T / 2000.0;
  cfg.t_end = 2.2 * T;
  cfg.modes = 16;
  cfg.record_stride = 1;
  cfg.s = 1;

  double rt = 1.0 / std::sqrt(2.0);
  WaveField psi0 = field_from_eigenmodes(ws.spectral, {cplx(rt, 0.0), cplx(rt, 0.0)});
  GpeTrajectory traj = gpe_integrate(ws.spectral, ws.basis, cfg, psi0);

  int target = traj.obs.front().populations[1] > traj.obs.front().populations[0] ? 0 : 1;
  double t_peak = -1.0, p_peak = 0.0, mass_drift = 0.0;
  std::vector<double> ts, xs;
  for (const auto& o : traj.obs) {
    if (o.t <= 0.75 * T && o.populations[target] > p_peak) {
      p_peak = o.populations[target];
      t_peak = o.t;
    }
    mass_drift = std::max(mass_drift, std::abs(o.mass - 1.0));
    ts.push_back(o.t);
    xs.push_back(o.x_mean);
  }
  BeatingReport beat = beating_detector(ts, xs, T, 1e-3);

  // full transfer happens at half the expectation-value period
  bool transfer_ok = p_peak > 0.99 && std::abs(t_peak - 0.5 * T) <= 0.02 * T;
  bool period_ok = beat.conclusive && beat.is_beating && std::abs(beat.period - T) <= 0.02 * T;
  bool mass_ok = mass_drift <= 1e-10;
  r.pass = transfer_ok && period_ok && mass_ok;
  r.detail = fmt("transfer at t=%.4g (T/2=%.4g), <x> period dev %.3g",
                 t_peak, 0.5 * T, std::abs(beat.period - T) / T) +
             fmt(", mass drift %.2g", mass_drift);
  return r;
}

// ---------------------------------------------------------------- criterion 4
CriterionResult c4_conservation(int threads) {
  (void)threads;
  CriterionResult r{4, "conservation and splitting order", false, 0, ""};
  ExperimentConfig c = base_config();
  Workspace ws = make_workspace(c, 96);
  const double T = ws.beat_period;
  double eps = eps_for_eta(ws, c, 1.0);

  double rt = 1.0 / std::sqrt(2.0);
  WaveField psi0 = field_from_eigenmodes(ws.spectral, {cplx(rt, 0.0), cplx(rt, 0.0)});

  std::vector<double> dts, drifts;
  double mass_worst = 0.0;
  for (double div : {16000.0, 32000.0, 64000.0}) {
    GpeRunConfig cfg;
    cfg.hbar = c.hbar;
    cfg.eps = eps;
    cfg.sigma = c.sigma;
    cfg.dt = T / div;
    cfg.t_end = T / 8.0;
    cfg.method = GpeRunConfig::Method::FourierSplit;
    cfg.modes = 96;
    cfg.record_stride = 8;
    cfg.record_subspace_norms = false;
    GpeTrajectory traj = gpe_integrate(ws.spectral, ws.basis, cfg, psi0);
    double e0 = traj.obs.front().energy, drift = 0.0;
    for (const auto& o : traj.obs) {
      drift = std::max(drift, std::abs(o.energy - e0));
      mass_worst = std::max(mass_worst, std::abs(o.mass - 1.0));
    }
    dts.push_back(cfg.dt);
    drifts.push_back(drift);
  }
  FitResult fit = fit_loglog(dts, drifts);

  DnlsModel model = DnlsModel::normalized(2, 3.0, 2);
  DnlsTrajectory dt = dnls_integrate(model, {cplx(1.0, 0.0), cplx(0.0, 0.0)}, 100.0, 1e-2, 64);

  bool order_ok = std::abs(fit.slope - 2.0) <= 0.2;
  bool mass_ok = mass_worst <= 1e-10;
  bool inv_ok = dt.max_invariant_drift <= 1e-10;
  r.pass = order_ok && mass_ok && inv_ok;
  r.detail = fmt("energy slope %.3f (2.0 +- 0.2), mass drift %.2g, ", fit.slope, mass_worst) +
             fmt("dnls invariant drift %.2g", dt.max_invariant_drift);
  return r;
}

// ---------------------------------------------------------------- criterion 5
CriterionResult c5_bifurcation() {
  CriterionResult r{5, "double-well bifurcation and trapping", false, 0, ""};
  double eta_birth = -1.0;
  for (double eta = 1.5; eta <= 2.5 + 1e-9; eta += 0.01) {
    if (double_well_analysis(eta, 2).bifurcated) {
      eta_birth = eta;
      break;
    }
  }
  bool birth_ok = eta_birth > 0.0 && std::abs(eta_birth - 2.0) <= 0.05;

  DnlsModel m15 = DnlsModel::normalized(2, 1.5, 2);
  DnlsTrajectory t15 = dnls_integrate(m15, {cplx(1.0, 0.0), cplx(0.0, 0.0)}, 100.0, 5e-3, 16);
  double min15 = 1.0;
  for (const auto& st : t15.states) min15 = std::min(min15, std::norm(st[0]));
  bool beat_ok = min15 < 0.5 &&
                 classify_trajectory(m15, {cplx(1.0, 0.0), cplx(0.0, 0.0)}, 100.0) ==
                     TrajectoryClass::Beating;

  DnlsModel m3 = DnlsModel::normalized(2, 3.0, 2);
  DnlsTrajectory t3 = dnls_integrate(m3, {cplx(1.0, 0.0), cplx(0.0, 0.0)}, 100.0, 5e-3, 16);
  double min3 = 1.0;
  for (const auto& st : t3.states) min3 = std::min(min3, std::norm(st[0]));
  bool trap_ok = min3 > 0.9;

  r.pass = birth_ok && beat_ok && trap_ok;
  r.detail = fmt("birth at eta=%.3f, min|psi1|^2: %.3f at eta=1.5, ", eta_birth, min15) +
             fmt("%.3f at eta=3 (want > 0.9; localized orbits detach at eta=4)", min3);
  return r;
}

// ------------------------------------------------------- criteria 6 and 7 run
struct CompareRun {
  double eta_eom = 0.0;
  double mu_scaled = 0.0;
  double sup_disc = 0.0;
  double sup_ratio = 0.0;  // sup_t picnorm / xs_full
  double mass_drift = 0.0;
};

const std::vector<CompareRun>& comparison_runs() {
  static std::vector<CompareRun> memo;
  if (!memo.empty()) return memo;
  ExperimentConfig c = base_config();
  Workspace ws = make_workspace(c, 64);
  for (double eta : {1.0, 0.5, 0.25}) {
    double eps = eps_for_eta(ws, c, eta);
    DnlsModel model = extract_coefficients(ws.spectral, ws.basis, eps, c.sigma);

    GpeRunConfig cfg;
    cfg.hbar = c.hbar;
    cfg.eps = eps;
    cfg.sigma = c.sigma;
    cfg.dt = ws.beat_period / 2000.0;
    cfg.t_end = ws.beat_period;
    cfg.modes = 64;
    cfg.record_stride = 2;
    cfg.s = c.s;
    double rt = 1.0 / std::sqrt(2.0);
    WaveField psi0 = field_from_eigenmodes(ws.spectral, {cplx(rt, 0.0), cplx(rt, 0.0)});
    GpeTrajectory gpe = gpe_integrate(ws.spectral, ws.basis, cfg, psi0);

    DnlsState red0 = gpe.obs.front().well_amplitudes;
    double tau_end = model.omega * cfg.t_end / c.hbar;
    double dtau = model.omega * cfg.dt / c.hbar;
    DnlsTrajectory red = dnls_integrate(model, red0, tau_end, dtau, 1);
    ComparisonReport rep = compare_gpe_dnls(gpe, red, ws.basis, model, c.hbar);

    CompareRun row;
    row.eta_eom = eta;
    row.mu_scaled = (model.omega + std::abs(eps) / std::pow(c.hbar, c.sigma)) /
                    std::pow(c.hbar, 1.5);
    row.sup_disc = rep.sup_discrepancy;
    for (const auto& o : gpe.obs) {
      row.sup_ratio = std::max(row.sup_ratio, o.picnorm / o.xs_full);
      row.mass_drift = std::max(row.mass_drift, std::abs(o.mass - 1.0));
    }
    memo.push_back(row);
  }
  return memo;
}

CriterionResult c6_reduction_accuracy() {
  CriterionResult r{6, "field vs reduced-model populations", false, 0, ""};
  const auto& runs = comparison_runs();
  bool small = runs[0].sup_disc <= 0.05;
  bool monotone = runs[0].sup_disc > runs[1].sup_disc && runs[1].sup_disc > runs[2].sup_disc;
  bool mass_ok = true;
  for (const auto& q : runs) mass_ok = mass_ok && q.mass_drift <= 1e-10;
  r.pass = small && monotone && mass_ok;
  r.detail = fmt("sup discrepancy %.4f / %.4f / %.4f at eta 1, 0.5, 0.25", runs[0].sup_disc,
                 runs[1].sup_disc, runs[2].sup_disc);
  return r;
}

CriterionResult c7_out_of_block_envelope() {
  CriterionResult r{7, "out-of-block norm envelope", false, 0, ""};
  const auto& runs = comparison_runs();
  double sxy = 0.0, sxx = 0.0;
  for (const auto& q : runs) {
    sxy += q.mu_scaled * q.sup_ratio;
    sxx += q.mu_scaled * q.mu_scaled;
  }
  double K = sxy / sxx;
  bool ok = true;
  std::ostringstream os;
  os << "K=" << fmt("%.4g", K) << ";";
  for (const auto& q : runs) {
    double envelope = 1.2 * K * q.mu_scaled;
    ok = ok && q.sup_ratio <= envelope;
    os << fmt(" ratio %.3g vs cap %.3g;", q.sup_ratio, envelope);
  }
  r.pass = ok;
  r.detail = os.str();
  return r;
}

// ---------------------------------------------------------------- criterion 8
CriterionResult c8_norm_equivalence() {
  CriterionResult r{8, "graph/multiplier norm equivalence band", false, 0, ""};
  PotentialSpec dw = make_double_well(1.0, 1.0);
  const int s = 2;  // s = 1 is the trivial identity; the cross terms enter at s = 2
  struct G {
    double x0, w;
    int mod;  // multiply by x^mod
  };
  // widths kept narrow enough that the spatial tails die inside the spectral
  // window the solver can certify
  std::vector<G> family = {{0.0, 0.5, 0}, {0.0, 0.6, 0}, {0.7, 0.5, 0}, {-0.7, 0.5, 0},
                           {1.0, 0.45, 0}, {-1.0, 0.4, 0}, {0.3, 0.6, 0}, {1.2, 0.45, 0},
                           {0.0, 0.55, 1}, {0.5, 0.5, 1}};
  double lo = 1e300, hi = 0.0;
  for (double hbar : {0.05, 0.1, 0.2, 0.4}) {
    Grid g = make_grid(8.0, 2048);
    int count = std::min(g.n / 4, static_cast<int>(std::ceil(22.0 / hbar)));
    SpectralData sd = eigensolve(dw, g, hbar, count, Discretization::FiniteDifference);
    for (const auto& fam : family) {
      WaveField psi = make_field(g);
      for (int i = 0; i < g.n; ++i) {
        double u = (g.x[i] - fam.x0) / fam.w;
        double val = std::exp(-0.5 * u * u);
        if (fam.mod) val *= g.x[i];
        psi.values[i] = val;
      }
      normalize_l2(g, psi.values);
      double a = xs_norm(sd, psi, s, 1e-3);
      double b = alt_norm(psi, s, hbar, dw);
      double ratio = a / b;
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
  }
  r.pass = hi / lo < 10.0;
  r.detail = fmt("ratio band [%.4f, %.4f], spread %.3f (limit 10)", lo, hi, hi / lo);
  return r;
}

// ------------------------------------------------- rational structural fixture
struct RationalFixture {
  ModeTruncation<Rational> tr;
  std::vector<int> band_of;
};

RationalFixture make_rational_fixture() {
  RationalFixture f;
  f.tr.modes = 6;
  f.tr.u_count = 2;
  f.tr.hbar = 0.1;
  f.tr.lambda = {Rational(1), Rational(11, 10), Rational(3, 2),
                 Rational(17, 10), Rational(5, 2), Rational(27, 10)};
  f.tr.Omega = (f.tr.lambda[0] + f.tr.lambda[1]) / 2;
  f.band_of = {-1, -1, 1, 1, 2, 2};
  return f;
}

// random Gauge-invariant rational polynomial, real valued as a function
Poly<Rational> random_rational_poly(const RationalFixture& f, int degree, unsigned seed,
                                    int terms) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> mode(0, f.tr.modes - 1);
  std::uniform_int_distribution<int> num(-9, 9);
  std::uniform_int_distribution<int> den(2, 7);
  std::uniform_int_distribution<int> half_deg(1, degree / 2);
  Poly<Rational> p;
  p.modes = f.tr.modes;
  for (int t = 0; t < terms; ++t) {
    int d = half_deg(rng);
    MonoKey key;
    for (int q = 0; q < d; ++q) {
      key.k += 1ULL << (4 * mode(rng));
      key.l += 1ULL << (4 * mode(rng));
    }
    key.eps = 1;
    Cx<Rational> c(Rational(num(rng), den(rng)), Rational(num(rng), den(rng)));
    if (FieldOps<Rational>::is_zero(c)) continue;
    p.add(key, c);
    MonoKey conj_key;  // realness: coeff(L,K) = conj(coeff(K,L))
    conj_key.k = key.l;
    conj_key.l = key.k;
    conj_key.eps = key.eps;
    p.add(conj_key, c.conj());
  }
  return p;
}

// ---------------------------------------------------------------- criterion 9
CriterionResult c9_normal_form_exactness() {
  CriterionResult r{9, "exact two-step normal form (rational)", false, 0, ""};
  RationalFixture f = make_rational_fixture();

  NormalFormState<Rational> st;
  st.truncation = f.tr;
  st.band_of = f.band_of;
  st.h0 = h0_poly(f.tr);
  st.degree_cap = 6;
  st.eps_cap = 4;
  st.series_cap = 4;

  Poly<Rational> pert = random_rational_poly(f, 4, 20260810u, 60);
  {
    // a detuning-like noncoupling quadratic rides along
    MonoKey key;
    key.k = 1ULL;
    key.l = 1ULL;
    key.eps = 1;
    pert.add(key, Cx<Rational>(Rational(-1, 20), Rational(0)));
    key.k = 1ULL << 4;
    key.l = 1ULL << 4;
    pert.add(key, Cx<Rational>(Rational(1, 20), Rational(0)));
  }
  decompose(pert, f.tr.u_count, f.band_of, st.r, st.z);

  bool ok = true;
  std::ostringstream os;
  try {
    lie_transform_step(st);  // throws if order-1 coupling fails to cancel exactly
    lie_transform_step(st);  // order 2
  } catch (const std::exception& e) {
    r.detail = std::string("step failed: ") + e.what();
    return r;
  }

  // no coupling content at eps orders 1 and 2 anywhere
  Poly<Rational> coup, nonc;
  decompose(st.r, f.tr.u_count, f.band_of, coup, nonc);
  for (const auto& [key, c] : coup.terms)
    if (key.eps <= 2) ok = false;
  if (!nonc.empty()) {
    Poly<Rational> zc, zn;
    decompose(st.z, f.tr.u_count, f.band_of, zc, zn);
    if (!zc.empty()) ok = false;
  }
  os << "coupling orders 1,2 empty: " << (ok ? "yes" : "NO");

  // Gauge invariance is exact
  bool gauge = bracket_with_number(st.z).empty() && bracket_with_number(st.r).empty();
  os << "; {N,Z}={N,R}=0: " << (gauge ? "yes" : "NO");

  // {H0, G_s} equals the removed coupling exactly, via the bracket engine
  bool homological = true;
  for (size_t s = 0; s < st.generators.size(); ++s) {
    Poly<Rational> lhs = poisson_bracket(st.h0, st.generators[s], 8, 100);
    Poly<Rational> diff = lhs;
    diff += st.removed[s].negated();
    if (!diff.empty()) homological = false;
  }
  os << "; {H0,G}-F=0: " << (homological ? "yes" : "NO");

  r.pass = ok && gauge && homological;
  r.detail = os.str();
  return r;
}

// --------------------------------------------------------------- criterion 10
CriterionResult c10_band_norm_invariance() {
  CriterionResult r{10, "band-norm invariance and cubic growth", false, 0, ""};
  // double fixture mirroring the rational one
  const int modes = 6, nu = 2, s = 1;
  std::vector<double> lambda = {1.0, 1.1, 1.5, 1.7, 2.5, 2.7};
  std::vector<int> band_of = {-1, -1, 1, 1, 2, 2};
  std::vector<double> edges = {0.5, 2.1, 4.5};
  std::vector<double> weights(modes, 0.0);
  for (int m = nu; m < modes; ++m) weights[m] = std::pow(edges[band_of[m]], s);

  Poly<double> n_e = weighted_z_poly<double>(modes, nu, weights);
  Poly<double> n_u;
  n_u.modes = modes;
  for (int m = 0; m < nu; ++m) {
    MonoKey key;
    key.k = 1ULL << (4 * m);
    key.l = 1ULL << (4 * m);
    n_u.add(key, Cx<double>(1.0, 0.0));
  }

  // enumerate Gauge-invariant monomials of degree <= 6 with |m|+|n| <= 2
  std::vector<std::uint64_t> sides;  // all packed exponents of degree <= 3
  std::function<void(int, int, std::uint64_t)> gen = [&](int mode, int left, std::uint64_t acc) {
    if (mode == modes) {
      sides.push_back(acc);
      return;
    }
    for (int e = 0; e <= left; ++e)
      gen(mode + 1, left - e, acc | (static_cast<std::uint64_t>(e) << (4 * mode)));
  };
  gen(0, 3, 0);

  long checked = 0;
  bool exact = true;
  for (std::uint64_t K : sides)
    for (std::uint64_t L : sides) {
      if (total_degree_side(K, modes) != total_degree_side(L, modes)) continue;
      MonoKey key;
      key.k = K;
      key.l = L;
      int zc = 0;
      for (int m = nu; m < modes; ++m) zc += exp_of(K, m) + exp_of(L, m);
      if (zc > 2) continue;
      if (classify_monomial<double>(key, modes, nu, band_of) == MonomialClass::Coupling)
        continue;
      Poly<double> mono;
      mono.modes = modes;
      mono.add(key, Cx<double>(1.0, 0.0));
      if (!poisson_bracket(n_e, mono, 13, 100).empty()) exact = false;
      if (!poisson_bracket(n_u, mono, 13, 100).empty()) exact = false;
      ++checked;
    }

  // cubic-in-z noncoupling content: |{N_E, Z}| ~ N_E^(3/2)
  Poly<double> z_poly;
  z_poly.modes = modes;
  auto add_real_pair = [&](std::uint64_t K, std::uint64_t L, double re, double im) {
    MonoKey key;
    key.k = K;
    key.l = L;
    z_poly.add(key, Cx<double>(re, im));
    MonoKey conj_key;
    conj_key.k = L;
    conj_key.l = K;
    z_poly.add(conj_key, Cx<double>(re, -im));
  };
  // z-degree-3 terms across bands, u-part balancing the Gauge constraint
  add_real_pair((1ULL << (4 * 2)) | (1ULL << (4 * 3)) | (1ULL << (4 * 0)),
                (1ULL << (4 * 4)) | (1ULL << (4 * 0)) | (1ULL << (4 * 1)), 0.8, 0.3);
  add_real_pair((1ULL << (4 * 2)) | (1ULL << (4 * 4)) | (1ULL << (4 * 1)),
                (1ULL << (4 * 5)) | (1ULL << (4 * 0)) | (1ULL << (4 * 1)), -0.5, 0.7);
  Poly<double> br = poisson_bracket(n_e, z_poly, 13, 100);

  std::vector<double> ne_vals, br_vals;
  std::mt19937_64 rng(7u);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<Cx<double>> direction(modes);
  for (int m = 0; m < modes; ++m) direction[m] = Cx<double>(uni(rng), uni(rng));
  for (double scale : {1e-1, 1e-2, 1e-3, 1e-4}) {
    std::vector<Cx<double>> pt(modes);
    for (int m = 0; m < nu; ++m) pt[m] = direction[m];
    std::vector<cplx> zc(modes, 0.0);
    for (int m = nu; m < modes; ++m) {
      pt[m] = direction[m].scaled(scale);
      zc[m] = cplx(pt[m].re, pt[m].im);
    }
    BandDecomposition bd;
    bd.edges = edges;
    bd.band_of = band_of;
    double ne = e_norm(zc, nu, bd, s);
    Cx<double> val = evaluate(br, pt, 1.0);
    ne_vals.push_back(ne);
    br_vals.push_back(std::abs(cplx(val.re, val.im)));
  }
  FitResult fit = fit_loglog(ne_vals, br_vals);
  bool slope_ok = std::abs(fit.slope - 1.5) <= 0.1;

  r.pass = exact && slope_ok && checked == 142;  // 30 pure-block + 112 same-band quadratic
  r.detail = fmt("%g monomials exactly invariant; growth slope %.4f (1.5 +- 0.1)",
                 static_cast<double>(checked), fit.slope);
  r.detail = exact ? r.detail : ("nonzero bracket found; " + r.detail);
  return r;
}

// --------------------------------------------------------------- criterion 11
CriterionResult c11_divided_matrix_norm() {
  CriterionResult r{11, "cross-band divided-matrix amplification", false, 0, ""};
  std::vector<double> hs = {0.05, 0.1, 0.2}, inv_h, max_ratio;
  for (double hbar : hs) {
    std::vector<double> lambda;
    for (int k = 1; 1.0 + hbar * (2 * k - 1) < 7.0; ++k)
      lambda.push_back(1.0 + hbar * (2 * k - 1));
    const int nu = 2;
    BandDecomposition bd = build_bands(lambda, nu, hbar);
    const int nz = static_cast<int>(lambda.size()) - nu;
    std::mt19937_64 rng(123u + static_cast<unsigned>(1000 * hbar));
    std::normal_distribution<double> gauss(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<std::vector<double>> F(nz, std::vector<double>(nz, 0.0));
      for (int a = 0; a < nz; ++a)
        for (int b = 0; b < nz; ++b)
          if (bd.band_of[nu + a] != bd.band_of[nu + b]) F[a][b] = gauss(rng);
      DivisorRatioReport rep = small_divisor_bound_check(F, lambda, nu, bd);
      worst = std::max(worst, rep.ratio);
    }
    inv_h.push_back(1.0 / hbar);
    max_ratio.push_back(worst);
  }
  FitResult fit = fit_loglog(inv_h, max_ratio);
  r.pass = fit.slope <= 1.7;
  r.detail = fmt("amplification slope %.3f (limit 1.7)", fit.slope);
  return r;
}

// --------------------------------------------------------------- criterion 12
CriterionResult c12_anticontinuum_drift(int threads) {
  CriterionResult r{12, "anticontinuum action drift scaling", false, 0, ""};
  std::vector<double> etas = {10.0, 20.0, 40.0, 80.0}, medians;
  for (double eta : etas) {
    DnlsModel model = DnlsModel::normalized(3, eta, 2);
    double dtau = std::min(0.01, 0.6 / ((2.0 * model.sigma + 1.0) * eta));
    DriftStats st = action_drift_stats(model, 100, 0.2, 200.0, dtau, 99991u, threads);
    medians.push_back(st.median);
  }
  FitResult fit = fit_loglog(etas, medians);
  r.pass = fit.slope >= -0.75 && fit.slope <= -0.25;
  r.detail = fmt("median drift slope %.3f (window [-0.75, -0.25]); medians %.3g.. %.3g",
                 fit.slope, medians.front(), medians.back());
  return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(int only_id, int threads) {
  std::vector<std::pair<int, std::function<CriterionResult()>>> table = {
      {1, c1_harmonic_oracle},
      {2, c2_splitting_asymptotics},
      {3, c3_linear_beating},
      {4, [threads] { return c4_conservation(threads); }},
      {5, c5_bifurcation},
      {6, c6_reduction_accuracy},
      {7, c7_out_of_block_envelope},
      {8, c8_norm_equivalence},
      {9, c9_normal_form_exactness},
      {10, c10_band_norm_invariance},
      {11, c11_divided_matrix_norm},
      {12, [threads] { return c12_anticontinuum_drift(threads); }},
  };
  std::vector<double> limits = {10.0, 120.0, 0.0, 0.0, 0.0, 0.0,
                                0.0,  0.0,   60.0, 0.0, 0.0, 300.0};

  std::vector<CriterionResult> out;
  for (auto& [id, fn] : table) {
    if (only_id != 0 && id != only_id) continue;
    auto start = std::chrono::steady_clock::now();
    CriterionResult res;
    try {
      res = fn();
    } catch (const std::exception& e) {
      res.id = id;
      res.name = "criterion " + std::to_string(id);
      res.pass = false;
      res.detail = std::string("exception: ") + e.what();
    }
    res.runtime_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    double limit = limits[id - 1];
    if (limit > 0.0 && res.runtime_s > limit) {
      res.pass = false;
      res.detail += fmt(" [runtime %.1fs over limit %.0fs]", res.runtime_s, limit);
    }
    out.push_back(std::move(res));
  }
  return out;
}

}  // namespace gpelab
