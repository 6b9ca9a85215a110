#include "gpelab/experiment.hpp"

#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "gpelab/acceptance.hpp"

namespace gpelab {

namespace fs = std::filesystem;
using nlohmann::json;

std::string config_digest(const std::string& canonical_json) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_json) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

ExperimentConfig config_from_json(const std::string& text) {
  json j = json::parse(text);
  if (j.value("schema", "gpelab-config-v1") != std::string("gpelab-config-v1"))
    throw std::invalid_argument("config: unknown schema tag");

  ExperimentConfig c;
  c.seed = j.value("seed", 12345ULL);
  c.threads = j.value("threads", 1);

  if (j.contains("potential")) c.potential = potential_from_json(j["potential"].dump());
  if (j.contains("grid")) {
    c.half_width = j["grid"].value("half_width", 8.0);
    c.points = j["grid"].value("points", 1024);
  }
  if (j.contains("physics")) {
    const auto& p = j["physics"];
    c.hbar = p.value("hbar", 0.2);
    c.eps = p.value("eps", 0.0);
    if (p.contains("eta") && !p["eta"].is_null()) c.eta = p["eta"].get<double>();
    c.sigma = p.value("sigma", 2);
    c.s = p.value("s", 1);
    if (c.hbar <= 0.0) throw std::invalid_argument("config: hbar must be positive");
    if (c.sigma < 1) throw std::invalid_argument("config: sigma must be a positive integer");
    if (c.s < 0) throw std::invalid_argument("config: s must be nonnegative");
  }
  if (j.contains("run")) {
    const auto& r = j["run"];
    c.dt = r.value("dt", 0.0);
    c.t_end = r.value("t_end", 0.0);
    c.dtau = r.value("dtau", 0.0);
    c.tau_end = r.value("tau_end", 0.0);
    c.record_stride = r.value("record_stride", 1);
    c.field_stride = r.value("field_stride", 0);
    c.gpe_method = r.value("method", "eigenbasis");
    c.modes = r.value("modes", 64);
    c.discretization = r.value("discretization", "fourier");
    if (c.gpe_method != "eigenbasis" && c.gpe_method != "fourier")
      throw std::invalid_argument("config: run.method must be eigenbasis or fourier");
    if (c.discretization != "fourier" && c.discretization != "fd")
      throw std::invalid_argument("config: run.discretization must be fourier or fd");
  }
  if (j.contains("initial")) {
    c.initial_type = j["initial"].value("type", "well");
    c.initial_index = j["initial"].value("index", c.potential.well_count());
    if (c.initial_type != "well" && c.initial_type != "mode" && c.initial_type != "doublet")
      throw std::invalid_argument("config: initial.type must be well, mode or doublet");
  } else {
    c.initial_index = c.potential.well_count();
  }
  if (j.contains("ensemble")) {
    c.ensemble = j["ensemble"].value("size", 100);
    c.rho = j["ensemble"].value("rho", 0.2);
  }
  if (j.contains("normalform")) {
    const auto& n = j["normalform"];
    c.nf.modes = n.value("modes", 12);
    c.nf.degree_cap = n.value("degree_cap", 2 * c.sigma + 4);
    c.nf.series_cap = n.value("series_cap", 0);
    c.nf.order = n.value("order", 0);
    c.nf.max_order = n.value("max_order", 4);
    c.nf.radius = n.value("radius", 1.0);
    c.nf.mu_star = n.value("mu_star", 1.0);
  } else {
    c.nf.degree_cap = 2 * c.sigma + 4;
  }
  if (j.contains("sweep")) {
    for (auto& [key, val] : j["sweep"].items()) {
      if (key == "subcommand") {
        c.sweep_subcommand = val.get<std::string>();
        continue;
      }
      c.sweep[key] = val.get<std::vector<double>>();
    }
  }
  if (j.contains("output")) c.out_dir = j["output"].value("dir", "out");

  c.canonical = json::parse(text).dump();
  c.digest = config_digest(c.canonical);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

void write_text(const std::string& path, const std::string& text) {
  fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Discretization parse_disc(const std::string& d) {
  return d == "fd" ? Discretization::FiniteDifference : Discretization::Fourier;
}

json poly_to_json(const Poly<double>& p) {
  json arr = json::array();
  std::vector<std::pair<MonoKey, Cx<double>>> items(p.terms.begin(), p.terms.end());
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.first.eps != b.first.eps) return a.first.eps < b.first.eps;
    if (a.first.k != b.first.k) return a.first.k < b.first.k;
    return a.first.l < b.first.l;
  });
  for (const auto& [key, c] : items) {
    json t;
    std::vector<int> K(p.modes), L(p.modes);
    for (int m = 0; m < p.modes; ++m) {
      K[m] = exp_of(key.k, m);
      L[m] = exp_of(key.l, m);
    }
    t["K"] = K;
    t["L"] = L;
    t["re"] = c.re;
    t["im"] = c.im;
    t["eps_order"] = key.eps;
    arr.push_back(std::move(t));
  }
  return arr;
}

}  // namespace

Workspace make_workspace(const ExperimentConfig& config, int eigen_count) {
  Workspace ws;
  ws.grid = make_grid(config.half_width, config.points);
  ws.spectral = eigensolve(config.potential, ws.grid, config.hbar, eigen_count,
                           parse_disc(config.discretization));
  ws.basis = single_well_basis(config.potential, ws.grid, config.hbar,
                               default_threshold(config.potential));
  ws.split = splitting(ws.spectral, config.potential.well_count());
  ws.beat_period = 3.14159265358979323846 * config.hbar / ws.split.omega;
  return ws;
}

double eps_for_eta(const Workspace& ws, const ExperimentConfig& config, double eta_eom) {
  DnlsModel probe = extract_coefficients(ws.spectral, ws.basis, 0.0, config.sigma);
  return eta_eom * ws.split.omega / ((config.sigma + 1) * probe.c);
}

WaveField initial_state(const Workspace& ws, const ExperimentConfig& config) {
  if (config.initial_type == "mode") {
    std::vector<cplx> coeffs(config.initial_index, cplx(0.0, 0.0));
    coeffs.back() = 1.0;
    return field_from_eigenmodes(ws.spectral, coeffs);
  }
  if (config.initial_type == "doublet") {
    double r = 1.0 / std::sqrt(2.0);
    return field_from_eigenmodes(ws.spectral, {cplx(r, 0.0), cplx(r, 0.0)});
  }
  // well states carry a small spectral tail from the modified-potential kink;
  // resolve them in the computed eigenbasis before propagating
  WaveField w = field_from_well(ws.basis, config.initial_index);
  ModeProjection proj = project(ws.spectral, ws.spectral.count(), w);
  WaveField out = field_from_eigenmodes(ws.spectral, proj.zeta);
  normalize_l2(out.grid, out.values);
  return out;
}

namespace {

void write_observables_csv(const std::string& path, const GpeTrajectory& traj,
                           const std::string& digest) {
  std::ostringstream os;
  os << "# config_digest=" << digest << "\n";
  os << "t,N,E,x_mean";
  size_t n = traj.obs.empty() ? 0 : traj.obs.front().populations.size();
  for (size_t j = 1; j <= n; ++j) os << ",p_" << j;
  os << ",picnorm\n";
  for (const auto& o : traj.obs) {
    os << fmt(o.t) << "," << fmt(o.mass) << "," << fmt(o.energy) << "," << fmt(o.x_mean);
    for (double p : o.populations) os << "," << fmt(p);
    os << "," << fmt(o.picnorm) << "\n";
  }
  write_text(path, os.str());
}

void write_snapshots(const std::string& dir, const GpeTrajectory& traj, const Grid& grid,
                     const std::string& digest) {
  if (traj.snapshots.empty()) return;
  json head;
  head["config_digest"] = digest;
  head["grid"] = {{"half_width", grid.half_width}, {"points", grid.n}, {"spacing", grid.h}};
  head["times"] = traj.snapshot_t;
  head["layout"] = "complex128 interleaved, one field per time, x fastest";
  head["file"] = "snapshots.bin";
  write_text(dir + "/snapshots.json", head.dump(2) + "\n");
  std::ofstream bin(dir + "/snapshots.bin", std::ios::binary);
  for (const auto& f : traj.snapshots)
    bin.write(reinterpret_cast<const char*>(f.values.data()),
              static_cast<std::streamsize>(f.values.size() * sizeof(cplx)));
}

void write_dnls_csv(const std::string& path, const DnlsTrajectory& traj,
                    const std::string& digest) {
  std::ostringstream os;
  os << "# config_digest=" << digest << "\n";
  size_t n = traj.states.empty() ? 0 : traj.states.front().size();
  os << "tau";
  for (size_t j = 1; j <= n; ++j) os << ",re_" << j << ",im_" << j << ",p_" << j;
  os << ",I,K0\n";
  for (size_t i = 0; i < traj.tau.size(); ++i) {
    os << fmt(traj.tau[i]);
    for (size_t j = 0; j < n; ++j) {
      const cplx& z = traj.states[i][j];
      os << "," << fmt(z.real()) << "," << fmt(z.imag()) << "," << fmt(std::norm(z));
    }
    os << "," << fmt(traj.invariant[i]) << "," << fmt(traj.k0[i]) << "\n";
  }
  write_text(path, os.str());
}

json model_to_json(const DnlsModel& m) {
  json j;
  j["n"] = m.n;
  j["sigma"] = m.sigma;
  j["omega"] = m.omega;
  j["Omega"] = m.Omega;
  j["eps"] = m.eps;
  j["c"] = m.c;
  j["nu"] = m.nu;
  j["c_bond"] = m.c_bond;
  j["delta"] = m.delta;
  j["lambda"] = m.lambda;
  j["eta"] = m.eta;
  j["eta_eom"] = m.eta_eom();
  return j;
}

int cmd_spectrum(const ExperimentConfig& config) {
  const int n = config.potential.well_count();
  Workspace ws = make_workspace(config, std::max(n + 4, 8));

  json out;
  out["schema"] = "gpelab-spectrum-v1";
  out["config_digest"] = config.digest;
  out["hbar"] = config.hbar;
  out["omega"] = ws.split.omega;
  out["Omega"] = ws.split.Omega;
  out["beat_period"] = ws.beat_period;
  out["gap"] = ws.spectral.eigenvalues[n] - ws.spectral.eigenvalues[n - 1];
  out["eigenvalues"] = ws.spectral.eigenvalues;
  out["residuals"] = ws.spectral.residuals;
  out["lambda_hat"] = ws.basis.lambda_hat;
  out["eq8_residual"] = ws.basis.eq8_residual;
  out["overlap_inf"] = ws.basis.overlap_inf;
  out["c_matrix"] = ws.basis.c;
  std::vector<double> gammas;
  for (int j = 1; j < n; ++j) gammas.push_back(agmon_distance(config.potential, j));
  out["agmon"] = gammas;
  out["gamma_eff"] = gamma_effective(config.potential);

  ValidationReport rep = validate_hypothesis1(config.potential, ws.grid);
  json clauses = json::array();
  for (const auto& c : rep.clauses)
    clauses.push_back({{"clause", c.clause},
                       {"pass", c.pass},
                       {"measured", c.measured},
                       {"worst_x", c.worst_x},
                       {"detail", c.detail}});
  out["hypothesis1"] = {{"pass", rep.pass}, {"clauses", clauses}};

  write_text(config.out_dir + "/summary.json", out.dump(2) + "\n");

  std::ostringstream ev;
  ev << "# config_digest=" << config.digest << "\nk,lambda\n";
  for (int k = 0; k < ws.spectral.count(); ++k)
    ev << (k + 1) << "," << fmt(ws.spectral.eigenvalues[k]) << "\n";
  write_text(config.out_dir + "/eigenvalues.csv", ev.str());

  std::ostringstream vec;
  vec << "# config_digest=" << config.digest << "\nx";
  for (int k = 1; k <= ws.spectral.count(); ++k) vec << ",phi_" << k;
  vec << "\n";
  for (int i = 0; i < ws.grid.n; ++i) {
    vec << fmt(ws.grid.x[i]);
    for (int k = 0; k < ws.spectral.count(); ++k) vec << "," << fmt(ws.spectral.eigenvectors[k][i]);
    vec << "\n";
  }
  write_text(config.out_dir + "/eigenvectors.csv", vec.str());
  export_potential_csv(config.potential, ws.grid, config.out_dir + "/potential.csv");
  return 0;
}

int cmd_dnls_fit(const ExperimentConfig& config) {
  Workspace ws = make_workspace(config, std::max(config.potential.well_count() + 2, 6));
  double eps = config.eta ? eps_for_eta(ws, config, *config.eta) : config.eps;
  DnlsModel m = extract_coefficients(ws.spectral, ws.basis, eps, config.sigma);
  json out;
  out["schema"] = "gpelab-dnls-fit-v1";
  out["config_digest"] = config.digest;
  out["model"] = model_to_json(m);
  write_text(config.out_dir + "/model.json", out.dump(2) + "\n");
  return 0;
}

GpeRunConfig gpe_config(const ExperimentConfig& config, const Workspace& ws, double eps) {
  GpeRunConfig cfg;
  cfg.hbar = config.hbar;
  cfg.eps = eps;
  cfg.sigma = config.sigma;
  cfg.dt = config.dt > 0.0 ? config.dt : ws.beat_period / 2000.0;
  cfg.t_end = config.t_end > 0.0 ? config.t_end : ws.beat_period;
  cfg.record_stride = config.record_stride;
  cfg.field_stride = config.field_stride;
  cfg.method = config.gpe_method == "fourier" ? GpeRunConfig::Method::FourierSplit
                                              : GpeRunConfig::Method::EigenBasis;
  cfg.modes = config.modes;
  cfg.s = config.s;
  return cfg;
}

int cmd_simulate_gpe(const ExperimentConfig& config) {
  Workspace ws = make_workspace(config, config.modes);
  double eps = config.eta ? eps_for_eta(ws, config, *config.eta) : config.eps;
  GpeRunConfig cfg = gpe_config(config, ws, eps);
  WaveField psi0 = initial_state(ws, config);
  GpeTrajectory traj = gpe_integrate(ws.spectral, ws.basis, cfg, psi0);

  write_observables_csv(config.out_dir + "/observables.csv", traj, config.digest);
  write_snapshots(config.out_dir, traj, ws.grid, config.digest);

  double worst_mass = 0.0, worst_energy = 0.0;
  for (const auto& o : traj.obs) {
    worst_mass = std::max(worst_mass, std::abs(o.mass - traj.obs.front().mass));
    worst_energy = std::max(worst_energy, std::abs(o.energy - traj.obs.front().energy));
  }
  json out;
  out["schema"] = "gpelab-gpe-run-v1";
  out["config_digest"] = config.digest;
  out["eps"] = eps;
  out["mu"] = gpe_mu(cfg, ws.split.omega);
  out["omega"] = ws.split.omega;
  out["dt"] = cfg.dt;
  out["t_end"] = cfg.t_end;
  out["mass_drift"] = worst_mass;
  out["energy_drift"] = worst_energy;
  write_text(config.out_dir + "/summary.json", out.dump(2) + "\n");
  return 0;
}

int cmd_simulate_dnls(const ExperimentConfig& config) {
  DnlsModel model;
  json out;
  if (config.eta) {
    model = DnlsModel::normalized(config.potential.well_count(), *config.eta, config.sigma);
  } else {
    Workspace ws = make_workspace(config, std::max(config.potential.well_count() + 2, 6));
    model = extract_coefficients(ws.spectral, ws.basis, config.eps, config.sigma);
  }
  DnlsState psi0(model.n, cplx(0.0, 0.0));
  int idx = std::clamp(config.initial_index, 1, model.n);
  psi0[idx - 1] = 1.0;

  double tau_end = config.tau_end > 0.0 ? config.tau_end : 100.0;
  double dtau = config.dtau > 0.0 ? config.dtau : 1e-2;
  DnlsTrajectory traj = dnls_integrate(model, psi0, tau_end, dtau, config.record_stride);
  write_dnls_csv(config.out_dir + "/trajectory.csv", traj, config.digest);

  out["schema"] = "gpelab-dnls-run-v1";
  out["config_digest"] = config.digest;
  out["model"] = model_to_json(model);
  out["invariant_drift"] = traj.max_invariant_drift;
  out["k0_drift"] = traj.max_k0_drift;
  out["max_action_drift"] = traj.max_action_drift;
  if (model.n == 2) {
    out["classification"] = to_string(classify_trajectory(model, psi0, tau_end));
    DoubleWellAnalysis an = double_well_analysis(model.eta_eom(), config.sigma);
    json eqs = json::array();
    for (const auto& e : an.equilibria)
      eqs.push_back({{"p", e.p},
                     {"alpha", e.alpha},
                     {"level", e.level},
                     {"stable", e.stable},
                     {"localized", e.localized}});
    out["analysis"] = {{"eta", an.eta},
                       {"bifurcated", an.bifurcated},
                       {"equilibria", eqs},
                       {"homoclinic_level", an.homoclinic_level},
                       {"saddle_level_measured", an.saddle_level_measured}};
  }
  write_text(config.out_dir + "/summary.json", out.dump(2) + "\n");
  return 0;
}

int cmd_compare(const ExperimentConfig& config) {
  Workspace ws = make_workspace(config, config.modes);
  double eta_eom = config.eta ? *config.eta : 1.0;
  double eps = eps_for_eta(ws, config, eta_eom);
  DnlsModel model = extract_coefficients(ws.spectral, ws.basis, eps, config.sigma);

  GpeRunConfig cfg = gpe_config(config, ws, eps);
  WaveField psi0 = initial_state(ws, config);
  GpeTrajectory gpe = gpe_integrate(ws.spectral, ws.basis, cfg, psi0);

  DnlsState red0 = gpe.obs.front().well_amplitudes;
  double tau_end = model.omega * cfg.t_end / config.hbar;
  double dtau = model.omega * cfg.dt / config.hbar;
  DnlsTrajectory red = dnls_integrate(model, red0, tau_end, dtau, 1);

  ComparisonReport rep = compare_gpe_dnls(gpe, red, ws.basis, model, config.hbar);
  DriftReport drift = drift_report(gpe, model, config.hbar, eps, config.sigma);

  std::ostringstream cs;
  cs << "# config_digest=" << config.digest << "\nt";
  for (int j = 1; j <= model.n; ++j) cs << ",gpe_p_" << j;
  for (int j = 1; j <= model.n; ++j) cs << ",dnls_p_" << j;
  cs << "\n";
  for (size_t i = 0; i < rep.t.size(); ++i) {
    cs << fmt(rep.t[i]);
    for (double p : rep.field_populations[i]) cs << "," << fmt(p);
    for (double p : rep.reduced_populations[i]) cs << "," << fmt(p);
    cs << "\n";
  }
  write_text(config.out_dir + "/comparison.csv", cs.str());

  json out;
  out["schema"] = "gpelab-compare-v1";
  out["config_digest"] = config.digest;
  out["eta_eom"] = eta_eom;
  out["eps"] = eps;
  out["model"] = model_to_json(model);
  out["sup_discrepancy"] = rep.sup_discrepancy;
  out["l2_discrepancy"] = rep.l2_discrepancy;
  out["mu"] = drift.mu;
  out["mu_scaled"] = drift.mu_scaled;
  out["invariant_drift"] = drift.invariant_drift;
  out["k0_drift"] = drift.k0_drift;
  out["time_budget"] = drift.time_budget;
  out["window_fraction"] = drift.window_fraction;
  write_text(config.out_dir + "/summary.json", out.dump(2) + "\n");
  return 0;
}

int cmd_normal_form(const ExperimentConfig& config) {
  int count = std::max(config.nf.modes, config.potential.well_count() + 2);
  Workspace ws = make_workspace(config, count);
  double eps = config.eta ? eps_for_eta(ws, config, *config.eta) : config.eps;
  NormalFormResult res = normal_form(ws.spectral, config.potential.well_count(), eps,
                                     config.sigma, config.nf);

  json out;
  out["schema"] = "gpelab-normal-form-v1";
  out["config_digest"] = config.digest;
  out["eps"] = eps;
  out["sigma"] = config.sigma;
  out["modes"] = res.truncation.modes;
  out["constants"] = {{"omega", res.constants.omega},
                      {"mu", res.constants.mu},
                      {"mu_threshold", res.constants.mu_threshold},
                      {"alpha", res.constants.alpha},
                      {"alpha_used", res.constants.alpha_used},
                      {"P", res.constants.majorant_p},
                      {"P_star", res.constants.majorant_p_star},
                      {"radius", res.constants.radius},
                      {"delta_step", res.constants.delta_step},
                      {"eps0", res.constants.eps0},
                      {"eps_star", res.constants.eps_star},
                      {"r_star", res.constants.r_star},
                      {"r_used", res.constants.r_used}};
  out["band_edges"] = res.bands.edges;
  out["truncated_by_degree"] = res.truncated_by_degree;
  out["z"] = poly_to_json(res.z);
  out["remainder"] = poly_to_json(res.r);
  json gens = json::array();
  for (const auto& g : res.generators) gens.push_back(poly_to_json(g));
  out["generators"] = gens;

  if (eps != 0.0) {
    DnlsModel model = extract_coefficients(ws.spectral, ws.basis, eps, config.sigma);
    json table = json::array();
    for (const auto& row : compare_k_with_model(res, model, ws.basis))
      table.push_back({{"name", row.name},
                       {"normal_form", row.from_normal_form},
                       {"reduction", row.from_reduction},
                       {"rel_dev", row.rel_dev}});
    out["k_comparison"] = table;
  }
  write_text(config.out_dir + "/normal_form.json", out.dump(2) + "\n");
  return 0;
}

int cmd_sweep(const ExperimentConfig& config) {
  std::string sub = config.sweep_subcommand.empty() ? "compare" : config.sweep_subcommand;
  std::vector<std::pair<std::string, std::vector<double>>> axes(config.sweep.begin(),
                                                                config.sweep.end());
  if (axes.empty()) throw std::invalid_argument("sweep: no parameter lists given");

  std::vector<std::map<std::string, double>> points{{}};
  for (const auto& [key, values] : axes) {
    std::vector<std::map<std::string, double>> next;
    for (const auto& base : points)
      for (double v : values) {
        auto p = base;
        p[key] = v;
        next.push_back(std::move(p));
      }
    points = std::move(next);
  }

  std::vector<ExperimentConfig> runs(points.size(), config);
  std::vector<std::string> tags(points.size());
  for (size_t i = 0; i < points.size(); ++i) {
    ExperimentConfig& run = runs[i];
    run.sweep.clear();
    run.threads = 1;
    char tag[32];
    std::snprintf(tag, sizeof(tag), "run_%04zu", i);
    tags[i] = tag;
    run.out_dir = config.out_dir + "/" + tags[i];
    for (const auto& [key, v] : points[i]) {
      if (key == "hbar") run.hbar = v;
      else if (key == "eta") run.eta = v;
      else if (key == "eps") run.eps = v;
      else if (key == "dt") run.dt = v;
      else if (key == "dtau") run.dtau = v;
      else if (key == "sigma") run.sigma = static_cast<int>(v);
      else if (key == "points") run.points = static_cast<int>(v);
      else throw std::invalid_argument("sweep: unsupported axis " + key);
    }
  }

  // runs are independent and write disjoint directories
  std::vector<int> codes(points.size(), 0);
  std::atomic<size_t> cursor{0};
  auto worker = [&]() {
    for (;;) {
      size_t i = cursor.fetch_add(1);
      if (i >= runs.size()) break;
      codes[i] = run_subcommand(sub, runs[i]);
    }
  };
  int workers = std::max(1, std::min<int>(config.threads, static_cast<int>(runs.size())));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (int rc : codes)
    if (rc != 0) return rc;

  json index = json::array();
  for (size_t i = 0; i < points.size(); ++i) {
    json entry;
    entry["dir"] = tags[i];
    for (const auto& [key, v] : points[i]) entry[key] = v;
    std::ifstream sin(runs[i].out_dir + "/summary.json");
    if (sin) {
      json s;
      sin >> s;
      entry["summary"] = s;
    }
    index.push_back(std::move(entry));
  }
  json out;
  out["schema"] = "gpelab-sweep-v1";
  out["config_digest"] = config.digest;
  out["subcommand"] = sub;
  out["runs"] = index;
  write_text(config.out_dir + "/index.json", out.dump(2) + "\n");
  return 0;
}

int cmd_acceptance(const ExperimentConfig& config) {
  std::vector<CriterionResult> results = run_acceptance(0, config.threads);
  bool all = true;
  json arr = json::array();
  for (const auto& r : results) {
    all = all && r.pass;
    std::printf("%s criterion %2d: %s (%.1fs) %s\n", r.pass ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.runtime_s, r.detail.c_str());
    arr.push_back({{"id", r.id},
                   {"name", r.name},
                   {"pass", r.pass},
                   {"runtime_s", r.runtime_s},
                   {"detail", r.detail}});
  }
  json out;
  out["schema"] = "gpelab-acceptance-v1";
  out["config_digest"] = config.digest;
  out["pass"] = all;
  out["criteria"] = arr;
  write_text(config.out_dir + "/acceptance.json", out.dump(2) + "\n");
  return all ? 0 : 3;
}

}  // namespace

int run_subcommand(const std::string& name, ExperimentConfig config) {
  try {
    if (name == "spectrum") return cmd_spectrum(config);
    if (name == "dnls-fit") return cmd_dnls_fit(config);
    if (name == "simulate-gpe") return cmd_simulate_gpe(config);
    if (name == "simulate-dnls") return cmd_simulate_dnls(config);
    if (name == "compare") return cmd_compare(config);
    if (name == "normal-form") return cmd_normal_form(config);
    if (name == "sweep") return cmd_sweep(config);
    if (name == "acceptance") return cmd_acceptance(config);
    throw std::invalid_argument("unknown subcommand: " + name);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  }
}

}  // namespace gpelab
