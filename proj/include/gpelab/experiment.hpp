#pragma once

#include <map>
#include <optional>
#include <string>

#include "gpelab/diagnostics.hpp"

namespace gpelab {

/// Parsed run configuration (schema "gpelab-config-v1").  All randomness in a
/// run derives from `seed`; outputs embed `digest` for provenance.
struct ExperimentConfig {
  unsigned long long seed = 12345;
  int threads = 1;

  PotentialSpec potential = make_double_well(1.0, 1.0);
  double half_width = 8.0;
  int points = 1024;
  std::string discretization = "fourier";  // or "fd"

  double hbar = 0.2;
  double eps = 0.0;
  std::optional<double> eta;  // equations-of-motion axis; overrides eps when set
  int sigma = 2;
  int s = 1;

  // time stepping; zeros are replaced by beat-period defaults
  double dt = 0.0;
  double t_end = 0.0;
  double dtau = 0.0;
  double tau_end = 0.0;
  int record_stride = 1;
  int field_stride = 0;
  std::string gpe_method = "eigenbasis";  // or "fourier"
  int modes = 64;

  std::string initial_type = "well";  // well | mode | doublet
  int initial_index = 2;

  // ensembles
  int ensemble = 100;
  double rho = 0.2;

  NormalFormOptions nf;

  std::map<std::string, std::vector<double>> sweep;
  std::string sweep_subcommand;

  std::string out_dir = "out";
  std::string digest;
  std::string canonical;  // canonical JSON the digest was taken over
};

ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string config_digest(const std::string& canonical_json);

/// Runs one CLI subcommand; writes artifacts under out_dir and returns the
/// process exit code (0 ok, 1 config, 2 numerical, 3 acceptance).
int run_subcommand(const std::string& name, ExperimentConfig config);

// building blocks shared by subcommands and the acceptance suite
struct Workspace {
  Grid grid;
  SpectralData spectral;
  WellBasis basis;
  SplittingResult split;
  double beat_period = 0.0;  // pi hbar / omega
};

Workspace make_workspace(const ExperimentConfig& config, int eigen_count);

/// eps realizing a requested equations-of-motion eta for the workspace.
double eps_for_eta(const Workspace& ws, const ExperimentConfig& config, double eta_eom);

WaveField initial_state(const Workspace& ws, const ExperimentConfig& config);

void write_text(const std::string& path, const std::string& text);

}  // namespace gpelab
