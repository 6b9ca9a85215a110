#pragma once

#include <optional>

#include "gpelab/gpe.hpp"
#include "gpelab/normalform.hpp"

namespace gpelab {

struct ComparisonReport {
  double hbar = 0.0, omega = 0.0, Omega = 0.0;  // conversion between the clocks
  double sup_discrepancy = 0.0;  // sup_t max_j |p_j(t) - |psi_j(tau(t))|^2|
  double l2_discrepancy = 0.0;
  std::vector<double> t;
  std::vector<std::vector<double>> field_populations;    // from the field run
  std::vector<std::vector<double>> reduced_populations;  // reduced model at tau = omega t / hbar
};

/// Aligns a field trajectory with a reduced-model trajectory through
/// tau = omega t / hbar and compares well populations.  The reduced run must
/// have been started from the projected initial data.
ComparisonReport compare_gpe_dnls(const GpeTrajectory& gpe, const DnlsTrajectory& dnls,
                                  const WellBasis& basis, const DnlsModel& model, double hbar);

struct DriftReport {
  double invariant_drift = 0.0;  // max |I(t) - I(0)|
  double k0_drift = 0.0;         // max |K0(t) - K0(0)|
  double mu = 0.0;
  double mu_scaled = 0.0;  // mu / hbar^(3/2)
  double fitted_c_invariant = 0.0;
  double fitted_c_k0 = 0.0;
  double window = 0.0;       // covered physical time
  double time_budget = 0.0;  // 1 / (C hbar mu delta) with the fitted constant
  double window_fraction = 0.0;
};

/// Monitors the reduced invariants along a field run; both are Gauge
/// invariant so no phase conversion is needed.
DriftReport drift_report(const GpeTrajectory& gpe, const DnlsModel& model, double hbar,
                         double eps, int sigma, double mu_star = 1.0);

struct ManifoldDistance {
  double picnorm = 0.0;
  std::optional<double> d_manifold;
  bool descent_converged = true;
};

/// Graph-norm size of the out-of-block component, plus (when the truncated
/// transformation is available) the distance to its image of the block,
/// minimized by local descent from the projection.
ManifoldDistance manifold_distance(const WaveField& psi, const SpectralData& spectral, int wells,
                                   int s, const NormalFormResult* transform = nullptr);

struct BeatingReport {
  bool conclusive = false;
  bool is_beating = false;
  double period = 0.0;
  double amplitude = 0.0;
  int sign_changes = 0;
};

/// Period and amplitude of a position-expectation series from interpolated
/// zero crossings.  `expected_period` guards against windows shorter than two
/// periods; `noise_floor` is the minimal amplitude that counts as motion.
BeatingReport beating_detector(const std::vector<double>& t, const std::vector<double>& x,
                               double expected_period = 0.0, double noise_floor = 1e-6);

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // rms in the fitted coordinates
};

FitResult fit_loglog(const std::vector<double>& x, const std::vector<double>& y);
FitResult fit_semilog(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace gpelab
