#pragma once

#include <complex>
#include <vector>

#include "gpelab/spectral.hpp"

namespace gpelab {

/// Reduced n-mode model extracted from the single-well frame.  `eta`, `delta`
/// and `lambda` are the coefficients of the reduced Hamiltonian
///   K0 = sum_j delta_j |psi_j|^2 + eta sum_j |psi_j|^(2 sigma + 2)
///        + sum_j lambda_j (conj(psi_{j+1}) psi_j + c.c.),
/// so the equations of motion carry the nonlinear coefficient
/// eta_eom = (sigma + 1) * eta.  Bond j couples sites j and j+1
/// (lambda[0] .. lambda[n-2]; the boundary bonds are absent, matching
/// psi_0 = psi_{n+1} = 0).
struct DnlsModel {
  int n = 2;
  int sigma = 2;
  double omega = 1.0;     // half-spread of the lowest n levels
  double Omega = 0.0;     // mean level
  double eps = 0.0;       // nonlinearity strength of the field equation
  double c = 0.0;         // on-site quadrature constant
  std::vector<double> nu;       // raw on-site detunings
  std::vector<double> c_bond;   // raw hopping integrals, size n-1
  std::vector<double> delta;    // nu / omega
  std::vector<double> lambda;   // c_bond / omega
  double eta = 0.0;             // eps * c / omega

  double eta_eom() const { return (sigma + 1) * eta; }

  /// Normalized chain with unit hopping and no detuning.  `eta_eom` is the
  /// nonlinear coefficient of the equations of motion, the axis on which the
  /// double-well bifurcation sits at +-2.
  static DnlsModel normalized(int n, double eta_eom, int sigma);
};

using DnlsState = std::vector<cplx>;

/// Coefficients of Lemma-style reduction: on-site and hopping matrix elements
/// of H0 in the raw single-well frame plus the on-site nonlinear constant.
DnlsModel extract_coefficients(const SpectralData& spectral, const WellBasis& basis, double eps,
                               int sigma);

double k0_energy(const DnlsModel& model, const DnlsState& state);
double dnls_invariant(const DnlsState& state);  // sum |psi_j|^2
DnlsState dnls_rhs(const DnlsModel& model, const DnlsState& state);

struct DnlsTrajectory {
  std::vector<double> tau;
  std::vector<DnlsState> states;
  std::vector<double> invariant;
  std::vector<double> k0;
  double max_invariant_drift = 0.0;
  double max_k0_drift = 0.0;
  double max_action_drift = 0.0;  // sup over time and sites of ||psi_j|^2 - |psi_j(0)|^2|
};

/// Implicit midpoint integration in rescaled time.  The update is written as
/// psi <- 2 M - psi with M the fixed point of the midpoint map, which keeps
/// the quadratic invariant exact up to rounding independently of the inner
/// tolerance.
DnlsTrajectory dnls_integrate(const DnlsModel& model, const DnlsState& state0, double tau_end,
                              double dtau, int record_stride = 1);

struct DnlsEquilibrium {
  double p = 0.0;      // |psi_1|^2 on the reduced sphere
  double alpha = 0.0;  // relative phase, 0 or pi
  double level = 0.0;  // reduced energy at the point
  bool stable = false;
  bool localized = false;  // away from the symmetric point
};

struct DoubleWellAnalysis {
  double eta = 0.0;  // equations-of-motion axis
  int sigma = 2;
  std::vector<DnlsEquilibrium> equilibria;
  bool bifurcated = false;
  double homoclinic_level = 0.0;  // eta/2 - 1 (eta > 2), 1 - eta/2 (eta < -2), NaN otherwise
  double saddle_level_measured = 0.0;  // NaN when no saddle
};

/// Phase portrait of the reduced two-site system on the unit sphere.  `eta`
/// is the nonlinear coefficient of the equations of motion.
DoubleWellAnalysis double_well_analysis(double eta, int sigma = 2);

enum class TrajectoryClass { Beating, SelfTrapped, NearHomoclinic, Inconclusive };
const char* to_string(TrajectoryClass c);

struct ClassifyOptions {
  double dtau = 1e-2;
  double trap_threshold = 0.75;
  double beat_level = 0.5;
  double homoclinic_tol = 1e-3;
};

TrajectoryClass classify_trajectory(const DnlsModel& model, const DnlsState& state0,
                                    double horizon, const ClassifyOptions& opt = {});

struct DriftStats {
  std::vector<double> drifts;  // per trajectory, in sampling order
  double median = 0.0;
  double q90 = 0.0;
};

/// Ensemble of trajectories drawn uniformly from the sphere slice
/// {sum |psi_j|^2 = 1, |psi_j| > rho}; reports per-trajectory sup action
/// drifts.  Deterministic for a fixed seed, independent of thread count.
DriftStats action_drift_stats(const DnlsModel& model, int ensemble, double rho, double horizon,
                              double dtau, unsigned long long seed, int threads = 1);

}  // namespace gpelab
