#pragma once

#include <vector>

#include "gpelab/dnls.hpp"
#include "gpelab/spectral.hpp"

namespace gpelab {

struct GpeRunConfig {
  double hbar = 0.2;
  double eps = 0.0;
  int sigma = 2;
  double dt = 0.0;
  double t_end = 0.0;
  int record_stride = 1;  // observables every stride steps
  int field_stride = 0;   // 0: no field snapshots
  enum class Method { EigenBasis, FourierSplit } method = Method::EigenBasis;
  int modes = 64;         // eigenbasis truncation
  int s = 1;              // norm index for the out-of-subspace record
  bool record_subspace_norms = true;  // picnorm/xs_full series (needs resolved tails)
  double tail_tol = 1e-4; // abort when truncation leakage passes this
};

/// mu = omega + |eps| / hbar^sigma, the validity parameter of the reduction.
double gpe_mu(const GpeRunConfig& cfg, double omega);

struct GpeObservables {
  double t = 0.0;
  double mass = 0.0;    // squared L2 norm
  double energy = 0.0;
  double x_mean = 0.0;
  double picnorm = 0.0;  // graph norm of the component outside the lowest n modes
  double xs_full = 0.0;  // graph norm of the full state
  std::vector<double> populations;  // |<phi_hat_j, psi>|^2, orthonormalized frame
  std::vector<cplx> well_amplitudes;  // <phi_hat_j, psi>, orthonormalized frame
};

struct GpeTrajectory {
  std::vector<GpeObservables> obs;
  std::vector<double> snapshot_t;
  std::vector<WaveField> snapshots;
};

GpeObservables observables(const SpectralData& spectral, const WellBasis& basis,
                           const WaveField& psi, int s, double eps, int sigma, double t = 0.0,
                           bool subspace_norms = true);

/// Strang splitting for i hbar psi_t = H0 psi + eps |psi|^(2 sigma) psi.
/// The nonlinear half-step is an exact pointwise phase; the linear step is
/// exact in the truncated eigenbasis (default) or a Fourier kinetic step.
GpeTrajectory gpe_integrate(const SpectralData& spectral, const WellBasis& basis,
                            const GpeRunConfig& cfg, const WaveField& psi0);

WaveField field_from_eigenmodes(const SpectralData& spectral, const std::vector<cplx>& coeffs);
/// Normalized single-well state (1-based index), orthonormalized frame.
WaveField field_from_well(const WellBasis& basis, int well);

}  // namespace gpelab
