#pragma once

#include <vector>

#include "gpelab/grid.hpp"
#include "gpelab/potential.hpp"

namespace gpelab {

enum class Discretization { FiniteDifference, Fourier };

/// Eigenpairs of the semiclassical operator -hbar^2 d^2/dx^2 + V on a grid.
/// Eigenvectors are real, L2-normalized and strictly ordered.
struct SpectralData {
  double hbar = 0.0;
  Grid grid;
  Discretization method = Discretization::FiniteDifference;
  std::vector<double> eigenvalues;
  std::vector<std::vector<double>> eigenvectors;
  std::vector<double> residuals;
  std::vector<double> v_samples;

  int count() const { return static_cast<int>(eigenvalues.size()); }
};

SpectralData eigensolve(const PotentialSpec& spec, const Grid& grid, double hbar, int count,
                        Discretization method = Discretization::FiniteDifference);

/// Same solver on an explicitly tabulated potential (used for the single-well
/// operators H_j).
SpectralData eigensolve_samples(const std::vector<double>& v, const Grid& grid, double hbar,
                                int count,
                                Discretization method = Discretization::FiniteDifference);

/// Doubles the grid until the requested eigenvalues move by less than tol.
SpectralData eigensolve_converged(const PotentialSpec& spec, double half_width, int start_n,
                                  double hbar, int count, Discretization method,
                                  double tol = 1e-8, int max_doublings = 4);

/// Applies -hbar^2 d^2/dx^2 + v to a sampled field, with the discretization
/// matching how the eigenpairs were produced.
void apply_h0(const Grid& grid, const std::vector<double>& v, double hbar, Discretization method,
              const std::vector<cplx>& in, std::vector<cplx>& out);
void apply_h0(const Grid& grid, const std::vector<double>& v, double hbar, Discretization method,
              const std::vector<double>& in, std::vector<double>& out);

/// <f, H0 g> with the given discretization (f, g real).
double h0_matrix_element(const Grid& grid, const std::vector<double>& v, double hbar,
                         Discretization method, const std::vector<double>& f,
                         const std::vector<double>& g);

struct SplittingResult {
  double omega = 0.0;  // (lambda_n - lambda_1)/2
  double Omega = 0.0;  // mean of the lowest n eigenvalues
};
SplittingResult splitting(const SpectralData& spectral, int wells);

/// Ground states of the single-well operators H_j plus the change-of-basis
/// diagnostics of the semiclassical construction.
struct WellBasis {
  double hbar = 0.0;
  double a_thr = 0.0;
  Grid grid;
  std::vector<double> lambda_hat;
  std::vector<std::vector<double>> phi_hat;   // raw single-well ground states
  std::vector<std::vector<double>> phi_orth;  // symmetrically orthonormalized
  std::vector<std::vector<double>> c;         // c[k][j]: phi_j ~ sum_k c_kj phi_hat_k
  std::vector<double> eq8_residual;           // per eigenvector
  std::vector<std::vector<double>> gram;      // <phi_hat_i, phi_hat_j>
  double overlap_inf = 0.0;                   // max_{i != j} ||phi_hat_i phi_hat_j||_inf

  int wells() const { return static_cast<int>(lambda_hat.size()); }
};

WellBasis single_well_basis(const PotentialSpec& spec, const Grid& grid, double hbar,
                            double a_thr);

struct ModeProjection {
  WaveField inside;    // Pi psi (lowest n modes)
  WaveField outside;   // psi - Pi psi
  std::vector<cplx> zeta;  // coefficients on all computed modes
};

ModeProjection project(const SpectralData& spectral, int wells, const WaveField& psi);

/// Graph norm of H0^(s/2) computed through the resolved eigenmodes; the
/// unresolved remainder is bounded by the multiplier norm, folded into the
/// result, and must stay below tail_rel of the resolved part.
double xs_norm(const SpectralData& spectral, const WaveField& psi, int s,
               double tail_rel = 1e-8);

/// The equivalent norm (|(-hbar^2 Lap)^(s/2) psi|^2 + |V^(s/2) psi|^2)^(1/2),
/// fractional Laplacian applied as a Fourier multiplier.
double alt_norm(const WaveField& psi, int s, double hbar, const PotentialSpec& spec);
double alt_norm_samples(const WaveField& psi, int s, double hbar, const std::vector<double>& v);

struct AlgebraCheck {
  double max_ratio = 0.0;
  std::vector<double> ratios;  // per pair: |fg|_s hbar^(1/2) / (|f|_s |g|_s)
};

/// Measures the constant in the product inequality over all pairs from the
/// sample set, in the multiplier norm.
AlgebraCheck algebra_check(const std::vector<WaveField>& states, int s, double hbar,
                           const PotentialSpec& spec);

}  // namespace gpelab
