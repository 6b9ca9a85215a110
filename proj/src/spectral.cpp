#include "gpelab/spectral.hpp"

#include <lapacke.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "gpelab/fft.hpp"

namespace gpelab {

namespace {

std::vector<double> sample_potential(const PotentialSpec& spec, const Grid& grid) {
  std::vector<double> v(grid.n);
  for (int i = 0; i < grid.n; ++i) v[i] = spec.value(grid.x[i]);
  return v;
}

void apply_fd(const Grid& g, const std::vector<double>& v, double hbar,
              const std::vector<double>& in, std::vector<double>& out) {
  const double w = hbar * hbar / (g.h * g.h);
  const int n = g.n;
  out.resize(n);
  for (int i = 0; i < n; ++i) {
    double lap = 2.0 * in[i];
    if (i > 0) lap -= in[i - 1];
    if (i + 1 < n) lap -= in[i + 1];
    out[i] = w * lap + v[i] * in[i];
  }
}

void apply_fourier(const Grid& g, const std::vector<double>& v, double hbar, Fft& fft,
                   const std::vector<double>& in, std::vector<double>& out,
                   std::vector<cplx>& buf) {
  const int n = g.n;
  buf.resize(n);
  for (int i = 0; i < n; ++i) buf[i] = in[i];
  fft.forward(buf.data());
  for (int j = 0; j < n; ++j) {
    double k = fft_wavenumber(j, n, g.half_width);
    buf[j] *= hbar * hbar * k * k;
  }
  fft.backward(buf.data());
  out.resize(n);
  for (int i = 0; i < n; ++i) out[i] = buf[i].real() + v[i] * in[i];
}

// LAPACK MRRR solver for the lowest `count` eigenpairs of the symmetric
// tridiagonal finite-difference discretization.
void solve_tridiagonal(const Grid& g, const std::vector<double>& v, double hbar, int count,
                       std::vector<double>& lam, std::vector<std::vector<double>>& vec) {
  const int n = g.n;
  const double w = hbar * hbar / (g.h * g.h);
  std::vector<double> d(n), e(n, -w);
  for (int i = 0; i < n; ++i) d[i] = 2.0 * w + v[i];

  std::vector<double> evals(n);
  std::vector<double> z(static_cast<size_t>(n) * count);
  std::vector<lapack_int> isuppz(2 * std::max(1, count));
  lapack_int m = 0;
  lapack_logical tryrac = 1;
  lapack_int info = LAPACKE_dstemr(LAPACK_COL_MAJOR, 'V', 'I', n, d.data(), e.data(), 0.0, 0.0,
                                   1, count, &m, evals.data(), z.data(), n, count,
                                   isuppz.data(), &tryrac);
  if (info != 0 || m != count)
    throw std::runtime_error("eigensolve: tridiagonal solver failed, info = " +
                             std::to_string(info));

  lam.assign(evals.begin(), evals.begin() + count);
  vec.assign(count, std::vector<double>(n));
  const double inv_sqrt_h = 1.0 / std::sqrt(g.h);
  for (int k = 0; k < count; ++k)
    for (int i = 0; i < n; ++i) vec[k][i] = z[static_cast<size_t>(k) * n + i] * inv_sqrt_h;
}

// Chebyshev-filtered subspace iteration on the Fourier operator, starting
// from the finite-difference eigenvectors.
void solve_fourier(const Grid& g, const std::vector<double>& v, double hbar, int count,
                   std::vector<double>& lam, std::vector<std::vector<double>>& vec) {
  const int n = g.n;
  const int pad = std::min(10, std::max(4, count / 2));
  const int m_sub = std::min(count + pad, n / 4 - 1);

  std::vector<double> fd_lam;
  std::vector<std::vector<double>> fd_vec;
  solve_tridiagonal(g, v, hbar, m_sub + 1, fd_lam, fd_vec);

  Eigen::MatrixXd X(n, m_sub);
  for (int k = 0; k < m_sub; ++k)
    for (int i = 0; i < n; ++i) X(i, k) = fd_vec[k][i];

  Fft fft(n);
  std::vector<cplx> cbuf;
  std::vector<double> in(n), out(n);
  auto apply_mat = [&](const Eigen::MatrixXd& a) {
    Eigen::MatrixXd r(n, a.cols());
    for (int k = 0; k < a.cols(); ++k) {
      for (int i = 0; i < n; ++i) in[i] = a(i, k);
      apply_fourier(g, v, hbar, fft, in, out, cbuf);
      for (int i = 0; i < n; ++i) r(i, k) = out[i];
    }
    return r;
  };

  const double kmax = 3.14159265358979323846 / g.h;
  const double vmax = *std::max_element(v.begin(), v.end());
  const double b_up = 1.01 * (hbar * hbar * kmax * kmax) + vmax + 1.0;
  // damp everything above the subspace: the boundary sits between the last
  // kept level and the next one (finite-difference estimates suffice)
  const double a_lo = 0.5 * (fd_lam[m_sub - 1] + fd_lam[m_sub]);
  const double want_gap = std::max(a_lo - fd_lam[count - 1], 1e-3);
  const int filter_degree =
      std::clamp(static_cast<int>(2.0 * std::sqrt((b_up - a_lo) / want_gap)), 40, 400);

  Eigen::VectorXd ritz = Eigen::Map<Eigen::VectorXd>(fd_lam.data(), m_sub);
  const double tol = 1e-10;
  bool converged = false;

  for (int iter = 0; iter < 40 && !converged; ++iter) {
    double lower = ritz(0);
    // scaled three-term Chebyshev recurrence damping [a_lo, b_up]
    double e_half = 0.5 * (b_up - a_lo);
    double c_mid = 0.5 * (b_up + a_lo);
    double sigma1 = e_half / (lower - c_mid);
    double sigma = sigma1;
    Eigen::MatrixXd Y = (apply_mat(X) - c_mid * X) * (sigma1 / e_half);
    for (int k = 2; k <= filter_degree; ++k) {
      double sigma_new = 1.0 / (2.0 / sigma1 - sigma);
      Eigen::MatrixXd Yn =
          (apply_mat(Y) - c_mid * Y) * (2.0 * sigma_new / e_half) - (sigma * sigma_new) * X;
      X = std::move(Y);
      Y = std::move(Yn);
      sigma = sigma_new;
    }
    // orthonormalize and Rayleigh-Ritz
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, m_sub);
    Eigen::MatrixXd HQ = apply_mat(Q);
    Eigen::MatrixXd S = Q.transpose() * HQ;
    S = 0.5 * (S + S.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    X = Q * es.eigenvectors();
    ritz = es.eigenvalues();

    Eigen::MatrixXd HX = HQ * es.eigenvectors();
    converged = true;
    for (int k = 0; k < count; ++k) {
      double res = (HX.col(k) - ritz(k) * X.col(k)).norm() * std::sqrt(g.h);
      if (res > tol * std::max(1.0, std::abs(ritz(k)))) converged = false;
    }
  }
  if (!converged)
    throw std::runtime_error("eigensolve: Fourier filter iteration did not converge");

  lam.resize(count);
  vec.assign(count, std::vector<double>(n));
  const double inv_sqrt_h = 1.0 / std::sqrt(g.h);
  for (int k = 0; k < count; ++k) {
    lam[k] = ritz(k);
    double col_norm = X.col(k).norm();
    for (int i = 0; i < n; ++i) vec[k][i] = X(i, k) / col_norm * inv_sqrt_h;
  }
}

// Fixes the overall sign so the lobe nearest the first well is positive.
void fix_sign(const Grid& g, double x1, std::vector<double>& f) {
  double peak = 0.0;
  for (double val : f) peak = std::max(peak, std::abs(val));
  if (peak == 0.0) return;
  int i1 = static_cast<int>(std::lround((x1 - g.x[0]) / g.h));
  i1 = std::clamp(i1, 0, g.n - 1);
  double probe = f[i1];
  if (std::abs(probe) < 1e-8 * peak) {
    for (int i = 0; i < g.n; ++i)
      if (std::abs(f[i]) > 1e-3 * peak) {
        probe = f[i];
        break;
      }
  }
  if (probe < 0.0)
    for (auto& val : f) val = -val;
}

SpectralData finish_solve(const Grid& grid, std::vector<double> v, double hbar, int count,
                          Discretization method, double well_anchor) {
  if (count < 1) throw std::invalid_argument("eigensolve: count must be positive");
  if (count > grid.n / 4)
    throw std::invalid_argument("eigensolve: requested count exceeds N/4");
  if (hbar <= 0.0) throw std::invalid_argument("eigensolve: hbar must be positive");

  SpectralData sd;
  sd.hbar = hbar;
  sd.grid = grid;
  sd.method = method;
  sd.v_samples = std::move(v);

  if (method == Discretization::FiniteDifference)
    solve_tridiagonal(grid, sd.v_samples, hbar, count, sd.eigenvalues, sd.eigenvectors);
  else
    solve_fourier(grid, sd.v_samples, hbar, count, sd.eigenvalues, sd.eigenvectors);

  for (int k = 0; k + 1 < count; ++k)
    if (!(sd.eigenvalues[k] < sd.eigenvalues[k + 1]))
      throw std::runtime_error("eigensolve: spectrum not strictly ascending");

  double v_edge = std::min(sd.v_samples.front(), sd.v_samples.back());
  if (sd.eigenvalues.back() > v_edge - 0.5)
    throw std::runtime_error(
        "eigensolve: potential at the box edge does not dominate the requested eigenvalues; "
        "enlarge the grid");

  for (auto& f : sd.eigenvectors) fix_sign(grid, well_anchor, f);

  sd.residuals.resize(count);
  std::vector<double> hf;
  for (int k = 0; k < count; ++k) {
    apply_h0(grid, sd.v_samples, hbar, method, sd.eigenvectors[k], hf);
    for (int i = 0; i < grid.n; ++i) hf[i] -= sd.eigenvalues[k] * sd.eigenvectors[k][i];
    sd.residuals[k] = l2_norm(grid, hf);
  }
  return sd;
}

}  // namespace

void apply_h0(const Grid& grid, const std::vector<double>& v, double hbar, Discretization method,
              const std::vector<double>& in, std::vector<double>& out) {
  if (method == Discretization::FiniteDifference) {
    apply_fd(grid, v, hbar, in, out);
  } else {
    Fft fft(grid.n);
    std::vector<cplx> buf;
    apply_fourier(grid, v, hbar, fft, in, out, buf);
  }
}

void apply_h0(const Grid& grid, const std::vector<double>& v, double hbar, Discretization method,
              const std::vector<cplx>& in, std::vector<cplx>& out) {
  const int n = grid.n;
  out.resize(n);
  if (method == Discretization::FiniteDifference) {
    const double w = hbar * hbar / (grid.h * grid.h);
    for (int i = 0; i < n; ++i) {
      cplx lap = 2.0 * in[i];
      if (i > 0) lap -= in[i - 1];
      if (i + 1 < n) lap -= in[i + 1];
      out[i] = w * lap + v[i] * in[i];
    }
  } else {
    Fft fft(n);
    std::vector<cplx> buf = in;
    fft.forward(buf.data());
    for (int j = 0; j < n; ++j) {
      double k = fft_wavenumber(j, n, grid.half_width);
      buf[j] *= hbar * hbar * k * k;
    }
    fft.backward(buf.data());
    for (int i = 0; i < n; ++i) out[i] = buf[i] + v[i] * in[i];
  }
}

double h0_matrix_element(const Grid& grid, const std::vector<double>& v, double hbar,
                         Discretization method, const std::vector<double>& f,
                         const std::vector<double>& g) {
  std::vector<double> hg;
  apply_h0(grid, v, hbar, method, g, hg);
  return inner(grid, f, hg);
}

SpectralData eigensolve(const PotentialSpec& spec, const Grid& grid, double hbar, int count,
                        Discretization method) {
  return finish_solve(grid, sample_potential(spec, grid), hbar, count, method,
                      spec.wells.empty() ? grid.x[grid.n / 4] : spec.wells.front());
}

SpectralData eigensolve_samples(const std::vector<double>& v, const Grid& grid, double hbar,
                                int count, Discretization method) {
  int imin = static_cast<int>(std::min_element(v.begin(), v.end()) - v.begin());
  return finish_solve(grid, v, hbar, count, method, grid.x[imin]);
}

SpectralData eigensolve_converged(const PotentialSpec& spec, double half_width, int start_n,
                                  double hbar, int count, Discretization method, double tol,
                                  int max_doublings) {
  SpectralData sd = eigensolve(spec, make_grid(half_width, start_n), hbar, count, method);
  for (int pass = 0; pass < max_doublings; ++pass) {
    SpectralData fine =
        eigensolve(spec, make_grid(half_width, sd.grid.n * 2), hbar, count, method);
    double shift = 0.0;
    for (int k = 0; k < count; ++k)
      shift = std::max(shift, std::abs(fine.eigenvalues[k] - sd.eigenvalues[k]));
    sd = std::move(fine);
    if (shift < tol) return sd;
  }
  throw std::runtime_error("eigensolve_converged: eigenvalues did not settle below tolerance");
}

SplittingResult splitting(const SpectralData& spectral, int wells) {
  if (wells < 1 || spectral.count() < wells)
    throw std::invalid_argument("splitting: need at least n eigenvalues");
  SplittingResult r;
  r.omega = 0.5 * (spectral.eigenvalues[wells - 1] - spectral.eigenvalues[0]);
  double s = 0.0;
  for (int j = 0; j < wells; ++j) s += spectral.eigenvalues[j];
  r.Omega = s / wells;
  return r;
}

ModeProjection project(const SpectralData& spectral, int wells, const WaveField& psi) {
  if (!same_grid(spectral.grid, psi.grid)) throw std::invalid_argument("project: grid mismatch");
  if (wells > spectral.count())
    throw std::invalid_argument("project: more wells than computed modes");
  const Grid& g = spectral.grid;
  ModeProjection out;
  out.zeta.resize(spectral.count());
  for (int k = 0; k < spectral.count(); ++k)
    out.zeta[k] = inner(g, spectral.eigenvectors[k], psi.values);
  out.inside = make_field(g);
  for (int k = 0; k < wells; ++k)
    for (int i = 0; i < g.n; ++i) out.inside.values[i] += out.zeta[k] * spectral.eigenvectors[k][i];
  out.outside = make_field(g);
  for (int i = 0; i < g.n; ++i) out.outside.values[i] = psi.values[i] - out.inside.values[i];
  return out;
}

double alt_norm_samples(const WaveField& psi, int s, double hbar, const std::vector<double>& v) {
  if (s < 0) throw std::invalid_argument("alt_norm: s must be nonnegative");
  const Grid& g = psi.grid;
  Fft fft(g.n);
  std::vector<cplx> buf = psi.values;
  fft.forward(buf.data());
  double kin = 0.0;
  for (int j = 0; j < g.n; ++j) {
    double k2 = hbar * hbar * std::pow(fft_wavenumber(j, g.n, g.half_width), 2);
    kin += std::pow(k2, s) * std::norm(buf[j]);
  }
  kin *= g.h / g.n;  // Parseval
  double pot = 0.0;
  for (int i = 0; i < g.n; ++i) pot += std::pow(v[i], s) * std::norm(psi.values[i]);
  pot *= g.h;
  return std::sqrt(kin + pot);
}

double alt_norm(const WaveField& psi, int s, double hbar, const PotentialSpec& spec) {
  std::vector<double> v(psi.grid.n);
  for (int i = 0; i < psi.grid.n; ++i) v[i] = spec.value(psi.grid.x[i]);
  return alt_norm_samples(psi, s, hbar, v);
}

double xs_norm(const SpectralData& spectral, const WaveField& psi, int s, double tail_rel) {
  if (s < 0) throw std::invalid_argument("xs_norm: s must be nonnegative");
  if (!same_grid(spectral.grid, psi.grid)) throw std::invalid_argument("xs_norm: grid mismatch");
  const Grid& g = spectral.grid;
  std::vector<cplx> tail = psi.values;
  double resolved = 0.0;
  for (int k = 0; k < spectral.count(); ++k) {
    cplx z = inner(g, spectral.eigenvectors[k], psi.values);
    resolved += std::pow(spectral.eigenvalues[k], s) * std::norm(z);
    for (int i = 0; i < g.n; ++i) tail[i] -= z * spectral.eigenvectors[k][i];
  }
  WaveField tf;
  tf.grid = g;
  tf.values = std::move(tail);
  double tail_norm = alt_norm_samples(tf, s, spectral.hbar, spectral.v_samples);
  if (tail_norm > tail_rel * std::sqrt(resolved) + 1e-11)
    throw std::runtime_error(
        "xs_norm: spectral tail beyond the computed modes is not resolved; increase the "
        "eigenpair count");
  return std::sqrt(resolved + tail_norm * tail_norm);
}

AlgebraCheck algebra_check(const std::vector<WaveField>& states, int s, double hbar,
                           const PotentialSpec& spec) {
  if (s < 1) throw std::invalid_argument("algebra_check: s >= 1 required");
  AlgebraCheck out;
  if (states.empty()) return out;
  std::vector<double> v(states[0].grid.n);
  for (int i = 0; i < states[0].grid.n; ++i) v[i] = spec.value(states[0].grid.x[i]);
  std::vector<double> norms(states.size());
  for (size_t i = 0; i < states.size(); ++i) norms[i] = alt_norm_samples(states[i], s, hbar, v);
  for (size_t i = 0; i < states.size(); ++i) {
    for (size_t j = i; j < states.size(); ++j) {
      if (norms[i] < 1e-14 || norms[j] < 1e-14) continue;  // degenerate pair, skipped
      WaveField prod;
      prod.grid = states[i].grid;
      prod.values.resize(prod.grid.n);
      for (int q = 0; q < prod.grid.n; ++q)
        prod.values[q] = states[i].values[q] * states[j].values[q];
      double r = alt_norm_samples(prod, s, hbar, v) * std::sqrt(hbar) / (norms[i] * norms[j]);
      out.ratios.push_back(r);
      out.max_ratio = std::max(out.max_ratio, r);
    }
  }
  return out;
}

WellBasis single_well_basis(const PotentialSpec& spec, const Grid& grid, double hbar,
                            double a_thr) {
  const int n = spec.well_count();
  WellBasis wb;
  wb.hbar = hbar;
  wb.a_thr = a_thr;
  wb.grid = grid;
  wb.lambda_hat.resize(n);
  wb.phi_hat.resize(n);

  for (int j = 1; j <= n; ++j) {
    std::vector<double> vj = modified_potential(spec, j, a_thr, grid);
    SpectralData sj = eigensolve_samples(vj, grid, hbar, 1, Discretization::FiniteDifference);
    wb.lambda_hat[j - 1] = sj.eigenvalues[0];
    wb.phi_hat[j - 1] = std::move(sj.eigenvectors[0]);
    fix_sign(grid, spec.wells[j - 1], wb.phi_hat[j - 1]);
  }

  // overlap decay diagnostic
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int q = 0; q < grid.n; ++q)
        wb.overlap_inf = std::max(wb.overlap_inf, std::abs(wb.phi_hat[i][q] * wb.phi_hat[j][q]));

  Eigen::MatrixXd S(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) S(i, j) = inner(grid, wb.phi_hat[i], wb.phi_hat[j]);
  wb.gram.assign(n, std::vector<double>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) wb.gram[i][j] = S(i, j);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> se(S);
  if (se.eigenvalues().minCoeff() < 1e-10)
    throw std::runtime_error(
        "single_well_basis: single-well states are nearly linearly dependent; overlap matrix "
        "ill conditioned");

  SpectralData full = eigensolve(spec, grid, hbar, n, Discretization::FiniteDifference);

  wb.c.assign(n, std::vector<double>(n));
  wb.eq8_residual.resize(n);
  Eigen::LDLT<Eigen::MatrixXd> solver(S);
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) b(i) = inner(grid, wb.phi_hat[i], full.eigenvectors[j]);
    Eigen::VectorXd cj = solver.solve(b);
    int dominant = 0;
    for (int i = 1; i < n; ++i)
      if (std::abs(cj(i)) > std::abs(cj(dominant))) dominant = i;
    if (cj(dominant) < 0.0) cj = -cj;  // column sign convention
    for (int i = 0; i < n; ++i) wb.c[i][j] = cj(i);
    std::vector<double> res = full.eigenvectors[j];
    for (int i = 0; i < n; ++i)
      for (int q = 0; q < grid.n; ++q) res[q] -= cj(i) * wb.phi_hat[i][q];
    wb.eq8_residual[j] = l2_norm(grid, res);
  }

  // symmetric orthonormalization; populations are read in this frame
  Eigen::MatrixXd inv_sqrt = se.operatorInverseSqrt();
  wb.phi_orth.assign(n, std::vector<double>(grid.n, 0.0));
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      double w = inv_sqrt(k, j);
      for (int q = 0; q < grid.n; ++q) wb.phi_orth[j][q] += w * wb.phi_hat[k][q];
    }
  return wb;
}

}  // namespace gpelab
