#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

namespace gpelab {

using cplx = std::complex<double>;

/// Uniform symmetric grid on [-L, L).  Abscissas sit at cell midpoints,
/// x_i = -L + (i + 1/2) h with h = 2L/N, so the grid carries no point at 0
/// or at the walls and is exactly mirror-symmetric (index i <-> N-1-i).
struct Grid {
  double half_width = 0.0;
  int n = 0;
  double h = 0.0;
  std::vector<double> x;

  int mirror(int i) const { return n - 1 - i; }
};

inline Grid make_grid(double half_width, int n) {
  if (half_width <= 0.0) throw std::invalid_argument("grid: half_width must be positive");
  if (n < 256) throw std::invalid_argument("grid: need at least 256 points");
  Grid g;
  g.half_width = half_width;
  g.n = n;
  g.h = 2.0 * half_width / n;
  g.x.resize(n);
  for (int i = 0; i < n; ++i) g.x[i] = -half_width + (i + 0.5) * g.h;
  return g;
}

inline bool same_grid(const Grid& a, const Grid& b) {
  return a.n == b.n && a.half_width == b.half_width;
}

/// Complex field sampled on a grid.  The L2 structure is the rectangle rule,
/// which is spectrally accurate for fields decaying inside the box.
struct WaveField {
  Grid grid;
  std::vector<cplx> values;
};

inline WaveField make_field(const Grid& g) {
  WaveField f;
  f.grid = g;
  f.values.assign(g.n, cplx(0.0, 0.0));
  return f;
}

inline cplx inner(const Grid& g, const std::vector<cplx>& f, const std::vector<cplx>& w) {
  cplx s(0.0, 0.0);
  for (int i = 0; i < g.n; ++i) s += std::conj(f[i]) * w[i];
  return s * g.h;
}

inline double inner(const Grid& g, const std::vector<double>& f, const std::vector<double>& w) {
  double s = 0.0;
  for (int i = 0; i < g.n; ++i) s += f[i] * w[i];
  return s * g.h;
}

inline cplx inner(const Grid& g, const std::vector<double>& f, const std::vector<cplx>& w) {
  cplx s(0.0, 0.0);
  for (int i = 0; i < g.n; ++i) s += f[i] * w[i];
  return s * g.h;
}

inline double l2_norm(const Grid& g, const std::vector<cplx>& f) {
  double s = 0.0;
  for (const auto& v : f) s += std::norm(v);
  return std::sqrt(s * g.h);
}

inline double l2_norm(const Grid& g, const std::vector<double>& f) {
  double s = 0.0;
  for (double v : f) s += v * v;
  return std::sqrt(s * g.h);
}

inline void normalize_l2(const Grid& g, std::vector<cplx>& f) {
  double nrm = l2_norm(g, f);
  if (nrm == 0.0) throw std::runtime_error("normalize_l2: zero field");
  for (auto& v : f) v /= nrm;
}

inline void normalize_l2(const Grid& g, std::vector<double>& f) {
  double nrm = l2_norm(g, f);
  if (nrm == 0.0) throw std::runtime_error("normalize_l2: zero field");
  for (auto& v : f) v /= nrm;
}

}  // namespace gpelab
