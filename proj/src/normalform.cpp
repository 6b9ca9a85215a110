#include "gpelab/normalform.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace gpelab {

BandDecomposition build_bands(const std::vector<double>& lambda, int u_count, double hbar) {
  if (lambda.empty()) throw std::invalid_argument("build_bands: empty spectrum");
  (void)hbar;
  const double lam_max = lambda.back();
  BandDecomposition bd;
  bd.min_gap = 1e300;

  auto dist_to_spectrum = [&](double e) {
    double d = 1e300;
    for (double l : lambda) d = std::min(d, std::abs(l - e));
    return d;
  };

  for (int gamma = 0;; ++gamma) {
    double lo = 2.0 * gamma, hi = 2.0 * gamma + 1.0;
    std::vector<double> candidates = {lo + 1e-9 * (hi - lo), hi - 1e-9 * (hi - lo),
                                      0.5 * (lo + hi)};
    for (size_t i = 0; i + 1 < lambda.size(); ++i) {
      double mid = 0.5 * (lambda[i] + lambda[i + 1]);
      if (mid > lo && mid < hi) candidates.push_back(mid);
    }
    double best = 0.0, best_gap = -1.0;
    for (double c : candidates) {
      double d = dist_to_spectrum(c);
      if (d > best_gap) {
        best_gap = d;
        best = c;
      }
    }
    if (best_gap <= 0.0)
      throw std::runtime_error("build_bands: no gap point found in window " +
                               std::to_string(gamma));
    bd.edges.push_back(best);
    bd.min_gap = std::min(bd.min_gap, best_gap);
    if (best > lam_max) break;
    if (gamma > 200) throw std::runtime_error("build_bands: runaway window count");
  }

  const int modes = static_cast<int>(lambda.size());
  bd.band_of.assign(modes, -1);
  bd.bands.assign(bd.edges.size(), {});
  for (int m = u_count; m < modes; ++m) {
    int gamma = -1;
    for (size_t e = 1; e < bd.edges.size(); ++e)
      if (lambda[m] > bd.edges[e - 1] && lambda[m] < bd.edges[e]) gamma = static_cast<int>(e);
    if (gamma < 0) throw std::runtime_error("build_bands: eigenvalue escaped all bands");
    bd.band_of[m] = gamma;
    bd.bands[gamma].push_back(m);
  }
  return bd;
}

double e_norm(const std::vector<cplx>& z_coeffs, int u_count, const BandDecomposition& bands,
              int s) {
  if (z_coeffs.size() != bands.band_of.size())
    throw std::invalid_argument("e_norm: coefficient count does not match the decomposition");
  double acc = 0.0;
  for (size_t m = u_count; m < z_coeffs.size(); ++m) {
    int gamma = bands.band_of[m];
    if (gamma < 0) throw std::invalid_argument("e_norm: uncovered mode index");
    acc += std::pow(bands.edges[gamma], s) * std::norm(z_coeffs[m]);
  }
  return acc;
}

double majorant_norm(const Poly<double>& p, double radius, double eps) {
  if (radius <= 0.0) throw std::invalid_argument("majorant_norm: radius must be positive");
  double acc = 0.0;
  for (const auto& [key, c] : p.terms) {
    int deg = total_degree_side(key.k, p.modes) + total_degree_side(key.l, p.modes);
    if (deg == 0) continue;
    double w = std::hypot(c.re, c.im) * std::pow(std::abs(eps), static_cast<double>(key.eps));
    acc += w * deg * std::pow(radius, deg - 1);
  }
  return acc;
}

namespace {

double majorant_value(const Poly<double>& p, double radius, double eps) {
  double acc = 0.0;
  for (const auto& [key, c] : p.terms) {
    int deg = total_degree_side(key.k, p.modes) + total_degree_side(key.l, p.modes);
    double w = std::hypot(c.re, c.im) * std::pow(std::abs(eps), static_cast<double>(key.eps));
    acc += w * std::pow(radius, deg);
  }
  return acc;
}

void multiset_rec(int modes, int start, int remaining, std::vector<int>& cur,
                  std::vector<std::vector<int>>& out) {
  if (remaining == 0) {
    out.push_back(cur);
    return;
  }
  for (int m = start; m < modes; ++m) {
    cur.push_back(m);
    multiset_rec(modes, m, remaining - 1, cur, out);
    cur.pop_back();
  }
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

Poly<double> project_nonlinearity(const SpectralData& spectral, int modes, int sigma) {
  if (modes > spectral.count())
    throw std::invalid_argument("project_nonlinearity: not enough computed modes");
  if (modes > kMaxModes)
    throw std::invalid_argument("project_nonlinearity: at most 16 modes supported");
  const Grid& g = spectral.grid;
  const int half = sigma + 1;

  std::vector<std::vector<int>> sets;
  std::vector<int> cur;
  multiset_rec(modes, 0, half, cur, sets);

  // pointwise products and multinomial weights per multiset
  std::vector<std::vector<double>> prods(sets.size(), std::vector<double>(g.n, 1.0));
  std::vector<double> weight(sets.size());
  std::vector<std::uint64_t> packed(sets.size(), 0);
  for (size_t s = 0; s < sets.size(); ++s) {
    std::vector<int> expv(modes, 0);
    for (int m : sets[s]) {
      ++expv[m];
      for (int i = 0; i < g.n; ++i) prods[s][i] *= spectral.eigenvectors[m][i];
    }
    double w = factorial(half);
    std::uint64_t pk = 0;
    for (int m = 0; m < modes; ++m) {
      w /= factorial(expv[m]);
      pk |= static_cast<std::uint64_t>(expv[m]) << (4 * m);
    }
    weight[s] = w;
    packed[s] = pk;
  }

  Poly<double> p;
  p.modes = modes;
  double peak = 0.0;
  std::vector<std::vector<double>> coef(sets.size(), std::vector<double>(sets.size()));
  for (size_t a = 0; a < sets.size(); ++a)
    for (size_t b = 0; b < sets.size(); ++b) {
      double integral = 0.0;
      for (int i = 0; i < g.n; ++i) integral += prods[a][i] * prods[b][i];
      integral *= g.h;
      double c = weight[a] * weight[b] * integral / half;
      coef[a][b] = c;
      peak = std::max(peak, std::abs(c));
    }
  for (size_t a = 0; a < sets.size(); ++a)
    for (size_t b = 0; b < sets.size(); ++b) {
      if (std::abs(coef[a][b]) < 1e-14 * peak) continue;
      MonoKey key;
      key.k = packed[a];
      key.l = packed[b];
      key.eps = 1;
      p.add(key, Cx<double>(coef[a][b], 0.0));
    }
  return p;
}

NormalFormResult normal_form(const SpectralData& spectral, int u_count, double eps, int sigma,
                             const NormalFormOptions& options) {
  if (u_count < 1 || options.modes <= u_count)
    throw std::invalid_argument("normal_form: need u_count < modes");
  if (options.degree_cap < 2 * sigma + 2)
    throw std::invalid_argument("normal_form: degree cap below the nonlinearity degree");

  NormalFormResult res;
  res.eps = eps;
  res.sigma = sigma;
  res.truncation.modes = options.modes;
  res.truncation.u_count = u_count;
  res.truncation.hbar = spectral.hbar;
  res.truncation.lambda.assign(spectral.eigenvalues.begin(),
                               spectral.eigenvalues.begin() + options.modes);
  double om = 0.0;
  for (int j = 0; j < u_count; ++j) om += res.truncation.lambda[j];
  res.truncation.Omega = om / u_count;

  res.bands = build_bands(res.truncation.lambda, u_count, spectral.hbar);

  const double omega =
      0.5 * (res.truncation.lambda[u_count - 1] - res.truncation.lambda[0]);
  const double mu = omega + std::abs(eps) / std::pow(spectral.hbar, sigma);
  const double mu_threshold = 0.5 * options.mu_star * std::pow(spectral.hbar, 1.5);
  res.constants.omega = omega;
  res.constants.mu = mu;
  res.constants.mu_threshold = mu_threshold;
  if (mu > mu_threshold)
    throw std::runtime_error("normal_form: mu = " + std::to_string(mu) +
                             " exceeds the admissible threshold " +
                             std::to_string(mu_threshold) +
                             "; reduce eps or increase hbar");

  // Perturbation: detuning of the distinguished block plus the projected
  // nonlinearity, both at formal order one (the detuning coefficient carries
  // the 1/eps, matching the splitting of the energy).
  Poly<double> p_eps;
  if (eps == 0.0) {
    // nothing to normalize; the detuning is the entire reduced Hamiltonian
    NormalFormState<double> st;
    st.truncation = res.truncation;
    st.band_of = res.bands.band_of;
    st.h0 = h0_poly(res.truncation);
    st.z.modes = options.modes;
    for (int j = 0; j < u_count; ++j) {
      MonoKey key;
      key.k = 1ULL << (4 * j);
      key.l = 1ULL << (4 * j);
      key.eps = 0;
      st.z.add(key, Cx<double>(res.truncation.lambda[j] - res.truncation.Omega, 0.0));
    }
    st.r.modes = options.modes;
    res.h0 = st.h0;
    res.z = st.z;
    res.r = st.r;
    res.constants.r_used = 0;
    return res;
  }

  p_eps.modes = options.modes;
  for (int j = 0; j < u_count; ++j) {
    MonoKey key;
    key.k = 1ULL << (4 * j);
    key.l = 1ULL << (4 * j);
    key.eps = 1;
    double d = (res.truncation.lambda[j] - res.truncation.Omega) / eps;
    if (d != 0.0) p_eps.add(key, Cx<double>(d, 0.0));
  }
  p_eps += project_nonlinearity(spectral, options.modes, sigma);

  // a-priori smallest divisor over the three admissible families
  double alpha = 1e300;
  const auto& lam = res.truncation.lambda;
  const double Om = res.truncation.Omega;
  for (int j = u_count; j < options.modes; ++j) {
    alpha = std::min(alpha, std::abs(lam[j] - Om));
    for (int l = j; l < options.modes; ++l)
      alpha = std::min(alpha, std::abs(lam[j] + lam[l] - 2.0 * Om));
    for (int l = u_count; l < options.modes; ++l)
      if (res.bands.band_of[j] != res.bands.band_of[l])
        alpha = std::min(alpha, std::abs(lam[j] - lam[l]));
  }
  res.constants.alpha = alpha;

  const double P = majorant_norm(p_eps, options.radius, eps) / std::abs(eps);
  const double P_star = majorant_value(p_eps, options.radius, eps) / std::abs(eps);
  res.constants.majorant_p = P;
  res.constants.majorant_p_star = P_star;
  res.constants.radius = options.radius;
  res.constants.eps_star = alpha * options.radius / (150.0 * std::exp(1.0) * P);
  res.constants.r_star = static_cast<int>(
      std::ceil(options.radius * alpha / (150.0 * std::exp(1.0) * P * std::abs(eps))));

  int r_used = options.order > 0
                   ? options.order
                   : std::clamp(res.constants.r_star, 1, options.max_order);
  res.constants.r_used = r_used;
  res.constants.delta_step = options.radius / (2.0 * std::max(1, r_used));
  res.constants.eps0 = alpha * res.constants.delta_step / (75.0 * P);

  NormalFormState<double> st;
  st.truncation = res.truncation;
  st.band_of = res.bands.band_of;
  st.h0 = h0_poly(res.truncation);
  st.degree_cap = options.degree_cap;
  st.eps_cap = r_used + 2;
  st.series_cap = options.series_cap > 0 ? options.series_cap : st.eps_cap;
  decompose(p_eps, u_count, st.band_of, st.r, st.z);

  const double scale = std::max(p_eps.max_magnitude(), 1.0);
  for (int step = 0; step < r_used; ++step) {
    lie_transform_step(st);
    st.z.prune(options.prune * scale);
    st.r.prune(options.prune * scale);
  }
  res.constants.alpha_used = st.min_divisor;

  res.h0 = std::move(st.h0);
  res.z = std::move(st.z);
  res.r = std::move(st.r);
  res.generators = std::move(st.generators);
  res.truncated_by_degree = st.truncated_by_degree;
  return res;
}

Poly<double> k_restriction(const NormalFormResult& result) {
  Poly<double> k;
  k.modes = result.truncation.u_count;
  const int modes = result.z.modes;
  const int nu = result.truncation.u_count;
  for (const auto& [key, c] : result.z.terms) {
    bool pure_u = true;
    for (int m = nu; m < modes; ++m)
      if (exp_of(key.k, m) != 0 || exp_of(key.l, m) != 0) pure_u = false;
    if (!pure_u) continue;
    double w = std::pow(result.eps, static_cast<double>(key.eps)) / result.constants.omega;
    MonoKey nk;
    nk.k = key.k & ((nu >= 16) ? ~0ULL : ((1ULL << (4 * nu)) - 1));
    nk.l = key.l & ((nu >= 16) ? ~0ULL : ((1ULL << (4 * nu)) - 1));
    nk.eps = 0;
    k.add(nk, c.scaled(w));
  }
  return k;
}

namespace {

// expands a pure-u polynomial under the substitution u_k = sum_j m[j][k] w_j
Poly<double> substitute_linear(const Poly<double>& p, const std::vector<std::vector<double>>& m) {
  const int n = p.modes;
  Poly<double> out;
  out.modes = n;
  for (const auto& [key, c] : p.terms) {
    // start from the constant and multiply factor by factor
    std::unordered_map<MonoKey, Cx<double>, MonoKeyHash> acc;
    MonoKey unit;
    acc.emplace(unit, c);
    auto multiply_var = [&](int mode, bool conjugated) {
      std::unordered_map<MonoKey, Cx<double>, MonoKeyHash> next;
      for (const auto& [k0, c0] : acc) {
        for (int j = 0; j < n; ++j) {
          double w = m[j][mode];
          if (w == 0.0) continue;
          MonoKey nk = k0;
          if (conjugated)
            nk.l += 1ULL << (4 * j);
          else
            nk.k += 1ULL << (4 * j);
          auto it = next.find(nk);
          Cx<double> add = c0.scaled(w);
          if (it == next.end())
            next.emplace(nk, add);
          else
            it->second += add;
        }
      }
      acc = std::move(next);
    };
    for (int mode = 0; mode < n; ++mode) {
      for (int q = 0; q < exp_of(key.k, mode); ++q) multiply_var(mode, false);
      for (int q = 0; q < exp_of(key.l, mode); ++q) multiply_var(mode, true);
    }
    for (const auto& [nk, nc] : acc) out.add(nk, nc);
  }
  return out;
}

}  // namespace

std::vector<CoefficientComparison> compare_k_with_model(const NormalFormResult& result,
                                                        const DnlsModel& model,
                                                        const WellBasis& basis) {
  const int n = result.truncation.u_count;
  if (model.n != n || basis.wells() != n)
    throw std::invalid_argument("compare_k_with_model: block sizes disagree");

  Poly<double> k = k_restriction(result);
  Poly<double> kw = substitute_linear(k, basis.c);

  auto coeff_at = [&](std::uint64_t kk, std::uint64_t ll) {
    MonoKey key;
    key.k = kk;
    key.l = ll;
    key.eps = 0;
    auto it = kw.terms.find(key);
    return it == kw.terms.end() ? 0.0 : it->second.re;
  };

  std::vector<CoefficientComparison> rows;
  auto push = [&rows](std::string name, double a, double b) {
    CoefficientComparison r;
    r.name = std::move(name);
    r.from_normal_form = a;
    r.from_reduction = b;
    r.rel_dev = std::abs(a - b) / std::max(std::abs(b), 1e-300);
    rows.push_back(std::move(r));
  };

  for (int j = 0; j + 1 < n; ++j)
    push("lambda_" + std::to_string(j + 1),
         coeff_at(1ULL << (4 * j), 1ULL << (4 * (j + 1))), model.lambda[j]);
  for (int j = 0; j < n; ++j)
    push("delta_" + std::to_string(j + 1),
         coeff_at(1ULL << (4 * j), 1ULL << (4 * j)), model.delta[j]);
  int e = model.sigma + 1;
  for (int j = 0; j < n; ++j)
    push("eta_site_" + std::to_string(j + 1),
         coeff_at(static_cast<std::uint64_t>(e) << (4 * j),
                  static_cast<std::uint64_t>(e) << (4 * j)),
         model.eta);
  return rows;
}

std::vector<cplx> apply_transform(const NormalFormResult& result, std::vector<cplx> zeta,
                                  bool inverse) {
  if (static_cast<int>(zeta.size()) != result.truncation.modes)
    throw std::invalid_argument("apply_transform: coordinate count mismatch");
  const int modes = result.truncation.modes;
  const int rk_steps = 64;

  auto flow_of = [&](const Poly<double>& gen, double time, std::vector<cplx>& pt) {
    std::vector<Cx<double>> z(modes);
    for (int m = 0; m < modes; ++m) z[m] = Cx<double>(pt[m].real(), pt[m].imag());
    auto rhs = [&](const std::vector<Cx<double>>& q) {
      auto grad = gradient_zbar(gen, q, result.eps);
      std::vector<Cx<double>> v(modes);
      for (int m = 0; m < modes; ++m) v[m] = Cx<double>(grad[m].im, -grad[m].re);  // -i grad
      return v;
    };
    double h = time / rk_steps;
    for (int s = 0; s < rk_steps; ++s) {
      auto k1 = rhs(z);
      std::vector<Cx<double>> tmp(modes);
      for (int m = 0; m < modes; ++m) tmp[m] = z[m] + k1[m].scaled(0.5 * h);
      auto k2 = rhs(tmp);
      for (int m = 0; m < modes; ++m) tmp[m] = z[m] + k2[m].scaled(0.5 * h);
      auto k3 = rhs(tmp);
      for (int m = 0; m < modes; ++m) tmp[m] = z[m] + k3[m].scaled(h);
      auto k4 = rhs(tmp);
      for (int m = 0; m < modes; ++m)
        z[m] += (k1[m] + k2[m].scaled(2.0) + k3[m].scaled(2.0) + k4[m]).scaled(h / 6.0);
    }
    for (int m = 0; m < modes; ++m) pt[m] = cplx(z[m].re, z[m].im);
  };

  if (!inverse) {
    for (auto it = result.generators.rbegin(); it != result.generators.rend(); ++it)
      flow_of(*it, 1.0, zeta);
  } else {
    for (const auto& gen : result.generators) flow_of(gen, -1.0, zeta);
  }
  return zeta;
}

DivisorRatioReport small_divisor_bound_check(const std::vector<std::vector<double>>& f,
                                             const std::vector<double>& lambda, int u_count,
                                             const BandDecomposition& bands) {
  const int nz = static_cast<int>(f.size());
  if (u_count + nz != static_cast<int>(lambda.size()))
    throw std::invalid_argument("small_divisor_bound_check: dimensions disagree");
  Eigen::MatrixXd F(nz, nz), G(nz, nz);
  for (int a = 0; a < nz; ++a)
    for (int b = 0; b < nz; ++b) {
      double v = f[a][b];
      int ga = bands.band_of[u_count + a], gb = bands.band_of[u_count + b];
      if (ga == gb && v != 0.0)
        throw std::invalid_argument(
            "small_divisor_bound_check: nonzero entry inside a band at (" + std::to_string(a) +
            "," + std::to_string(b) + ")");
      F(a, b) = v;
      G(a, b) = (v == 0.0) ? 0.0 : v / (lambda[u_count + b] - lambda[u_count + a]);
    }
  DivisorRatioReport rep;
  rep.norm_f = F.jacobiSvd().singularValues()(0);
  rep.norm_g = G.jacobiSvd().singularValues()(0);
  rep.ratio = rep.norm_f == 0.0 ? 0.0 : rep.norm_g / rep.norm_f;
  return rep;
}

}  // namespace gpelab
