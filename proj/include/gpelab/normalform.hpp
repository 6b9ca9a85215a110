#pragma once

#include <optional>

#include "gpelab/dnls.hpp"
#include "gpelab/polyham.hpp"
#include "gpelab/spectral.hpp"

namespace gpelab {

/// Galerkin truncation: the first `u_count` modes are the distinguished block,
/// the remaining `modes - u_count` are the high modes the construction pushes
/// the coupling out of.
template <class F>
struct ModeTruncation {
  int modes = 0;
  int u_count = 0;
  double hbar = 0.0;
  std::vector<F> lambda;
  F Omega{};
};

struct BandDecomposition {
  std::vector<double> edges;            // E_0 < E_1 < ... bracketing the high spectrum
  std::vector<int> band_of;             // per mode; -1 for the distinguished block
  std::vector<std::vector<int>> bands;  // mode indices per band (may be empty)
  double min_gap = 0.0;                 // min distance of any eigenvalue to any edge
};

/// Picks one gap point per window (2 gamma, 2 gamma + 1) maximizing the
/// distance to the spectrum, then buckets the high modes between consecutive
/// edges.
BandDecomposition build_bands(const std::vector<double>& lambda, int u_count, double hbar);

enum class MonomialClass { Coupling, NonCoupling };

template <class F>
MonomialClass classify_monomial(const MonoKey& key, int modes, int u_count,
                                const std::vector<int>& band_of) {
  if (total_degree_side(key.k, modes) != total_degree_side(key.l, modes))
    throw std::invalid_argument("classify_monomial: monomial is not Gauge invariant");
  int zm = 0, zn = 0, zi = -1, zj = -1;
  for (int m = u_count; m < modes; ++m) {
    int km = exp_of(key.k, m), lm = exp_of(key.l, m);
    if (km > 0) {
      zm += km;
      zi = m;
    }
    if (lm > 0) {
      zn += lm;
      zj = m;
    }
  }
  int t = zm + zn;
  if (t != 1 && t != 2) return MonomialClass::NonCoupling;
  if (zm == 1 && zn == 1)
    return band_of[zi] != band_of[zj] ? MonomialClass::Coupling : MonomialClass::NonCoupling;
  return MonomialClass::Coupling;
}

template <class F>
void decompose(const Poly<F>& h, int u_count, const std::vector<int>& band_of, Poly<F>& coupling,
               Poly<F>& noncoupling) {
  coupling = Poly<F>{};
  noncoupling = Poly<F>{};
  coupling.modes = noncoupling.modes = h.modes;
  for (const auto& [key, c] : h.terms) {
    if (classify_monomial<F>(key, h.modes, u_count, band_of) == MonomialClass::Coupling)
      coupling.terms.emplace(key, c);
    else
      noncoupling.terms.emplace(key, c);
  }
}

/// H0 = Omega |u|^2 + sum_j lambda_j |z_j|^2 as a polynomial.
template <class F>
Poly<F> h0_poly(const ModeTruncation<F>& tr) {
  Poly<F> p;
  p.modes = tr.modes;
  for (int m = 0; m < tr.modes; ++m) {
    MonoKey key;
    key.k = 1ULL << (4 * m);
    key.l = 1ULL << (4 * m);
    key.eps = 0;
    p.add(key, Cx<F>(m < tr.u_count ? tr.Omega : tr.lambda[m]));
  }
  return p;
}

/// sum_j |zeta_j|^2 as a polynomial (the Gauge generator).
template <class F>
Poly<F> number_poly(int modes) {
  Poly<F> p;
  p.modes = modes;
  for (int m = 0; m < modes; ++m) {
    MonoKey key;
    key.k = 1ULL << (4 * m);
    key.l = 1ULL << (4 * m);
    p.add(key, Cx<F>(F(1)));
  }
  return p;
}

/// Weighted high-mode quadratic sum_j w_j |z_j|^2 (the band norm as a
/// polynomial; pass w_j = E_gamma^s).
template <class F>
Poly<F> weighted_z_poly(int modes, int u_count, const std::vector<F>& weights) {
  Poly<F> p;
  p.modes = modes;
  for (int m = u_count; m < modes; ++m) {
    MonoKey key;
    key.k = 1ULL << (4 * m);
    key.l = 1ULL << (4 * m);
    p.add(key, Cx<F>(weights[m]));
  }
  return p;
}

/// Numeric band norm of high-mode coefficients.
double e_norm(const std::vector<cplx>& z_coeffs, int u_count, const BandDecomposition& bands,
              int s);

/// Solves {H0, G} = sign * F monomial-wise: division by i * sum lambda~ (K-L)
/// with lambda~ = Omega on the distinguished block.  F must be coupling;
/// a vanishing divisor reports the modes involved.
template <class F>
Poly<F> solve_homological(const Poly<F>& f, const ModeTruncation<F>& tr,
                          const std::vector<int>& band_of, int sign = 1,
                          double* min_divisor = nullptr) {
  Poly<F> g;
  g.modes = f.modes;
  for (const auto& [key, c] : f.terms) {
    if (classify_monomial<F>(key, f.modes, tr.u_count, band_of) != MonomialClass::Coupling)
      throw std::invalid_argument("solve_homological: input has noncoupling content");
    F div(0);
    for (int m = 0; m < f.modes; ++m) {
      int w = exp_of(key.k, m) - exp_of(key.l, m);
      if (w == 0) continue;
      const F& lam = (m < tr.u_count) ? tr.Omega : tr.lambda[m];
      div += lam * F(w);
    }
    if (div == F(0)) {
      std::string what = "solve_homological: zero divisor on monomial with z-exponents (";
      for (int m = tr.u_count; m < f.modes; ++m) {
        what += std::to_string(exp_of(key.k, m)) + "/" + std::to_string(exp_of(key.l, m));
        if (m + 1 < f.modes) what += " ";
      }
      throw std::runtime_error(what + ")");
    }
    if (min_divisor) {
      double ad = std::abs(FieldOps<F>::to_double(div));
      if (*min_divisor == 0.0 || ad < *min_divisor) *min_divisor = ad;
    }
    Cx<F> val = c.div_i(div);
    if (sign < 0) val = -val;
    g.terms.emplace(key, val);
  }
  return g;
}

/// Coefficient-sum majorant for the vector field on the ball of radius R:
/// sum |c| |eps|^tag * degree * R^(degree-1).  Monotone in R and subadditive.
double majorant_norm(const Poly<double>& p, double radius, double eps);

template <class F>
struct NormalFormState {
  ModeTruncation<F> truncation;
  std::vector<int> band_of;
  Poly<F> h0;
  Poly<F> z;  // noncoupling part, formal eps tags
  Poly<F> r;  // remainder; coupling content only at tags > order
  std::vector<Poly<F>> generators;
  std::vector<Poly<F>> removed;  // F_s with {H0, G_s} = -F_s
  int order = 0;
  int degree_cap = 8;
  int eps_cap = 6;
  int series_cap = 6;
  bool truncated_by_degree = false;
  double min_divisor = 0.0;
};

/// One step of the iteration: removes the coupling content at eps order
/// `state.order + 1` and composes with the generator flow as a truncated Lie
/// series.  Tags above eps_cap are the certified higher-order remainder.
template <class F>
void lie_transform_step(NormalFormState<F>& state) {
  const int s = state.order + 1;
  Poly<F> coupling, noncoupling;
  decompose(state.r, state.truncation.u_count, state.band_of, coupling, noncoupling);

  Poly<F> f_s;
  f_s.modes = state.r.modes;
  for (const auto& [key, c] : coupling.terms)
    if (key.eps == static_cast<std::uint32_t>(s)) f_s.terms.emplace(key, c);
    else if (key.eps < static_cast<std::uint32_t>(s))
      throw std::logic_error("lie_transform_step: stale low-order coupling survived");

  Poly<F> g = solve_homological(f_s, state.truncation, state.band_of, -1, &state.min_divisor);

  auto compose = [&](const Poly<F>& h) {
    Poly<F> acc = h;
    Poly<F> tower = h;
    F factorial(1);
    for (int k = 1; k <= state.series_cap; ++k) {
      tower = poisson_bracket(tower, g, state.degree_cap, state.eps_cap,
                              &state.truncated_by_degree);
      if (tower.empty()) break;
      factorial = factorial * F(k);
      acc += tower.scaled(F(1) / factorial);
      if (k == state.series_cap) {
        Poly<F> probe = poisson_bracket(tower, g, state.degree_cap, state.eps_cap, nullptr);
        if (!probe.empty())
          throw std::runtime_error(
              "lie_transform_step: series cap too small to certify the order; increase it");
      }
    }
    return acc;
  };

  Poly<F> new_h0 = compose(state.h0);
  Poly<F> pool = compose(state.z);
  pool += compose(state.r);
  // the diagonal part stays; everything the flow created moves to the pool
  for (const auto& [key, c] : state.h0.terms) pool.add(key, -c);
  pool += new_h0;

  Poly<F> pc, pz;
  decompose(pool, state.truncation.u_count, state.band_of, pc, pz);
  // coupling at orders <= s must now cancel exactly; floating leftovers from
  // the division/multiplication round trip are pruned against the input scale
  double scale = f_s.max_magnitude();
  for (auto it = pc.terms.begin(); it != pc.terms.end();) {
    if (it->first.eps <= static_cast<std::uint32_t>(s)) {
      if (FieldOps<F>::magnitude(it->second) > 1e-10 * std::max(scale, 1.0))
        throw std::logic_error("lie_transform_step: coupling content failed to cancel");
      it = pc.terms.erase(it);
    } else {
      ++it;
    }
  }
  state.z = pz;
  state.r = pc;
  state.generators.push_back(std::move(g));
  state.removed.push_back(f_s.negated());  // {H0, G_s} equals this
  state.order = s;
}

struct NormalFormConstants {
  double omega = 0.0;
  double mu = 0.0;
  double mu_threshold = 0.0;
  double alpha = 0.0;        // smallest admissible divisor over the truncation
  double alpha_used = 0.0;   // smallest divisor met by the solver
  double majorant_p = 0.0;   // vector-field majorant of the perturbation
  double majorant_p_star = 0.0;
  double radius = 0.0;
  double delta_step = 0.0;
  double eps0 = 0.0;    // alpha delta / (75 P)
  double eps_star = 0.0;  // alpha R / (150 e P)
  int r_star = 0;       // ceil(R alpha / (150 e P eps))
  int r_used = 0;
};

struct NormalFormOptions {
  int modes = 12;
  int degree_cap = 8;
  int series_cap = 0;  // 0: derived from eps_cap
  int order = 0;       // 0: automatic via r_star
  int max_order = 4;
  double radius = 1.0;
  double mu_star = 1.0;
  double prune = 1e-15;  // relative floating prune per step
};

struct NormalFormResult {
  ModeTruncation<double> truncation;
  BandDecomposition bands;
  Poly<double> h0, z, r;
  std::vector<Poly<double>> generators;
  NormalFormConstants constants;
  bool truncated_by_degree = false;
  double eps = 0.0;
  int sigma = 0;
};

/// Projection of the nonlinear energy onto the truncated eigenbasis:
/// (1/(sigma+1)) integral |psi|^(2 sigma + 2) expanded over mode monomials,
/// tagged eps order 1.
Poly<double> project_nonlinearity(const SpectralData& spectral, int modes, int sigma);

/// Full finite-order construction on the Galerkin truncation of a computed
/// spectrum.  Refuses when mu = omega + |eps|/hbar^sigma exceeds the
/// configured threshold mu_star hbar^(3/2) / 2.
NormalFormResult normal_form(const SpectralData& spectral, int u_count, double eps, int sigma,
                             const NormalFormOptions& options);

/// K(u, ubar) = Z(u, ubar, 0, 0) / omega: the reduced Hamiltonian the
/// construction leaves on the distinguished block, in rescaled units.
Poly<double> k_restriction(const NormalFormResult& result);

struct CoefficientComparison {
  std::string name;
  double from_normal_form = 0.0;
  double from_reduction = 0.0;
  double rel_dev = 0.0;
};

/// Compares the leading reduced coefficients (hopping, on-site detuning and
/// nonlinearity) against the directly extracted model, after rotating the
/// distinguished block into the well frame with the basis c-matrix.
std::vector<CoefficientComparison> compare_k_with_model(const NormalFormResult& result,
                                                        const DnlsModel& model,
                                                        const WellBasis& basis);

/// Applies the truncated transformation T = phi_1 o ... o phi_r to a point by
/// integrating each generator flow numerically (RK4, unit formal time).
std::vector<cplx> apply_transform(const NormalFormResult& result, std::vector<cplx> zeta,
                                  bool inverse = false);

struct DivisorRatioReport {
  double norm_f = 0.0;
  double norm_g = 0.0;
  double ratio = 0.0;
};

/// Operator-norm amplification of the cross-band divided matrix
/// G_jl = F_jl / (i (lambda_l - lambda_j)).  F must vanish inside bands.
DivisorRatioReport small_divisor_bound_check(const std::vector<std::vector<double>>& f,
                                             const std::vector<double>& lambda, int u_count,
                                             const BandDecomposition& bands);

}  // namespace gpelab
