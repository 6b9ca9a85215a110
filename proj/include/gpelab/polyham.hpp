#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace gpelab {

using Rational = boost::multiprecision::cpp_rational;

/// Complex number over a field F (double or Rational).
template <class F>
struct Cx {
  F re{};
  F im{};

  Cx() = default;
  Cx(F r, F i) : re(std::move(r)), im(std::move(i)) {}
  explicit Cx(F r) : re(std::move(r)), im(F(0)) {}

  Cx operator+(const Cx& o) const { return {re + o.re, im + o.im}; }
  Cx operator-(const Cx& o) const { return {re - o.re, im - o.im}; }
  Cx operator-() const { return {-re, -im}; }
  Cx operator*(const Cx& o) const {
    return {re * o.re - im * o.im, re * o.im + im * o.re};
  }
  Cx times_i() const { return {-im, re}; }
  Cx conj() const { return {re, -im}; }
  Cx scaled(const F& s) const { return {re * s, im * s}; }
  /// division by the purely imaginary number i*d
  Cx div_i(const F& d) const { return {im / d, -re / d}; }
  Cx& operator+=(const Cx& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
};

template <class F>
struct FieldOps;

template <>
struct FieldOps<double> {
  static bool is_zero(const Cx<double>& c) { return c.re == 0.0 && c.im == 0.0; }
  static double magnitude(const Cx<double>& c) { return std::abs(c.re) + std::abs(c.im); }
  static double to_double(const double& f) { return f; }
};

template <>
struct FieldOps<Rational> {
  static bool is_zero(const Cx<Rational>& c) { return c.re == 0 && c.im == 0; }
  static double magnitude(const Cx<Rational>& c) {
    return std::abs(c.re.convert_to<double>()) + std::abs(c.im.convert_to<double>());
  }
  static double to_double(const Rational& f) { return f.convert_to<double>(); }
};

/// Gauge-mode monomial key: exponent multi-indices K (holomorphic) and L
/// (antiholomorphic) packed 4 bits per mode, plus the formal eps power the
/// term carries.  Limits: 16 modes, exponent 15 per variable.
struct MonoKey {
  std::uint64_t k = 0;
  std::uint64_t l = 0;
  std::uint32_t eps = 0;

  bool operator==(const MonoKey& o) const { return k == o.k && l == o.l && eps == o.eps; }
};

struct MonoKeyHash {
  size_t operator()(const MonoKey& m) const {
    std::uint64_t h = m.k * 0x9e3779b97f4a7c15ULL;
    h ^= m.l + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= m.eps + (h << 6) + (h >> 2);
    return static_cast<size_t>(h);
  }
};

constexpr int kMaxModes = 16;

inline int exp_of(std::uint64_t packed, int mode) { return static_cast<int>((packed >> (4 * mode)) & 0xF); }

inline std::uint64_t with_exp(std::uint64_t packed, int mode, int value) {
  std::uint64_t mask = 0xFULL << (4 * mode);
  return (packed & ~mask) | (static_cast<std::uint64_t>(value) << (4 * mode));
}

inline int total_degree_side(std::uint64_t packed, int modes) {
  int d = 0;
  for (int m = 0; m < modes; ++m) d += exp_of(packed, m);
  return d;
}

/// Sparse polynomial in the mode variables and their conjugates, with each
/// term tagged by the formal power of eps it carries.
template <class F>
struct Poly {
  int modes = 0;
  std::unordered_map<MonoKey, Cx<F>, MonoKeyHash> terms;

  void add(const MonoKey& key, const Cx<F>& c) {
    auto it = terms.find(key);
    if (it == terms.end()) {
      if (!FieldOps<F>::is_zero(c)) terms.emplace(key, c);
    } else {
      it->second += c;
      if (FieldOps<F>::is_zero(it->second)) terms.erase(it);
    }
  }

  Poly& operator+=(const Poly& o) {
    for (const auto& [key, c] : o.terms) add(key, c);
    return *this;
  }

  Poly scaled(const F& s) const {
    Poly r;
    r.modes = modes;
    for (const auto& [key, c] : terms) {
      Cx<F> v = c.scaled(s);
      if (!FieldOps<F>::is_zero(v)) r.terms.emplace(key, v);
    }
    return r;
  }

  Poly negated() const {
    Poly r;
    r.modes = modes;
    for (const auto& [key, c] : terms) r.terms.emplace(key, -c);
    return r;
  }

  bool empty() const { return terms.empty(); }
  size_t size() const { return terms.size(); }

  int degree(const MonoKey& key) const {
    return total_degree_side(key.k, modes) + total_degree_side(key.l, modes);
  }

  void prune(double threshold) {
    if (threshold <= 0.0) return;
    for (auto it = terms.begin(); it != terms.end();) {
      if (FieldOps<F>::magnitude(it->second) < threshold)
        it = terms.erase(it);
      else
        ++it;
    }
  }

  double max_magnitude() const {
    double m = 0.0;
    for (const auto& [key, c] : terms) m = std::max(m, FieldOps<F>::magnitude(c));
    return m;
  }
};

template <class F>
bool is_gauge_invariant(const Poly<F>& p) {
  for (const auto& [key, c] : p.terms)
    if (total_degree_side(key.k, p.modes) != total_degree_side(key.l, p.modes)) return false;
  return true;
}

/// {A, B} = i sum_k (dA/dzbar_k dB/dz_k - dA/dz_k dB/dzbar_k).
/// With this sign {N, m} = i (|K| - |L|) m and the homological solution for a
/// monomial is division by i sum lambda_k (K_k - L_k).  Terms whose combined
/// degree exceeds degree_cap or whose eps power exceeds eps_cap are dropped;
/// *truncated is set when a degree drop happens.
template <class F>
Poly<F> poisson_bracket(const Poly<F>& a, const Poly<F>& b, int degree_cap, int eps_cap,
                        bool* truncated = nullptr) {
  if (a.modes != b.modes) throw std::invalid_argument("poisson_bracket: mode count mismatch");
  if (degree_cap > 13)
    throw std::invalid_argument("poisson_bracket: degree cap above 13 overflows packed exponents");
  Poly<F> out;
  out.modes = a.modes;
  const int modes = a.modes;
  for (const auto& [ka, ca] : a.terms) {
    int deg_a = total_degree_side(ka.k, modes) + total_degree_side(ka.l, modes);
    for (const auto& [kb, cb] : b.terms) {
      int deg = deg_a + total_degree_side(kb.k, modes) + total_degree_side(kb.l, modes) - 2;
      std::uint32_t eps = ka.eps + kb.eps;
      if (eps > static_cast<std::uint32_t>(eps_cap)) continue;
      if (deg > degree_cap) {
        if (truncated) *truncated = true;
        continue;
      }
      Cx<F> prod = (ca * cb).times_i();
      for (int m = 0; m < modes; ++m) {
        int la = exp_of(ka.l, m), kb_m = exp_of(kb.k, m);
        int kam = exp_of(ka.k, m), lb = exp_of(kb.l, m);
        long w = static_cast<long>(la) * kb_m - static_cast<long>(kam) * lb;
        if (w == 0) continue;
        MonoKey key;  // (K_a + K_b - e_m, L_a + L_b - e_m); nibble-safe given the cap
        key.k = ka.k + kb.k - (1ULL << (4 * m));
        key.l = ka.l + kb.l - (1ULL << (4 * m));
        key.eps = eps;
        out.add(key, prod.scaled(F(w)));
      }
    }
  }
  return out;
}

/// Symbolic bracket with the number functional N = sum |zeta_k|^2:
/// each term picks up the factor i(|K| - |L|).
template <class F>
Poly<F> bracket_with_number(const Poly<F>& p) {
  Poly<F> out;
  out.modes = p.modes;
  for (const auto& [key, c] : p.terms) {
    long w = total_degree_side(key.k, p.modes) - total_degree_side(key.l, p.modes);
    if (w == 0) continue;
    out.add(key, c.times_i().scaled(F(w)));
  }
  return out;
}

/// Evaluation at a point (eps collapses the formal tags).
template <class F>
Cx<F> evaluate(const Poly<F>& p, const std::vector<Cx<F>>& zeta, const F& eps) {
  Cx<F> acc(F(0), F(0));
  for (const auto& [key, c] : p.terms) {
    Cx<F> term = c;
    for (std::uint32_t e = 0; e < key.eps; ++e) term = term.scaled(eps);
    for (int m = 0; m < p.modes; ++m) {
      for (int q = 0; q < exp_of(key.k, m); ++q) term = term * zeta[m];
      for (int q = 0; q < exp_of(key.l, m); ++q) term = term * zeta[m].conj();
    }
    acc += term;
  }
  return acc;
}

/// d/d zbar_k at a point, one component per mode (used to drive generator
/// flows numerically).
template <class F>
std::vector<Cx<F>> gradient_zbar(const Poly<F>& p, const std::vector<Cx<F>>& zeta, const F& eps) {
  std::vector<Cx<F>> grad(p.modes, Cx<F>(F(0), F(0)));
  for (const auto& [key, c] : p.terms) {
    for (int m = 0; m < p.modes; ++m) {
      int lm = exp_of(key.l, m);
      if (lm == 0) continue;
      Cx<F> term = c.scaled(F(lm));
      for (std::uint32_t e = 0; e < key.eps; ++e) term = term.scaled(eps);
      for (int q = 0; q < p.modes; ++q) {
        for (int j = 0; j < exp_of(key.k, q); ++j) term = term * zeta[q];
        int lq = exp_of(key.l, q) - (q == m ? 1 : 0);
        for (int j = 0; j < lq; ++j) term = term * zeta[q].conj();
      }
      grad[m] += term;
    }
  }
  return grad;
}

}  // namespace gpelab
