#include "gpelab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

namespace gpelab {

namespace {

constexpr double kPi = std::numbers::pi;

// C-infinity ramp: 0 for t <= 0, 1 for t >= 1.
double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  double qa = std::exp(-1.0 / t);
  double qb = std::exp(-1.0 / (1.0 - t));
  return qa / (qa + qb);
}

struct NWellParams {
  double d, height, growth;
  double x1, xl, xr, w, w2;
};

NWellParams unpack_n_well(const PotentialSpec& s) {
  NWellParams p{};
  p.d = s.params.at(0);
  p.height = s.params.at(1);
  p.growth = s.params.at(2);
  p.x1 = s.wells.front();
  p.xl = s.wells.front() - 0.5 * p.d;
  p.xr = s.wells.back() + 0.5 * p.d;
  p.w = 0.25 * p.d;
  p.w2 = 0.25 * p.d;
  return p;
}

double n_well_value(const PotentialSpec& s, double x) {
  NWellParams p = unpack_n_well(s);
  double u = std::sin(kPi * (x - p.x1) / p.d);
  // window == 1 on [xl - w2, xr + w2], 0 outside [xl - 2 w2, xr + 2 w2]
  double window = smooth_step((x - (p.xl - 2.0 * p.w2)) / p.w2) *
                  smooth_step(((p.xr + 2.0 * p.w2) - x) / p.w2);
  double v = 1.0 + p.height * u * u * window;
  if (x > p.xr) {
    double t = x - p.xr;
    v += p.growth * smooth_step(t / p.w) * t * t;
  } else if (x < p.xl) {
    double t = p.xl - x;
    v += p.growth * smooth_step(t / p.w) * t * t;
  }
  return v;
}

// natural cubic spline second derivatives
std::vector<double> spline_second_derivatives(const std::vector<double>& x,
                                              const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  std::vector<double> m(n, 0.0), u(n, 0.0);
  for (int i = 1; i < n - 1; ++i) {
    double sig = (x[i] - x[i - 1]) / (x[i + 1] - x[i - 1]);
    double pr = sig * m[i - 1] + 2.0;
    m[i] = (sig - 1.0) / pr;
    u[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]) - (y[i] - y[i - 1]) / (x[i] - x[i - 1]);
    u[i] = (6.0 * u[i] / (x[i + 1] - x[i - 1]) - sig * u[i - 1]) / pr;
  }
  for (int i = n - 2; i >= 1; --i) m[i] = m[i] * m[i + 1] + u[i];
  m[0] = m[n - 1] = 0.0;
  return m;
}

double spline_value(const PotentialSpec& s, double x) {
  const auto& xs = s.tab_x;
  const auto& ys = s.tab_v;
  const auto& ms = s.tab_m;
  const int n = static_cast<int>(xs.size());
  if (x <= xs.front()) {
    double slope = (ys[1] - ys[0]) / (xs[1] - xs[0]);
    return ys[0] + slope * (x - xs[0]);
  }
  if (x >= xs.back()) {
    double slope = (ys[n - 1] - ys[n - 2]) / (xs[n - 1] - xs[n - 2]);
    return ys[n - 1] + slope * (x - xs[n - 1]);
  }
  int lo = static_cast<int>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin()) - 1;
  lo = std::clamp(lo, 0, n - 2);
  double hh = xs[lo + 1] - xs[lo];
  double a = (xs[lo + 1] - x) / hh;
  double b = (x - xs[lo]) / hh;
  return a * ys[lo] + b * ys[lo + 1] +
         ((a * a * a - a) * ms[lo] + (b * b * b - b) * ms[lo + 1]) * hh * hh / 6.0;
}

// centered finite-difference derivative of order k (second-order stencil)
double fd_stencil(const std::function<double(double)>& f, double x, int k, double h) {
  switch (k) {
    case 0:
      return f(x);
    case 1:
      return (f(x + h) - f(x - h)) / (2.0 * h);
    case 2:
      return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
    case 3:
      return (-0.5 * f(x - 2 * h) + f(x - h) - f(x + h) + 0.5 * f(x + 2 * h)) / (h * h * h);
    case 4:
      return (f(x - 2 * h) - 4 * f(x - h) + 6 * f(x) - 4 * f(x + h) + f(x + 2 * h)) /
             (h * h * h * h);
    case 5:
      return (-0.5 * f(x - 3 * h) + 2 * f(x - 2 * h) - 2.5 * f(x - h) + 2.5 * f(x + h) -
              2 * f(x + 2 * h) + 0.5 * f(x + 3 * h)) /
             std::pow(h, 5);
    case 6:
      return (f(x - 3 * h) - 6 * f(x - 2 * h) + 15 * f(x - h) - 20 * f(x) + 15 * f(x + h) -
              6 * f(x + 2 * h) + f(x + 3 * h)) /
             std::pow(h, 6);
    default:
      throw std::invalid_argument("fd_stencil: derivative order above 6 unsupported");
  }
}

double fd_derivative(const std::function<double(double)>& f, double x, int k, double h) {
  if (k == 0) return f(x);
  double d1 = fd_stencil(f, x, k, h);
  double d2 = fd_stencil(f, x, k, 0.5 * h);
  return (4.0 * d2 - d1) / 3.0;  // one Richardson step, O(h^4)
}

double bracket_weight(double x) { return std::sqrt(1.0 + x * x); }

double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                            double fa, double fm, double fb, double whole, double tol,
                            int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol) {
  if (a == b) return 0.0;
  double m = 0.5 * (a + b);
  double fa = f(a), fm = f(m), fb = f(b);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  // two passes: first with a coarse absolute scale, then tightened
  double scale = std::max({std::abs(whole), std::abs(b - a) * 1e-16, 1e-300});
  double result = adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, rel_tol * scale, 52);
  if (std::abs(result) > scale) {
    result = adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, rel_tol * std::abs(result), 52);
  }
  return result;
}

double PotentialSpec::value(double x) const {
  switch (family) {
    case PotentialFamily::DoubleWell: {
      double a = params.at(0), b = params.at(1);
      double q = x * x - a * a;
      return 1.0 + b * q * q;
    }
    case PotentialFamily::NWell:
      return n_well_value(*this, x);
    case PotentialFamily::Tabulated:
      return spline_value(*this, x);
  }
  throw std::logic_error("unknown potential family");
}

std::string PotentialSpec::family_name() const {
  switch (family) {
    case PotentialFamily::DoubleWell: return "double_well";
    case PotentialFamily::NWell: return "n_well";
    case PotentialFamily::Tabulated: return "tabulated";
  }
  return "unknown";
}

PotentialSpec make_double_well(double a, double b) {
  if (a <= 0.0 || b <= 0.0) throw std::invalid_argument("double well: a and b must be positive");
  PotentialSpec s;
  s.family = PotentialFamily::DoubleWell;
  s.params = {a, b};
  s.wells = {-a, a};
  s.match_order = 4;
  s.growth_exponent = 4.0;
  return s;
}

PotentialSpec make_n_well(int n, double spacing, double height, double growth) {
  if (n < 2) throw std::invalid_argument("n well: n >= 2 required");
  if (spacing <= 0.0) throw std::invalid_argument("n well: spacing must be positive");
  if (height == 0.0) height = std::pow(spacing, 4) / (kPi * kPi);  // matches V'' = 2 spacing^2
  if (height < 0.0) throw std::invalid_argument("n well: height must be positive");
  if (growth == 0.0) growth = 4.0 * height / (spacing * spacing);
  if (growth < 0.0) throw std::invalid_argument("n well: growth must be positive");
  PotentialSpec s;
  s.family = PotentialFamily::NWell;
  s.params = {spacing, height, growth};
  s.wells.resize(n);
  double x1 = -0.5 * (n - 1) * spacing;
  for (int j = 0; j < n; ++j) s.wells[j] = x1 + j * spacing;
  s.match_order = 4;
  s.growth_exponent = 2.0;
  return s;
}

PotentialSpec make_tabulated(const std::vector<double>& x, const std::vector<double>& v,
                             const std::vector<double>& wells, int match_order,
                             double growth_exponent) {
  if (x.size() != v.size() || x.size() < 8)
    throw std::invalid_argument("tabulated potential: need matching x/v with >= 8 samples");
  if (!std::is_sorted(x.begin(), x.end()))
    throw std::invalid_argument("tabulated potential: abscissas must be sorted");
  PotentialSpec s;
  s.family = PotentialFamily::Tabulated;
  s.wells = wells;
  s.match_order = match_order;
  s.growth_exponent = growth_exponent;
  s.tab_x = x;
  s.tab_v = v;
  s.tab_m = spline_second_derivatives(x, v);
  return s;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  os << (pass ? "PASS" : "FAIL");
  for (const auto& c : clauses)
    if (!c.pass) os << " [" << c.clause << ": " << c.detail << "]";
  return os.str();
}

ValidationReport validate_hypothesis1(const PotentialSpec& spec, const Grid& grid, double tol) {
  const int n = spec.well_count();
  if (n < 2) throw std::invalid_argument("validate_hypothesis1: n >= 2 wells required");
  double margin = 4.0 * grid.h;
  if (spec.wells.front() < grid.x.front() + margin || spec.wells.back() > grid.x.back() - margin)
    throw std::invalid_argument("validate_hypothesis1: grid does not cover wells with margin");

  double gap = grid.x.back();
  for (int j = 0; j + 1 < n; ++j) gap = std::min(gap, spec.wells[j + 1] - spec.wells[j]);
  if (grid.h > gap / 8.0)
    throw std::runtime_error("validate_hypothesis1: grid too coarse to separate wells");
  const int r = spec.match_order;
  if (r > 6)
    throw std::runtime_error("validate_hypothesis1: grid/stencil cannot resolve order above 6");
  if (spec.family == PotentialFamily::Tabulated && r > 3)
    throw std::runtime_error(
        "validate_hypothesis1: tabulated potentials resolve derivatives up to order 3 only");

  auto f = [&spec](double x) { return spec.value(x); };
  double h_fd = std::min(0.05, gap / 16.0);
  if (spec.family == PotentialFamily::Tabulated) h_fd = std::max(h_fd, 2.0 * grid.h);

  ValidationReport rep;
  rep.pass = true;
  auto push = [&rep](ClauseReport c) {
    rep.pass = rep.pass && c.pass;
    rep.clauses.push_back(std::move(c));
  };

  // clause i: V = 1 exactly at wells, V > 1 elsewhere
  {
    ClauseReport c_eq{"i.well_depth", true, 0.0, 0.0, ""};
    for (double xj : spec.wells) {
      double dev = std::abs(f(xj) - 1.0);
      if (dev > c_eq.measured) {
        c_eq.measured = dev;
        c_eq.worst_x = xj;
      }
    }
    if (c_eq.measured > tol) {
      c_eq.pass = false;
      std::ostringstream os;
      os << "V(" << c_eq.worst_x << ") deviates from 1 by " << c_eq.measured;
      c_eq.detail = os.str();
    }
    push(c_eq);

    ClauseReport c_gt{"i.strictly_above", true, 1e300, 0.0, ""};
    for (double x : grid.x) {
      bool near_well = false;
      for (double xj : spec.wells)
        if (std::abs(x - xj) < 0.25 * gap) near_well = true;
      double v = f(x);
      if (v < 1.0 - tol) {
        c_gt.pass = false;
        c_gt.measured = v;
        c_gt.worst_x = x;
        std::ostringstream os;
        os << "V(" << x << ") = " << v << " < 1";
        c_gt.detail = os.str();
        break;
      }
      if (!near_well && v < c_gt.measured) {
        c_gt.measured = v;
        c_gt.worst_x = x;
      }
    }
    if (c_gt.pass && c_gt.measured <= 1.0) {
      c_gt.pass = false;
      std::ostringstream os;
      os << "V(" << c_gt.worst_x << ") = " << c_gt.measured << " not above 1 away from wells";
      c_gt.detail = os.str();
    }
    push(c_gt);
  }

  // clause ii: quadratic lower bound, fitted C
  {
    ClauseReport c{"ii.quadratic_bound", true, 0.0, 0.0, ""};
    for (double x : grid.x) {
      double v = f(x);
      if (v <= 0.0) {
        c.pass = false;
        c.worst_x = x;
        c.detail = "potential not positive";
        break;
      }
      double ratio = bracket_weight(x) * bracket_weight(x) / v;
      if (ratio > c.measured) {
        c.measured = ratio;
        c.worst_x = x;
      }
    }
    push(c);
  }

  // clause iii: growth bounds, fitted C_k on a coarse subsample
  {
    for (int k = 0; k <= std::min(r, 4); ++k) {
      ClauseReport c{"iii.growth_k" + std::to_string(k), true, 0.0, 0.0, ""};
      for (int i = 0; i < grid.n; i += 8) {
        double x = grid.x[i];
        if (x - 3 * h_fd < grid.x.front() || x + 3 * h_fd > grid.x.back()) continue;
        double dk = std::abs(fd_derivative(f, x, k, h_fd));
        double cst = dk * std::pow(bracket_weight(x), static_cast<double>(k) - spec.growth_exponent);
        if (cst > c.measured) {
          c.measured = cst;
          c.worst_x = x;
        }
      }
      push(c);
    }
  }

  // clause iv: common positive curvature
  std::vector<std::vector<double>> derivs(n);
  for (int j = 0; j < n; ++j) {
    derivs[j].resize(r + 1, 0.0);
    for (int k = 2; k <= r; ++k) derivs[j][k] = fd_derivative(f, spec.wells[j], k, h_fd);
  }
  {
    ClauseReport c{"iv.curvature", true, derivs[0][2], spec.wells[0], ""};
    for (int j = 0; j < n; ++j) {
      if (derivs[j][2] <= 0.0) {
        c.pass = false;
        c.worst_x = spec.wells[j];
        c.detail = "nonpositive curvature";
      }
      double dev = std::abs(derivs[j][2] - derivs[0][2]);
      if (dev > tol * std::max(1.0, std::abs(derivs[0][2]))) {
        c.pass = false;
        c.worst_x = spec.wells[j];
        std::ostringstream os;
        os << "V'' differs across wells by " << dev;
        c.detail = os.str();
      }
    }
    push(c);
  }

  // clause v: derivative matching of orders 2..r; a well may match the first
  // one directly or as its mirror image (odd orders flip sign under
  // reflection, as in the symmetric double well)
  {
    ClauseReport c{"v.match", true, 0.0, 0.0, ""};
    for (int j = 1; j < n; ++j) {
      double direct = 0.0, mirrored = 0.0;
      for (int k = 3; k <= r; ++k) {
        double scale = std::max(1.0, std::abs(derivs[0][k]));
        direct = std::max(direct, std::abs(derivs[j][k] - derivs[0][k]) / scale);
        double sign = (k % 2 == 0) ? 1.0 : -1.0;
        mirrored = std::max(mirrored, std::abs(derivs[j][k] - sign * derivs[0][k]) / scale);
      }
      double dev = std::min(direct, mirrored);
      if (dev > c.measured) {
        c.measured = dev;
        c.worst_x = spec.wells[j];
      }
    }
    if (c.measured > tol) {
      c.pass = false;
      std::ostringstream os;
      os << "well shape differs in orders 3.." << r << " by " << c.measured
         << " in both orientations";
      c.detail = os.str();
    }
    push(c);
  }
  return rep;
}

double agmon_distance(const PotentialSpec& spec, int j) {
  const int n = spec.well_count();
  if (j < 1 || j > n - 1) throw std::invalid_argument("agmon_distance: well index out of range");
  double a = spec.wells[j - 1], b = spec.wells[j];
  auto f = [&spec](double x) { return std::sqrt(std::max(spec.value(x) - 1.0, 0.0)); };
  return integrate_adaptive(f, a, b, 1e-10);
}

double gamma_effective(const PotentialSpec& spec, double factor) {
  double g = agmon_distance(spec, 1);
  for (int j = 2; j < spec.well_count(); ++j) g = std::min(g, agmon_distance(spec, j));
  return factor * g;
}

double barrier_min(const PotentialSpec& spec) {
  double lowest = 1e300;
  for (int j = 0; j + 1 < spec.well_count(); ++j) {
    double top = 0.0;
    double a = spec.wells[j], b = spec.wells[j + 1];
    for (int i = 0; i <= 4096; ++i) top = std::max(top, spec.value(a + (b - a) * i / 4096.0));
    lowest = std::min(lowest, top);
  }
  return lowest;
}

double default_threshold(const PotentialSpec& spec) {
  return 1.0 + 0.5 * (barrier_min(spec) - 1.0);
}

std::vector<double> modified_potential(const PotentialSpec& spec, int well, double a_thr,
                                       const Grid& grid) {
  const int n = spec.well_count();
  if (well < 1 || well > n) throw std::invalid_argument("modified_potential: well out of range");
  if (a_thr <= 1.0) throw std::invalid_argument("modified_potential: threshold must exceed 1");

  std::vector<double> v(grid.n);
  for (int i = 0; i < grid.n; ++i) v[i] = spec.value(grid.x[i]);

  // connected runs of the sublevel set V < a_thr
  std::vector<std::pair<int, int>> runs;
  int start = -1;
  for (int i = 0; i < grid.n; ++i) {
    if (v[i] < a_thr) {
      if (start < 0) start = i;
    } else if (start >= 0) {
      runs.emplace_back(start, i - 1);
      start = -1;
    }
  }
  if (start >= 0) runs.emplace_back(start, grid.n - 1);

  std::vector<int> run_of_well(n, -1);
  for (int j = 0; j < n; ++j) {
    for (size_t ri = 0; ri < runs.size(); ++ri) {
      double lo = grid.x[runs[ri].first] - 0.5 * grid.h;
      double hi = grid.x[runs[ri].second] + 0.5 * grid.h;
      if (spec.wells[j] >= lo && spec.wells[j] <= hi) run_of_well[j] = static_cast<int>(ri);
    }
    if (run_of_well[j] < 0)
      throw std::runtime_error("modified_potential: well " + std::to_string(j + 1) +
                               " not inside any sublevel component");
  }
  for (int j = 0; j + 1 < n; ++j) {
    if (run_of_well[j] == run_of_well[j + 1])
      throw std::runtime_error("modified_potential: sublevel components of wells " +
                               std::to_string(j + 1) + " and " + std::to_string(j + 2) +
                               " merge at threshold " + std::to_string(a_thr));
  }
  for (size_t ri = 0; ri < runs.size(); ++ri) {
    bool has_well = false;
    for (int j = 0; j < n; ++j)
      if (run_of_well[j] == static_cast<int>(ri)) has_well = true;
    if (!has_well)
      throw std::runtime_error("modified_potential: sublevel component without a well near x = " +
                               std::to_string(grid.x[runs[ri].first]));
  }

  std::vector<double> out(grid.n);
  auto [i0, i1] = runs[run_of_well[well - 1]];
  for (int i = 0; i < grid.n; ++i) {
    if (i >= i0 && i <= i1)
      out[i] = v[i];
    else
      out[i] = std::max(a_thr, v[i]);
  }
  return out;
}

std::string potential_to_json(const PotentialSpec& spec) {
  nlohmann::json j;
  j["family"] = spec.family_name();
  j["params"] = spec.params;
  j["wells"] = spec.wells;
  j["n"] = spec.well_count();
  j["r"] = spec.match_order;
  j["m"] = spec.growth_exponent;
  if (spec.family == PotentialFamily::Tabulated) {
    j["x"] = spec.tab_x;
    j["v"] = spec.tab_v;
  }
  return j.dump(2);
}

PotentialSpec potential_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  std::string fam = j.at("family").get<std::string>();
  if (fam == "double_well") {
    auto p = j.at("params").get<std::vector<double>>();
    if (p.size() != 2) throw std::invalid_argument("double_well expects params [a, b]");
    return make_double_well(p[0], p[1]);
  }
  if (fam == "n_well") {
    auto p = j.at("params").get<std::vector<double>>();
    int n = j.at("n").get<int>();
    double height = p.size() > 1 ? p[1] : 0.0;
    double growth = p.size() > 2 ? p[2] : 0.0;
    return make_n_well(n, p.at(0), height, growth);
  }
  if (fam == "tabulated") {
    return make_tabulated(j.at("x").get<std::vector<double>>(),
                          j.at("v").get<std::vector<double>>(),
                          j.at("wells").get<std::vector<double>>(),
                          j.value("r", 3), j.value("m", 2.0));
  }
  throw std::invalid_argument("unknown potential family: " + fam);
}

void export_potential_csv(const PotentialSpec& spec, const Grid& grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.precision(17);
  out << "x,V\n";
  for (double x : grid.x) out << x << "," << spec.value(x) << "\n";
}

}  // namespace gpelab
