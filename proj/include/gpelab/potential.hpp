#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gpelab/grid.hpp"

namespace gpelab {

enum class PotentialFamily { DoubleWell, NWell, Tabulated };

/// An n-well trapping potential with global minimum value 1 at every well.
/// Built-in families are analytic; tabulated ones are cubic-spline
/// interpolated between samples.
struct PotentialSpec {
  PotentialFamily family = PotentialFamily::DoubleWell;
  std::vector<double> params;
  std::vector<double> wells;  // x_1 < ... < x_n
  int match_order = 4;           // r: derivative orders 2..r must agree across wells
  double growth_exponent = 2.0;  // m in the growth bound |V^(k)| <= C_k <x>^(m-k)

  // tabulated family only
  std::vector<double> tab_x, tab_v, tab_m;  // spline knots, values, second derivatives

  int well_count() const { return static_cast<int>(wells.size()); }
  double value(double x) const;
  std::string family_name() const;
};

PotentialSpec make_double_well(double a, double b);

/// n equally spaced wells: a windowed sin^2 lattice plus a smooth quadratic
/// confinement that vanishes identically on the well region, so derivatives
/// of every order coincide at all wells.  Defaults reproduce the double-well
/// curvature 2*spacing^2 at n = 2.
PotentialSpec make_n_well(int n, double spacing, double height = 0.0, double growth = 0.0);

PotentialSpec make_tabulated(const std::vector<double>& x, const std::vector<double>& v,
                             const std::vector<double>& wells, int match_order = 3,
                             double growth_exponent = 2.0);

struct ClauseReport {
  std::string clause;
  bool pass = true;
  double measured = 0.0;  // fitted constant or worst deviation
  double worst_x = 0.0;
  std::string detail;
};

struct ValidationReport {
  bool pass = false;
  std::vector<ClauseReport> clauses;
  std::string summary() const;
};

/// Checks clauses i-v of the trapping hypothesis on grid samples.
/// Derivatives up to match_order are centered finite differences with one
/// Richardson extrapolation step; cross-well agreement is required within
/// tol * max(1, |value|).
ValidationReport validate_hypothesis1(const PotentialSpec& spec, const Grid& grid,
                                      double tol = 1e-6);

/// Barrier integral between wells j and j+1 (j is 1-based, 1 <= j <= n-1):
/// integral of sqrt(max(V-1, 0)) over [x_j, x_{j+1}], adaptive quadrature.
double agmon_distance(const PotentialSpec& spec, int j);

/// 0.9 * min_j Agmon distance by default; the rate used in exponential fits.
double gamma_effective(const PotentialSpec& spec, double factor = 0.9);

/// Smallest barrier top between adjacent wells.
double barrier_min(const PotentialSpec& spec);

/// Halfway up the lowest barrier; the default single-well threshold.
double default_threshold(const PotentialSpec& spec);

/// The modified potential V_j of the single-well construction: equal to V on
/// the sublevel component containing well j (1-based), max(a_thr, V) outside.
/// Fails if the sublevel set V < a_thr does not split into one component per
/// well.
std::vector<double> modified_potential(const PotentialSpec& spec, int well, double a_thr,
                                       const Grid& grid);

/// Adaptive Simpson quadrature of f on [a, b] to relative tolerance rel_tol.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-10);

std::string potential_to_json(const PotentialSpec& spec);
PotentialSpec potential_from_json(const std::string& text);
void export_potential_csv(const PotentialSpec& spec, const Grid& grid, const std::string& path);

}  // namespace gpelab
