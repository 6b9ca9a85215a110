#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gpelab/acceptance.hpp"
#include "gpelab/diagnostics.hpp"
#include "gpelab/experiment.hpp"

namespace py = pybind11;
using namespace gpelab;

namespace {

Discretization parse_method(const std::string& m) {
  if (m == "fd") return Discretization::FiniteDifference;
  if (m == "fourier") return Discretization::Fourier;
  throw std::invalid_argument("method must be 'fd' or 'fourier'");
}

WaveField field_from_values(const Grid& g, std::vector<cplx> values) {
  if (static_cast<int>(values.size()) != g.n)
    throw std::invalid_argument("field size does not match the grid");
  WaveField f;
  f.grid = g;
  f.values = std::move(values);
  return f;
}

}  // namespace

PYBIND11_MODULE(_gpelab, m) {
  m.doc() = "multi-well condensate dynamics and reduced-model laboratory";

  py::class_<Grid>(m, "Grid")
      .def_readonly("half_width", &Grid::half_width)
      .def_readonly("n", &Grid::n)
      .def_readonly("h", &Grid::h)
      .def_readonly("x", &Grid::x);
  m.def("make_grid", &make_grid, py::arg("half_width"), py::arg("points"));

  py::class_<PotentialSpec>(m, "PotentialSpec")
      .def_readonly("wells", &PotentialSpec::wells)
      .def_readonly("match_order", &PotentialSpec::match_order)
      .def_readonly("growth_exponent", &PotentialSpec::growth_exponent)
      .def_property_readonly("family", &PotentialSpec::family_name)
      .def("well_count", &PotentialSpec::well_count)
      .def("value", &PotentialSpec::value)
      .def("__call__", &PotentialSpec::value);
  m.def("make_double_well", &make_double_well, py::arg("a"), py::arg("b"));
  m.def("make_n_well", &make_n_well, py::arg("n"), py::arg("spacing"), py::arg("height") = 0.0,
        py::arg("growth") = 0.0);
  m.def("make_tabulated", &make_tabulated, py::arg("x"), py::arg("v"), py::arg("wells"),
        py::arg("match_order") = 3, py::arg("growth_exponent") = 2.0);

  py::class_<ClauseReport>(m, "ClauseReport")
      .def_readonly("clause", &ClauseReport::clause)
      .def_readonly("pass_", &ClauseReport::pass)
      .def_readonly("measured", &ClauseReport::measured)
      .def_readonly("worst_x", &ClauseReport::worst_x)
      .def_readonly("detail", &ClauseReport::detail);
  py::class_<ValidationReport>(m, "ValidationReport")
      .def_readonly("pass_", &ValidationReport::pass)
      .def_readonly("clauses", &ValidationReport::clauses)
      .def("summary", &ValidationReport::summary);
  m.def("validate_hypothesis1", &validate_hypothesis1, py::arg("spec"), py::arg("grid"),
        py::arg("tol") = 1e-6);
  m.def("agmon_distance", &agmon_distance, py::arg("spec"), py::arg("well"));
  m.def("gamma_effective", &gamma_effective, py::arg("spec"), py::arg("factor") = 0.9);
  m.def("default_threshold", &default_threshold);
  m.def("modified_potential", &modified_potential, py::arg("spec"), py::arg("well"),
        py::arg("a_thr"), py::arg("grid"));

  py::class_<SpectralData>(m, "SpectralData")
      .def_readonly("hbar", &SpectralData::hbar)
      .def_readonly("grid", &SpectralData::grid)
      .def_readonly("eigenvalues", &SpectralData::eigenvalues)
      .def_readonly("eigenvectors", &SpectralData::eigenvectors)
      .def_readonly("residuals", &SpectralData::residuals)
      .def("count", &SpectralData::count);
  m.def(
      "eigensolve",
      [](const PotentialSpec& spec, const Grid& g, double hbar, int count,
         const std::string& method) { return eigensolve(spec, g, hbar, count, parse_method(method)); },
      py::arg("spec"), py::arg("grid"), py::arg("hbar"), py::arg("count"),
      py::arg("method") = "fd");
  m.def(
      "eigensolve_samples",
      [](const std::vector<double>& v, const Grid& g, double hbar, int count,
         const std::string& method) {
        return eigensolve_samples(v, g, hbar, count, parse_method(method));
      },
      py::arg("v"), py::arg("grid"), py::arg("hbar"), py::arg("count"), py::arg("method") = "fd");

  py::class_<SplittingResult>(m, "SplittingResult")
      .def_readonly("omega", &SplittingResult::omega)
      .def_readonly("Omega", &SplittingResult::Omega);
  m.def("splitting", &splitting, py::arg("spectral"), py::arg("wells"));

  py::class_<WellBasis>(m, "WellBasis")
      .def_readonly("lambda_hat", &WellBasis::lambda_hat)
      .def_readonly("phi_hat", &WellBasis::phi_hat)
      .def_readonly("phi_orth", &WellBasis::phi_orth)
      .def_readonly("c", &WellBasis::c)
      .def_readonly("eq8_residual", &WellBasis::eq8_residual)
      .def_readonly("overlap_inf", &WellBasis::overlap_inf)
      .def("wells", &WellBasis::wells);
  m.def("single_well_basis", &single_well_basis, py::arg("spec"), py::arg("grid"),
        py::arg("hbar"), py::arg("a_thr"));

  m.def(
      "xs_norm",
      [](const SpectralData& sd, const Grid& g, std::vector<cplx> values, int s, double tail) {
        return xs_norm(sd, field_from_values(g, std::move(values)), s, tail);
      },
      py::arg("spectral"), py::arg("grid"), py::arg("values"), py::arg("s"),
      py::arg("tail_rel") = 1e-8);
  m.def(
      "alt_norm",
      [](const Grid& g, std::vector<cplx> values, int s, double hbar, const PotentialSpec& spec) {
        return alt_norm(field_from_values(g, std::move(values)), s, hbar, spec);
      },
      py::arg("grid"), py::arg("values"), py::arg("s"), py::arg("hbar"), py::arg("spec"));

  py::class_<DnlsModel>(m, "DnlsModel")
      .def_readonly("n", &DnlsModel::n)
      .def_readonly("sigma", &DnlsModel::sigma)
      .def_readonly("omega", &DnlsModel::omega)
      .def_readonly("Omega", &DnlsModel::Omega)
      .def_readonly("eps", &DnlsModel::eps)
      .def_readonly("c", &DnlsModel::c)
      .def_readonly("nu", &DnlsModel::nu)
      .def_readonly("delta", &DnlsModel::delta)
      .def_readonly("lambda_", &DnlsModel::lambda)
      .def_readonly("eta", &DnlsModel::eta)
      .def("eta_eom", &DnlsModel::eta_eom)
      .def_static("normalized", &DnlsModel::normalized, py::arg("n"), py::arg("eta_eom"),
                  py::arg("sigma"));
  m.def("extract_coefficients", &extract_coefficients, py::arg("spectral"), py::arg("basis"),
        py::arg("eps"), py::arg("sigma"));
  m.def("k0_energy", &k0_energy);
  m.def("dnls_rhs", &dnls_rhs);

  py::class_<DnlsTrajectory>(m, "DnlsTrajectory")
      .def_readonly("tau", &DnlsTrajectory::tau)
      .def_readonly("states", &DnlsTrajectory::states)
      .def_readonly("invariant", &DnlsTrajectory::invariant)
      .def_readonly("k0", &DnlsTrajectory::k0)
      .def_readonly("max_invariant_drift", &DnlsTrajectory::max_invariant_drift)
      .def_readonly("max_k0_drift", &DnlsTrajectory::max_k0_drift)
      .def_readonly("max_action_drift", &DnlsTrajectory::max_action_drift);
  m.def("dnls_integrate", &dnls_integrate, py::arg("model"), py::arg("state0"),
        py::arg("tau_end"), py::arg("dtau"), py::arg("record_stride") = 1);

  py::class_<DnlsEquilibrium>(m, "DnlsEquilibrium")
      .def_readonly("p", &DnlsEquilibrium::p)
      .def_readonly("alpha", &DnlsEquilibrium::alpha)
      .def_readonly("level", &DnlsEquilibrium::level)
      .def_readonly("stable", &DnlsEquilibrium::stable)
      .def_readonly("localized", &DnlsEquilibrium::localized);
  py::class_<DoubleWellAnalysis>(m, "DoubleWellAnalysis")
      .def_readonly("eta", &DoubleWellAnalysis::eta)
      .def_readonly("equilibria", &DoubleWellAnalysis::equilibria)
      .def_readonly("bifurcated", &DoubleWellAnalysis::bifurcated)
      .def_readonly("homoclinic_level", &DoubleWellAnalysis::homoclinic_level)
      .def_readonly("saddle_level_measured", &DoubleWellAnalysis::saddle_level_measured);
  m.def("double_well_analysis", &double_well_analysis, py::arg("eta"), py::arg("sigma") = 2);
  m.def(
      "classify_trajectory",
      [](const DnlsModel& model, const DnlsState& s0, double horizon) {
        return std::string(to_string(classify_trajectory(model, s0, horizon)));
      },
      py::arg("model"), py::arg("state0"), py::arg("horizon"));

  py::class_<DriftStats>(m, "DriftStats")
      .def_readonly("drifts", &DriftStats::drifts)
      .def_readonly("median", &DriftStats::median)
      .def_readonly("q90", &DriftStats::q90);
  m.def("action_drift_stats", &action_drift_stats, py::arg("model"), py::arg("ensemble"),
        py::arg("rho"), py::arg("horizon"), py::arg("dtau"), py::arg("seed"),
        py::arg("threads") = 1);

  py::class_<GpeObservables>(m, "GpeObservables")
      .def_readonly("t", &GpeObservables::t)
      .def_readonly("mass", &GpeObservables::mass)
      .def_readonly("energy", &GpeObservables::energy)
      .def_readonly("x_mean", &GpeObservables::x_mean)
      .def_readonly("picnorm", &GpeObservables::picnorm)
      .def_readonly("xs_full", &GpeObservables::xs_full)
      .def_readonly("populations", &GpeObservables::populations)
      .def_readonly("well_amplitudes", &GpeObservables::well_amplitudes);
  py::class_<GpeTrajectory>(m, "GpeTrajectory")
      .def_readonly("obs", &GpeTrajectory::obs)
      .def_readonly("snapshot_t", &GpeTrajectory::snapshot_t);
  py::class_<GpeRunConfig>(m, "GpeRunConfig")
      .def(py::init<>())
      .def_readwrite("hbar", &GpeRunConfig::hbar)
      .def_readwrite("eps", &GpeRunConfig::eps)
      .def_readwrite("sigma", &GpeRunConfig::sigma)
      .def_readwrite("dt", &GpeRunConfig::dt)
      .def_readwrite("t_end", &GpeRunConfig::t_end)
      .def_readwrite("record_stride", &GpeRunConfig::record_stride)
      .def_readwrite("modes", &GpeRunConfig::modes)
      .def_readwrite("s", &GpeRunConfig::s)
      .def_property(
          "method",
          [](const GpeRunConfig& c) {
            return c.method == GpeRunConfig::Method::EigenBasis ? "eigenbasis" : "fourier";
          },
          [](GpeRunConfig& c, const std::string& v) {
            c.method = v == "fourier" ? GpeRunConfig::Method::FourierSplit
                                      : GpeRunConfig::Method::EigenBasis;
          });
  m.def(
      "gpe_integrate",
      [](const SpectralData& sd, const WellBasis& wb, const GpeRunConfig& cfg,
         std::vector<cplx> psi0) {
        return gpe_integrate(sd, wb, cfg, field_from_values(sd.grid, std::move(psi0)));
      },
      py::arg("spectral"), py::arg("basis"), py::arg("config"), py::arg("psi0"));
  m.def("field_from_eigenmodes",
        [](const SpectralData& sd, const std::vector<cplx>& coeffs) {
          return field_from_eigenmodes(sd, coeffs).values;
        });
  m.def("field_from_well", [](const WellBasis& wb, int well) {
    return field_from_well(wb, well).values;
  });

  py::class_<FitResult>(m, "FitResult")
      .def_readonly("slope", &FitResult::slope)
      .def_readonly("intercept", &FitResult::intercept)
      .def_readonly("residual", &FitResult::residual);
  m.def("fit_loglog", &fit_loglog);
  m.def("fit_semilog", &fit_semilog);
  py::class_<BeatingReport>(m, "BeatingReport")
      .def_readonly("conclusive", &BeatingReport::conclusive)
      .def_readonly("is_beating", &BeatingReport::is_beating)
      .def_readonly("period", &BeatingReport::period)
      .def_readonly("amplitude", &BeatingReport::amplitude)
      .def_readonly("sign_changes", &BeatingReport::sign_changes);
  m.def("beating_detector", &beating_detector, py::arg("t"), py::arg("x"),
        py::arg("expected_period") = 0.0, py::arg("noise_floor") = 1e-6);

  m.def(
      "run_acceptance",
      [](int only, int threads) {
        py::list out;
        for (const auto& r : run_acceptance(only, threads)) {
          py::dict d;
          d["id"] = r.id;
          d["name"] = r.name;
          d["pass"] = r.pass;
          d["runtime_s"] = r.runtime_s;
          d["detail"] = r.detail;
          out.append(std::move(d));
        }
        return out;
      },
      py::arg("only") = 0, py::arg("threads") = 1);
  m.def(
      "run_subcommand",
      [](const std::string& name, const std::string& config_json) {
        return run_subcommand(name, config_from_json(config_json));
      },
      py::arg("name"), py::arg("config_json"));
}
