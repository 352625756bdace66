#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "conslab/config.hpp"
#include "conslab/convergence.hpp"
#include "conslab/experiments.hpp"
#include "conslab/frames.hpp"
#include "conslab/gauge.hpp"
#include "conslab/targets.hpp"
#include "conslab/wente.hpp"

namespace py = pybind11;
using namespace conslab;

namespace {

ScalarField field_from(const GridPtr& g, const Eigen::VectorXd& v) {
  if (v.size() != g->N) throw Error("expected " + std::to_string(g->N) + " node values, got " + std::to_string(v.size()));
  return {g, v};
}

py::dict grid_dict(int n) {
  const auto g = make_grid(n);
  py::dict d;
  d["n"] = g->n;
  d["h"] = g->h;
  d["x"] = g->x;
  d["y"] = g->y;
  d["interior"] = std::vector<bool>(g->interior.begin(), g->interior.end());
  return d;
}

py::tuple wente(int n, const Eigen::VectorXd& a, const Eigen::VectorXd& b, const std::string& bc) {
  const auto g = make_grid(n);
  const auto [phi, r] = wente_solve(field_from(g, a), field_from(g, b), parse_bc(bc));
  py::dict d;
  d["sup_phi"] = r.sup_phi;
  d["norm_grad_phi"] = r.norm_grad_phi;
  d["norm_grad_a"] = r.norm_grad_a;
  d["norm_grad_b"] = r.norm_grad_b;
  d["ratio_sup"] = r.ratio_sup;
  d["ratio_grad"] = r.ratio_grad;
  d["defined"] = r.defined;
  return py::make_tuple(phi.v, d);
}

py::dict gauge_summary(int n, double lambda) {
  const auto g = make_grid(n);
  const GaugeResult r = coulomb_gauge(omega_sphere(stereo_sphere_map(g, lambda)));
  py::dict d;
  d["residual_rel"] = r.residual_rel;
  d["energy_in"] = r.energy_in;
  d["energy_out"] = r.energy_out;
  d["ratio"] = r.ratio;
  d["verified"] = verify_gauge(r).all();
  return d;
}

py::dict frame_summary(int n, double lambda) {
  const auto g = make_grid(n);
  const MapField u = stereo_sphere_map(g, lambda);
  const Frame f = coulomb_frame(u);
  const ScalarField a = solve_a(f);
  const ABound b = a_bounds(a, f);
  const FrameResidual r = frame_conservation_residual(u, f, a);
  py::dict d;
  d["coulomb_residual"] = f.coulomb_residual;
  d["ratio_sup"] = b.ratio_sup;
  d["ratio_grad"] = b.ratio_grad;
  d["r1"] = r.r1;
  d["r2"] = r.r2;
  d["C"] = second_derivative_report(u, f).C;
  return d;
}

py::list run_config(const std::string& text, const std::string& out_dir) {
  const auto configs = parse_config(text);
  std::vector<ExperimentOutcome> outcomes;
  {
    py::gil_scoped_release release;
    for (const auto& c : configs) outcomes.push_back(run_experiment(c, out_dir));
  }
  py::list out;
  for (const auto& o : outcomes) {
    py::dict d;
    d["name"] = o.name;
    d["experiment"] = experiment_name(o.kind);
    d["passed"] = o.pass();
    d["error"] = o.error;
    py::list checks;
    for (const auto& c : o.checks)
      checks.append(py::dict(py::arg("name") = c.name, py::arg("value") = c.value, py::arg("bound") = c.bound,
                             py::arg("upper") = c.upper, py::arg("passed") = c.pass));
    d["checks"] = checks;
    py::dict tables;
    for (const auto& [file, t] : o.tables) tables[py::str(file)] = t.str();
    d["tables"] = tables;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_conslab, m) {
  m.doc() = "Conservation-law experiments on the discretized unit disk";

  // Translators are tried newest first, so the derived type goes last.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("grid", &grid_dict, py::arg("n"), "Node coordinates and interior mask of the n x n disk grid.");
  m.def("stereo_sphere_map", [](int n, double lambda) { return stereo_sphere_map(make_grid(n), lambda).u; },
        py::arg("n"), py::arg("lam"));
  m.def("wente_solve", &wente, py::arg("n"), py::arg("a"), py::arg("b"), py::arg("bc") = "dirichlet",
        "Solve Delta phi = jacobian(a, b); returns (phi, report).");
  m.def("gauge_summary", &gauge_summary, py::arg("n"), py::arg("lam"));
  m.def("frame_summary", &frame_summary, py::arg("n"), py::arg("lam"));
  m.def(
      "fit_slope",
      [](const std::vector<double>& h, const std::vector<double>& r, double min_slope, int min_points) {
        const SlopeFit f = fit_slope(h, r, min_slope, min_points);
        return py::dict(py::arg("slope") = f.slope, py::arg("intercept") = f.intercept,
                        py::arg("pair_slopes") = f.pair_slopes, py::arg("passed") = f.pass);
      },
      py::arg("h"), py::arg("r"), py::arg("min_slope") = 0.9, py::arg("min_points") = 2);
  m.def("run_config", &run_config, py::arg("text"), py::arg("out_dir") = "",
        "Run every experiment of a JSON config; CSVs are written only when out_dir is set.");
}
