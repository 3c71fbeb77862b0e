#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "nulltube/charts.hpp"
#include "nulltube/cli.hpp"
#include "nulltube/connection.hpp"
#include "nulltube/errors.hpp"
#include "nulltube/finder.hpp"
#include "nulltube/surface.hpp"
#include "nulltube/tube.hpp"

namespace py = pybind11;
using namespace nulltube;

namespace {

ChartPoint point(const std::array<double, 4>& x) { return {x[0], x[1], x[2], x[3]}; }

py::dict sample_dict(const SurfaceGeometrySample& s) {
  py::dict d;
  d["tr_chi"] = s.tr_chi();
  d["tr_chibar"] = s.tr_chibar();
  d["chi_hat_norm2"] = s.chi_hat_norm2();
  d["chibar_hat_norm2"] = s.chibar_hat_norm2();
  d["eta"] = std::array<double, 2>{s.eta[0], s.eta[1]};
  d["Omegadot2"] = s.Omegadot2;
  return d;
}

SurfaceGraph make_graph(const DoubleNullChart& chart, int n, std::uint64_t seed, double amplitude) {
  const SurfacePlacement pl = default_placement(chart);
  const ThetaGrid g = ThetaGrid::patch(n, pl.centre[0], pl.centre[1], pl.half, pl.half);
  return random_graph(g, seed, pl.s0, pl.sbar0, amplitude);
}

}  // namespace

PYBIND11_MODULE(_nulltube, m) {
  m.doc() = "Double null geometry of spacelike surfaces and tubes";

  static py::exception<Error> base(m, "NulltubeError");
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<SolverError>(m, "SolverError", base.ptr());

  m.def("builtin_charts", [] {
    std::vector<std::string> names;
    for (const auto& c : builtin_charts()) names.push_back(c.name);
    return names;
  });
  m.def("builtin_tubes", [] {
    std::vector<std::string> names;
    for (const auto& t : builtin_tubes()) names.push_back(t.name);
    return names;
  });

  py::class_<DoubleNullChart>(m, "Chart")
      .def(py::init([](const std::string& sel, const Params& params) { return resolve_chart(sel, params); }),
           py::arg("name"), py::arg("params") = Params{})
      .def_property_readonly("name", &DoubleNullChart::name)
      .def_property_readonly("params", &DoubleNullChart::params)
      .def_property_readonly("rectangle",
                             [](const DoubleNullChart& c) {
                               const Rectangle& r = c.rectangle();
                               return std::array<double, 4>{r.s_min, r.s_max, r.sbar_min, r.sbar_max};
                             })
      .def("metric",
           [](const DoubleNullChart& c, const std::array<double, 4>& x) {
             const Mat4 g = assemble_metric(c.eval(point(x))).g;
             std::vector<std::vector<double>> out(4, std::vector<double>(4));
             for (int i = 0; i < 4; ++i)
               for (int j = 0; j < 4; ++j) out[i][j] = g(i, j);
             return out;
           })
      .def("eikonal", [](const DoubleNullChart& c, const std::array<double, 4>& x) {
        return verify_eikonal(c, point(x)).max();
      })
      .def("scacs_residual",
           [](const DoubleNullChart& c, const std::array<double, 4>& x) { return scacs_residuals(c, point(x)).max(); })
      .def("lie_b_residual",
           [](const DoubleNullChart& c, const std::array<double, 4>& x) { return lie_b_residual(c, point(x)); })
      .def("raychaudhuri_residual", [](const DoubleNullChart& c, const std::array<double, 4>& x) {
        return raychaudhuri_residual(c, point(x));
      });

  m.def(
      "surface_forms",
      [](const DoubleNullChart& chart, int n, std::uint64_t seed, double amplitude) {
        const SurfaceGraph g = make_graph(chart, n, seed, amplitude);
        const int c = (n - 1) / 2;
        return sample_dict(second_fundamental_forms(chart, g, Node{c, c}));
      },
      py::arg("chart"), py::arg("grid") = 17, py::arg("seed") = 1, py::arg("amplitude") = 0.05,
      "Closed-form expansions, shears and torsion at the centre node of a random surface.");

  m.def(
      "compare_with_oracle",
      [](const DoubleNullChart& chart, int n, std::uint64_t seed, double amplitude) {
        const OracleComparison d = compare_with_oracle(chart, make_graph(chart, n, seed, amplitude));
        py::dict out;
        out["chi"] = d.chi;
        out["chibar"] = d.chibar;
        out["eta"] = d.eta;
        out["max"] = d.max();
        out["nodes"] = d.nodes;
        return out;
      },
      py::arg("chart"), py::arg("grid") = 32, py::arg("seed") = 1, py::arg("amplitude") = 0.05);

  m.def(
      "find_marginal",
      [](const DoubleNullChart& chart, double fixed, double lo, double hi, bool incoming, int n) {
        FinderOptions opt;
        opt.family = incoming ? ConeFamily::incoming : ConeFamily::outgoing;
        const Topology& t = chart.topology();
        const ThetaGrid grid = t.kind == TopologyKind::torus
                                   ? ThetaGrid::torus(n, t.period[0], t.period[1])
                                   : ThetaGrid::patch(n, 0.5 * (t.th1_min + t.th1_max), 1.0, 0.2, 0.2);
        const MarginalSection s = find_marginal_on_cone(chart, fixed, grid, lo, hi, opt);
        std::vector<double> roots;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) roots.push_back(s.at(i, j));
        py::dict out;
        out["roots"] = roots;
        out["max_residual"] = s.max_residual;
        out["warnings"] = s.warnings;
        return out;
      },
      py::arg("chart"), py::arg("fixed"), py::arg("lo"), py::arg("hi"), py::arg("incoming") = false,
      py::arg("grid") = 16);

  m.def(
      "verify_tube",
      [](const std::string& tube_sel, const std::string& chart_sel, int levels, int bumps, std::uint64_t seed) {
        const TubeGraph tube = resolve_tube(tube_sel);
        const DoubleNullChart chart = resolve_chart(chart_sel.empty() ? tube.chart : chart_sel, {});
        ScanOptions opt;
        opt.levels = levels;
        opt.bumps_per_level = bumps;
        opt.seed = seed;
        const TubeReport r = verify_tube(chart, tube, opt);
        py::dict out;
        out["class"] = std::string(to_string(r.classification.overall));
        out["all_sections_marginal"] = r.scan.all_sections_marginal;
        out["max_expansion"] = r.scan.max_expansion;
        out["theorem_consistent"] = r.theorem_consistent;
        return out;
      },
      py::arg("tube"), py::arg("chart") = "", py::arg("levels") = 4, py::arg("bumps") = 4, py::arg("seed") = 1);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      "Runs the command line front end; returns (exit code, stdout, stderr).");
}
