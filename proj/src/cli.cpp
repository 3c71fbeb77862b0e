#include "nulltube/cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "CLI11.hpp"
#include "nulltube/errors.hpp"
#include "nulltube/finder.hpp"
#include "nulltube/parallel.hpp"
#include "nulltube/report.hpp"
#include "nulltube/surface.hpp"
#include "nulltube/tube.hpp"

namespace nulltube {

using nlohmann::json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_domain = 3;
constexpr int exit_solver = 4;
constexpr int exit_verification = 5;

const char* csv_help =
    "CSV columns.\n"
    "  residuals: s,sbar,th1,th2,residual,value,status  (status ok|fail|stencil)\n"
    "  surface:   i,j,th1,th2,f,fbar,tr_chi,tr_chibar,shear2,chibar_shear2,Omegadot2,diff_chi,diff_chibar,diff_eta\n"
    "  find-marginal: th1,th2,root,residual,iterations,multiple\n"
    "  verify-tube:   level,bump,sbar_level,max_abs_trchi,max_shear2,marginal";

struct RunConfig {
  std::string chart = "minkowski";
  std::vector<std::string> params;
  int grid = 16;
  double tol = 0.0;  // 0: command default
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "json";
  int samples = 8;
  // surface
  std::string surface;
  double amplitude = 0.05;
  // find-marginal
  double s0 = std::nan("");
  double sbar0 = std::nan("");
  std::vector<double> bracket;
  // verify-tube
  std::string tube;
  int levels = 8;
  int bumps = 16;
};

Params parse_params(const std::vector<std::string>& kv) {
  Params p;
  for (const auto& item : kv) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--param expects key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq), val = item.substr(eq + 1);
    try {
      std::size_t used = 0;
      p[key] = std::stod(val, &used);
      if (used != val.size()) throw std::invalid_argument(val);
    } catch (const std::exception&) {
      throw ConfigError("--param " + key + ": '" + val + "' is not a number");
    }
  }
  return p;
}

void check_grid(int n) {
  if (n < 16 || n > 512 || (n & (n - 1)) != 0)
    throw ConfigError("--grid must be a power of two between 16 and 512, got " + std::to_string(n));
}

double tolerance(const RunConfig& c, double fallback) {
  if (c.tol < 0.0 || (c.tol == 0.0 && std::signbit(c.tol))) throw ConfigError("--tol must be positive");
  return c.tol > 0.0 ? c.tol : fallback;
}

json chart_json(const DoubleNullChart& chart) {
  json j;
  j["name"] = chart.name();
  j["params"] = json::object();
  for (const auto& [k, v] : chart.params()) j["params"][k] = v;
  const Topology& t = chart.topology();
  j["topology"] = t.kind == TopologyKind::torus ? "torus" : "spherical_patch";
  if (t.kind == TopologyKind::spherical_patch) j["theta1"] = {t.th1_min, t.th1_max};
  j["period"] = {t.period[0], t.period[1]};
  const Rectangle& r = chart.rectangle();
  j["s"] = {r.s_min, r.s_max};
  j["sbar"] = {r.sbar_min, r.sbar_max};
  return j;
}

void emit(const RunConfig& c, const std::string& text, std::ostream& out) {
  if (c.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + c.out + "'");
  f << text;
}

json header(const std::string& command, const RunConfig& c) {
  json j;
  j["schema"] = report_schema;
  j["command"] = command;
  j["seed"] = c.seed;
  return j;
}

// ---------------------------------------------------------------- commands

int cmd_chart_info(const RunConfig& c, std::ostream& out) {
  const DoubleNullChart chart = resolve_chart(c.chart, parse_params(c.params));
  const double tol = tolerance(c, 1e-10);
  const auto pts = sample_points(chart, c.samples, c.samples, 0.02);
  std::vector<std::array<double, 3>> r(pts.size());
  std::vector<int> negatives(pts.size());
  parallel_for(pts.size(), [&](std::size_t k) {
    const EikonalResidual e = verify_eikonal(chart, pts[k]);
    r[k] = {e.grad_s, e.grad_sbar, e.conjugacy};
    const Eigen::SelfAdjointEigenSolver<Mat4> es(assemble_metric(chart.eval(pts[k])).g);
    negatives[k] = static_cast<int>((es.eigenvalues().array() < 0.0).count());
  });
  double m[3] = {0, 0, 0};
  bool lorentzian = true;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    for (int q = 0; q < 3; ++q) m[q] = std::max(m[q], r[k][q]);
    lorentzian = lorentzian && negatives[k] == 1;
  }
  const double worst = std::max({m[0], m[1], m[2]});
  json j = header("chart-info", c);
  j["chart"] = chart_json(chart);
  j["samples"] = pts.size();
  j["eikonal"] = {{"grad_s", m[0]}, {"grad_sbar", m[1]}, {"conjugacy", m[2]}, {"max", worst}};
  j["lorentzian"] = lorentzian;
  j["tol"] = tol;
  j["pass"] = worst < tol && lorentzian;
  emit(c, dump_json(j), out);
  return worst < tol && lorentzian ? exit_ok : exit_verification;
}

int cmd_residuals(const RunConfig& c, std::ostream& out) {
  const DoubleNullChart chart = resolve_chart(c.chart, parse_params(c.params));
  const double tol = tolerance(c, 1e-6);
  const auto pts = sample_points(chart, c.samples, c.samples, 0.02);
  static const char* names[4] = {"scacs", "lie_b", "raychaudhuri", "eikonal"};
  struct Row {
    double v[4];
    bool stencil[4];
  };
  std::vector<Row> rows(pts.size());
  parallel_for(pts.size(), [&](std::size_t k) {
    Row& row = rows[k];
    for (int q = 0; q < 4; ++q) {
      row.stencil[q] = false;
      try {
        switch (q) {
          case 0: row.v[q] = scacs_residuals(chart, pts[k]).max(); break;
          case 1: row.v[q] = lie_b_residual(chart, pts[k]); break;
          case 2: row.v[q] = raychaudhuri_residual(chart, pts[k]); break;
          default: row.v[q] = verify_eikonal(chart, pts[k]).max(); break;
        }
      } catch (const StencilError&) {
        row.v[q] = std::nan("");
        row.stencil[q] = true;
      }
    }
  });
  double worst[4] = {0, 0, 0, 0};
  int n_fail = 0, n_stencil = 0;
  std::ostringstream csv;
  csv << "s,sbar,th1,th2,residual,value,status\n";
  for (std::size_t k = 0; k < pts.size(); ++k)
    for (int q = 0; q < 4; ++q) {
      const Row& row = rows[k];
      std::string status = "ok";
      if (row.stencil[q]) {
        status = "stencil";
        ++n_stencil;
      } else {
        worst[q] = std::max(worst[q], row.v[q]);
        if (!(row.v[q] < tol)) {
          status = "fail";
          ++n_fail;
        }
      }
      csv << format_double(pts[k].s) << ',' << format_double(pts[k].sbar) << ',' << format_double(pts[k].th1) << ','
          << format_double(pts[k].th2) << ',' << names[q] << ',' << format_double(row.v[q]) << ',' << status << '\n';
    }
  if (c.format == "csv") {
    emit(c, csv.str(), out);
  } else {
    json j = header("residuals", c);
    j["chart"] = chart_json(chart);
    j["samples"] = pts.size();
    j["tol"] = tol;
    for (int q = 0; q < 4; ++q) j["max"][names[q]] = worst[q];
    j["failures"] = n_fail;
    j["stencil_rows"] = n_stencil;
    j["pass"] = n_fail == 0;
    emit(c, dump_json(j), out);
  }
  return n_fail == 0 ? exit_ok : exit_verification;
}

int cmd_surface(const RunConfig& c, std::ostream& out) {
  const DoubleNullChart chart = resolve_chart(c.chart, parse_params(c.params));
  check_grid(c.grid);
  const double tol = tolerance(c, 1e-6);
  if (!(c.amplitude > 0.0 && c.amplitude <= 0.1)) throw ConfigError("--amplitude must lie in (0, 0.1]");
  const SurfacePlacement pl = default_placement(chart);
  auto build = [&](int n) {
    if (!c.surface.empty()) return load_surface(c.surface);
    const ThetaGrid g = ThetaGrid::patch(n, pl.centre[0], pl.centre[1], pl.half, pl.half);
    return random_graph(g, c.seed, std::isnan(c.s0) ? pl.s0 : c.s0, std::isnan(c.sbar0) ? pl.sbar0 : c.sbar0,
                        c.amplitude);
  };
  const SurfaceGraph fine = build(c.grid);
  const OracleComparison df = compare_with_oracle(chart, fine);
  json j = header("surface", c);
  j["chart"] = chart_json(chart);
  j["grid"] = fine.grid().axis[0].n;
  j["nodes"] = df.nodes;
  j["diff"] = {{"chi", df.chi}, {"chibar", df.chibar}, {"eta", df.eta}, {"max", df.max()}};
  j["tol"] = tol;
  bool pass = df.max() < tol;
  if (c.surface.empty()) {
    const OracleComparison dc = compare_with_oracle(chart, build(c.grid / 2));
    const double order = std::log2(dc.max() / df.max());
    j["coarse"] = {{"grid", c.grid / 2}, {"max", dc.max()}};
    j["order"] = order;
  }
  j["pass"] = pass;
  if (c.format == "csv") {
    const std::vector<Node> nodes = fine.nodes();
    std::vector<std::string> lines(nodes.size());
    parallel_for(nodes.size(), [&](std::size_t k) {
      const Node& n = nodes[k];
      const SurfaceGeometrySample a = second_fundamental_forms(chart, fine, n);
      const SurfaceGeometrySample b = oracle_second_forms(chart, fine, n);
      std::ostringstream line;
      line << n.i << ',' << n.j << ',' << format_double(fine.th1(n.i)) << ',' << format_double(fine.th2(n.j)) << ','
           << format_double(fine.f(n.i, n.j)) << ',' << format_double(fine.fbar(n.i, n.j)) << ','
           << format_double(a.tr_chi()) << ',' << format_double(a.tr_chibar()) << ','
           << format_double(a.chi_hat_norm2()) << ',' << format_double(a.chibar_hat_norm2()) << ','
           << format_double(a.Omegadot2) << ',' << format_double((a.chi - b.chi).cwiseAbs().maxCoeff()) << ','
           << format_double((a.chibar - b.chibar).cwiseAbs().maxCoeff()) << ','
           << format_double((a.eta - b.eta).cwiseAbs().maxCoeff()) << '\n';
      lines[k] = line.str();
    });
    std::string text = "i,j,th1,th2,f,fbar,tr_chi,tr_chibar,shear2,chibar_shear2,Omegadot2,diff_chi,diff_chibar,diff_eta\n";
    for (const auto& l : lines) text += l;
    emit(c, text, out);
  } else {
    emit(c, dump_json(j), out);
  }
  return pass ? exit_ok : exit_verification;
}

ThetaGrid finder_grid(const DoubleNullChart& chart, int n) {
  const Topology& t = chart.topology();
  if (t.kind == TopologyKind::torus) return ThetaGrid::torus(n, t.period[0], t.period[1]);
  // ghost layers must stay inside the theta1 band
  const double c1 = 0.5 * (t.th1_min + t.th1_max);
  const double half = 0.5 * (t.th1_max - t.th1_min) * (n - 1) / (n - 1 + 2.0 * GridAxis::ghost_width) * 0.98;
  return ThetaGrid::patch(n, c1, 0.5 * t.period[1], half, half);
}

int cmd_find_marginal(const RunConfig& c, std::ostream& out) {
  const DoubleNullChart chart = resolve_chart(c.chart, parse_params(c.params));
  check_grid(c.grid);
  const double tol = tolerance(c, 1e-10);
  if (std::isnan(c.s0) == std::isnan(c.sbar0)) throw ConfigError("give exactly one of --s0 (outgoing) or --sbar0 (incoming)");
  if (c.bracket.size() != 2) throw ConfigError("--bracket needs two values");
  FinderOptions opt;
  opt.family = std::isnan(c.s0) ? ConeFamily::incoming : ConeFamily::outgoing;
  opt.tol = tol;
  const double fixed = std::isnan(c.s0) ? c.sbar0 : c.s0;
  const ThetaGrid grid = finder_grid(chart, c.grid);
  const MarginalSection sec = find_marginal_on_cone(chart, fixed, grid, c.bracket[0], c.bracket[1], opt);
  const bool spherical = chart.topology().kind == TopologyKind::spherical_patch;

  json j = header("find-marginal", c);
  j["chart"] = chart_json(chart);
  j["family"] = opt.family == ConeFamily::outgoing ? "outgoing" : "incoming";
  j[opt.family == ConeFamily::outgoing ? "s0" : "sbar0"] = fixed;
  j["bracket"] = {c.bracket[0], c.bracket[1]};
  j["tol"] = tol;
  json nodes = json::array();
  std::ostringstream csv;
  csv << "th1,th2,root,residual,iterations,multiple\n";
  double rmin = 1e300, rmax = -1e300;
  for (int i = 0; i < grid.axis[0].n; ++i)
    for (int jj = 0; jj < grid.axis[1].n; ++jj) {
      const std::size_t k = grid.flat(i, jj);
      const double t1 = grid.axis[0].coord(i), t2 = grid.axis[1].coord(jj);
      json node = {{"th1", t1}, {"th2", t2}, {"root", sec.root[k]}, {"residual", sec.residual[k]},
                   {"iterations", sec.iterations[k]}};
      if (spherical) {
        const ChartPoint p = opt.family == ConeFamily::outgoing ? ChartPoint{fixed, sec.root[k], t1, t2}
                                                                : ChartPoint{sec.root[k], fixed, t1, t2};
        const double r = std::sqrt(chart.eval(p).gamma[0][0].v);
        node["area_radius"] = r;
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
      }
      nodes.push_back(node);
      csv << format_double(t1) << ',' << format_double(t2) << ',' << format_double(sec.root[k]) << ','
          << format_double(sec.residual[k]) << ',' << sec.iterations[k] << ',' << int(sec.multiple[k]) << '\n';
    }
  j["nodes"] = nodes;
  j["max_residual"] = sec.max_residual;
  j["expansion_scale"] = sec.expansion_scale;
  if (spherical) j["area_radius"] = {{"min", rmin}, {"max", rmax}};
  j["warnings"] = sec.warnings;
  const bool pass = sec.max_residual <= tol * sec.expansion_scale;
  j["pass"] = pass;
  emit(c, c.format == "csv" ? csv.str() : dump_json(j), out);
  return pass ? exit_ok : exit_verification;
}

int cmd_verify_tube(const RunConfig& c, std::ostream& out, bool chart_given) {
  if (c.tube.empty()) throw ConfigError("--tube is required");
  check_grid(c.grid);
  const TubeGraph tube = resolve_tube(c.tube);
  const std::string selector = chart_given || tube.chart.empty() ? c.chart : tube.chart;
  const DoubleNullChart chart = resolve_chart(selector, parse_params(c.params));
  ScanOptions opt;
  opt.tol = tolerance(c, 1e-8);
  opt.seed = c.seed;
  opt.grid_n = c.grid;
  opt.levels = c.levels;
  opt.bumps_per_level = c.bumps;
  const TubeReport rep = verify_tube(chart, tube, opt);

  json j = header("verify-tube", c);
  j["tube"] = tube.name;
  j["chart"] = chart_json(chart);
  j["tol"] = opt.tol;
  const ClassifyReport& cl = rep.classification;
  j["classification"] = {{"class", to_string(cl.overall)},
                         {"nodes", cl.nodes.size()},
                         {"null", cl.n_null},
                         {"spacelike", cl.n_spacelike},
                         {"timelike", cl.n_timelike},
                         {"N_fraction", cl.N_fraction}};
  json secs = json::array();
  std::ostringstream csv;
  csv << "level,bump,sbar_level,max_abs_trchi,max_shear2,marginal\n";
  for (const auto& s : rep.scan.sections) {
    secs.push_back({{"level", s.level},
                    {"bump", s.bump},
                    {"sbar_level", s.sbar_level},
                    {"max_abs_trchi", s.max_abs_trchi},
                    {"max_shear2", s.max_shear2},
                    {"marginal", s.marginal}});
    csv << s.level << ',' << s.bump << ',' << format_double(s.sbar_level) << ',' << format_double(s.max_abs_trchi)
        << ',' << format_double(s.max_shear2) << ',' << int(s.marginal) << '\n';
  }
  j["scan"] = {{"sections", secs},
               {"all_sections_marginal", rep.scan.all_sections_marginal},
               {"max_expansion", rep.scan.max_expansion},
               {"max_shear2", rep.scan.max_shear2}};
  j["verdict"] = rep.scan.all_sections_marginal ? "all sections marginal" : "not all sections marginal";
  j["theorem_consistent"] = rep.theorem_consistent;
  emit(c, c.format == "csv" ? csv.str() : dump_json(j), out);
  return rep.theorem_consistent ? exit_ok : exit_verification;
}

void add_common(CLI::App* sub, RunConfig& c, bool surface_grid) {
  sub->add_option("--chart", c.chart, "builtin chart name or chart file")->capture_default_str();
  sub->add_option("--param", c.params, "chart parameter key=value (repeatable)");
  sub->add_option("--tol", c.tol, "tolerance (command default when omitted)");
  sub->add_option("--seed", c.seed, "random seed")->capture_default_str();
  sub->add_option("--out", c.out, "output path (stdout when omitted)");
  sub->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  if (surface_grid) sub->add_option("--grid", c.grid, "theta grid nodes per axis, power of two in [16, 512]")->capture_default_str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"nulltube: double null geometry of spacelike surfaces and tubes"};
  app.footer(csv_help);
  app.require_subcommand(1);
  RunConfig c;

  auto* info = app.add_subcommand("chart-info", "chart metadata and eikonal sweep");
  add_common(info, c, false);
  info->add_option("--samples", c.samples, "sample points per axis")->capture_default_str();
  info->add_option("--grid", c.samples, "alias of --samples");

  auto* res = app.add_subcommand("residuals", "connection identity residual sweep");
  add_common(res, c, false);
  res->add_option("--samples", c.samples, "sample points per axis")->capture_default_str();

  auto* surf = app.add_subcommand("surface", "closed-form second fundamental forms against the oracle");
  add_common(surf, c, true);
  surf->add_option("--surface", c.surface, "surface file (random surface when omitted)");
  surf->add_option("--amplitude", c.amplitude, "random surface amplitude")->capture_default_str();
  surf->add_option("--s0", c.s0, "base value of f");
  surf->add_option("--sbar0", c.sbar0, "base value of fbar");

  auto* fm = app.add_subcommand("find-marginal", "marginal section on a null cone");
  add_common(fm, c, true);
  fm->add_option("--s0", c.s0, "outgoing cone s = s0 (root in sbar)");
  fm->add_option("--sbar0", c.sbar0, "incoming cone sbar = sbar0 (root in s)");
  fm->add_option("--bracket", c.bracket, "search interval a b")->expected(2)->required();

  auto* vt = app.add_subcommand("verify-tube", "classify a tube and scan its sections");
  add_common(vt, c, true);
  vt->add_option("--tube", c.tube, "builtin tube name or tube file")->required();
  vt->add_option("--report", c.out, "report path (same as --out)");
  vt->add_option("--levels", c.levels, "constant-sbar levels")->capture_default_str();
  vt->add_option("--bumps", c.bumps, "bump sections per level")->capture_default_str();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_config;
  }

  try {
    if (info->parsed()) return cmd_chart_info(c, out);
    if (res->parsed()) return cmd_residuals(c, out);
    if (surf->parsed()) return cmd_surface(c, out);
    if (fm->parsed()) return cmd_find_marginal(c, out);
    if (vt->parsed()) return cmd_verify_tube(c, out, vt->count("--chart") > 0);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::config: return exit_config;
      case ErrorKind::domain: return exit_domain;
      case ErrorKind::solver: return exit_solver;
      case ErrorKind::verification: return exit_verification;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_config;
  }
  return exit_config;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
  return run_cli(args, out, err);
}

}  // namespace nulltube
