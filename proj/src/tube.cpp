#include "nulltube/tube.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

#include "nulltube/errors.hpp"
#include "nulltube/expr.hpp"
#include "nulltube/parallel.hpp"
#include "nulltube/random.hpp"
#include "nulltube/roots.hpp"
#include "nulltube/spline.hpp"

namespace nulltube {

using nlohmann::json;

namespace {

double fd_step(double x) { return 1e-3 * std::max(1.0, std::abs(x)); }

}  // namespace

double TubeGraph::h_sbar(double sbar, double th1, double th2) const {
  const double d = fd_step(sbar);
  return fd1(h(sbar - 2 * d, th1, th2), h(sbar - d, th1, th2), h(sbar + d, th1, th2), h(sbar + 2 * d, th1, th2), d);
}

Vec2 TubeGraph::h_theta(double sbar, double th1, double th2) const {
  const double d1 = fd_step(th1), d2 = fd_step(th2);
  return {fd1(h(sbar, th1 - 2 * d1, th2), h(sbar, th1 - d1, th2), h(sbar, th1 + d1, th2), h(sbar, th1 + 2 * d1, th2), d1),
          fd1(h(sbar, th1, th2 - 2 * d2), h(sbar, th1, th2 - d2), h(sbar, th1, th2 + d2), h(sbar, th1, th2 + 2 * d2), d2)};
}

// ---------------------------------------------------------------- catalogue

std::vector<TubeInfo> builtin_tubes() {
  return {
      {"null-hyperplane", "constant", "s = 0 in the constant-coefficient chart"},
      {"spacelike-hyperplane", "minkowski", "t = 1 slice, s = sbar - 1"},
      {"schwarzschild-horizon", "schwarzschild_kruskal", "event horizon s = 0"},
      {"tilted-spacelike", "minkowski", "s = 0.6 sbar - 0.2 + 0.02 cos th1"},
      {"schwarzschild-tangency", "schwarzschild_kruskal", "s = 0.4 sbar - 0.2 + 0.05 cos th1"},
  };
}

TubeGraph make_builtin_tube(const std::string& name) {
  TubeGraph t;
  t.name = name;
  const ThetaGrid patch = ThetaGrid::patch(16, 1.2, 1.0, 0.4, 0.4);
  if (name == "null-hyperplane") {
    t.chart = "constant";
    t.h = [](double, double, double) { return 0.0; };
    t.sbar_min = -1.0;
    t.sbar_max = 1.0;
    t.theta = ThetaGrid::torus(16);
  } else if (name == "spacelike-hyperplane") {
    t.chart = "minkowski";
    t.h = [](double sb, double, double) { return sb - 1.0; };
    t.sbar_min = 1.5;
    t.sbar_max = 5.0;
    t.theta = patch;
  } else if (name == "schwarzschild-horizon") {
    t.chart = "schwarzschild_kruskal";
    t.h = [](double, double, double) { return 0.0; };
    t.sbar_min = 0.2;
    t.sbar_max = 1.2;
    t.theta = patch;
  } else if (name == "tilted-spacelike") {
    t.chart = "minkowski";
    t.h = [](double sb, double th1, double) { return 0.6 * sb - 0.2 + 0.02 * std::cos(th1); };
    t.sbar_min = 1.5;
    t.sbar_max = 5.0;
    t.theta = patch;
  } else if (name == "schwarzschild-tangency") {
    t.chart = "schwarzschild_kruskal";
    t.h = [](double sb, double th1, double) { return 0.4 * sb - 0.2 + 0.05 * std::cos(th1); };
    t.sbar_min = 0.2;
    t.sbar_max = 1.2;
    t.theta = patch;
  } else {
    throw ConfigError("unknown tube '" + name + "'");
  }
  return t;
}

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
  throw LoadError(origin + ": " + what);
}

std::array<double, 2> range(const json& doc, const char* key, const std::string& origin) {
  if (!doc.contains(key) || !doc[key].is_array() || doc[key].size() != 2) fail(origin, std::string("'") + key + "' must be [lo, hi]");
  const double lo = doc[key][0].get<double>(), hi = doc[key][1].get<double>();
  if (!(hi > lo)) fail(origin, std::string("'") + key + "' must satisfy lo < hi");
  return {lo, hi};
}

}  // namespace

TubeGraph tube_from_json(const json& doc, const std::string& origin) {
  try {
    TubeGraph t;
    t.name = doc.value("name", std::string("tube"));
    t.chart = doc.value("chart", std::string());
    const auto sb = range(doc, "sbar", origin);
    t.sbar_min = sb[0];
    t.sbar_max = sb[1];
    t.n_sbar = doc.value("n_sbar", 16);
    if (t.n_sbar < 5) fail(origin, "n_sbar must be at least 5");
    if (!doc.contains("theta")) fail(origin, "missing key 'theta'");
    t.theta = theta_grid_from_json(doc["theta"], origin);
    if (!doc.contains("h")) fail(origin, "missing key 'h'");
    const json& h = doc["h"];
    if (h.is_string()) {
      auto e = std::make_shared<Expression>(h.get<std::string>());
      if (e->uses("s")) fail(origin, "tube expression may not use 's'");
      t.h = [e](double sbar, double th1, double th2) { return (*e)(th1, th2, 0.0, sbar); };
    } else if (h.is_object()) {
      const auto& shape = h.at("shape");
      if (!shape.is_array() || shape.size() != 3) fail(origin, "h.shape must have 3 entries (sbar, theta1, theta2)");
      std::vector<SplineAxis> axes(3);
      const auto t1 = range(h, "theta1", origin), t2 = range(h, "theta2", origin);
      std::array<bool, 2> periodic{false, false};
      if (h.contains("periodic")) periodic = {h["periodic"][0].get<bool>(), h["periodic"][1].get<bool>()};
      const std::array<std::array<double, 2>, 3> bounds{sb, t1, t2};
      std::size_t total = 1;
      for (int a = 0; a < 3; ++a) {
        const int n = shape[a].get<int>();
        if (n < 5) fail(origin, "h.shape entries must be at least 5");
        const bool per = a > 0 && periodic[a - 1];
        axes[a] = {bounds[a][0], (bounds[a][1] - bounds[a][0]) / (per ? n : n - 1), n, per};
        total *= n;
      }
      const auto values = h.at("values").get<std::vector<double>>();
      if (values.size() != total)
        fail(origin, "h.values has " + std::to_string(values.size()) + " entries, shape needs " + std::to_string(total));
      auto sp = std::make_shared<CubicSpline>(axes, values);
      t.h = [sp](double sbar, double th1, double th2) {
        const double x[3] = {sbar, th1, th2};
        return sp->eval(x);
      };
    } else {
      fail(origin, "'h' must be an expression string or a gridded object");
    }
    return t;
  } catch (const json::exception& e) {
    fail(origin, e.what());
  }
}

TubeGraph load_tube(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open tube file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw LoadError(path + ": " + e.what());
  }
  return tube_from_json(doc, path);
}

TubeGraph resolve_tube(const std::string& selector) {
  for (const auto& info : builtin_tubes())
    if (info.name == selector) return make_builtin_tube(selector);
  std::ifstream probe(selector);
  if (!probe) throw ConfigError("'" + selector + "' is neither a builtin tube nor a readable file");
  return load_tube(selector);
}

// ---------------------------------------------------------------- inverse

LocalInverse::LocalInverse(const TubeGraph& tube, double sbar_lo, double sbar_hi)
    : tube_(tube), lo_(sbar_lo), hi_(sbar_hi) {}

double LocalInverse::operator()(double s, double th1, double th2) const {
  auto F = [&](double x) { return tube_.h(x, th1, th2) - s; };
  auto dF = [&](double x) { return tube_.h_sbar(x, th1, th2); };
  const double scale = std::max(1.0, std::max(std::abs(lo_), std::abs(hi_)));
  return safeguarded_root(F, lo_, hi_, 4.0 * std::numeric_limits<double>::epsilon() * scale,
                          1e-14 * std::max(1.0, std::abs(s)), 200, dF)
      .x;
}

double LocalInverse::residual(double s, double th1, double th2) const {
  return std::abs(tube_.h((*this)(s, th1, th2), th1, th2) - s);
}

LocalInverse implicit_reparametrize(const TubeGraph& tube, double sbar0, double th1, double th2, double half) {
  const double d = tube.h_sbar(sbar0, th1, th2);
  if (!(std::abs(d) > 1e-8)) {
    std::ostringstream msg;
    msg << "tube '" << tube.name << "' is not a graph over s near sbar = " << sbar0 << ": |h_sbar| = " << std::abs(d);
    throw NotReparametrizableError(msg.str());
  }
  return LocalInverse(tube, std::max(tube.sbar_min, sbar0 - half), std::min(tube.sbar_max, sbar0 + half));
}

namespace {

template <class Fn>
void for_stored(const ThetaGrid& grid, Fn&& fn) {
  const GridAxis& a0 = grid.axis[0];
  const GridAxis& a1 = grid.axis[1];
  for (int i = -a0.ghosts(); i < a0.n + a0.ghosts(); ++i)
    for (int j = -a1.ghosts(); j < a1.n + a1.ghosts(); ++j) fn(i, j, a0.coord(i), a1.coord(j));
}

void require_spacelike(const DoubleNullChart& chart, const SurfaceGraph& g) {
  for (const Node& n : g.nodes()) induced_metric(chart, g, n);
}

}  // namespace

GriddedInverse grid_inverse(const LocalInverse& inv, const ThetaGrid& grid, double s) {
  GriddedInverse out;
  out.values.assign(grid.storage(), 0.0);
  for_stored(grid, [&](int i, int j, double t1, double t2) {
    const double v = inv(s, t1, t2);
    out.values[grid.flat(i, j)] = v;
    out.max_residual = std::max(out.max_residual, inv.residual(s, t1, t2));
  });
  return out;
}

double SectionSpec::f(double th1, double th2) const {
  if (kind == Kind::constant) return s0;
  const double d[2] = {std::sin(th1 - theta0[0]), std::sin(th2 - theta0[1])};
  double v = s0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) v += 0.5 * hessian(i, j) * d[i] * d[j];
  return v;
}

SurfaceGraph section_from_tube(const DoubleNullChart& chart, const ThetaGrid& grid, const LocalInverse& hbar,
                               const SectionSpec& spec) {
  std::vector<double> f(grid.storage()), fb(grid.storage());
  for_stored(grid, [&](int i, int j, double t1, double t2) {
    const std::size_t k = grid.flat(i, j);
    f[k] = spec.f(t1, t2);
    fb[k] = hbar(f[k], t1, t2);
  });
  SurfaceGraph g = SurfaceGraph::from_values(grid, std::move(f), std::move(fb));
  require_spacelike(chart, g);
  return g;
}

SurfaceGraph section_over_sbar(const DoubleNullChart& chart, const TubeGraph& tube, const ThetaGrid& grid,
                               const GraphFunction& fbar) {
  std::vector<double> f(grid.storage()), fb(grid.storage());
  for_stored(grid, [&](int i, int j, double t1, double t2) {
    const std::size_t k = grid.flat(i, j);
    fb[k] = fbar(t1, t2);
    f[k] = tube.h(fb[k], t1, t2);
  });
  SurfaceGraph g = SurfaceGraph::from_values(grid, std::move(f), std::move(fb));
  require_spacelike(chart, g);
  return g;
}

// ---------------------------------------------------------------- tangency

TangencyReport tangency_identity_residual(const DoubleNullChart& chart, const TubeGraph& tube, double s0,
                                          const Vec2& theta0, const BumpFamily& family) {
  if (family.grid_n < 5 || family.grid_n % 2 == 0) throw ConfigError("bump grid size must be odd and at least 5");
  if (family.count < 2) throw ConfigError("bump family needs at least 2 members");
  TangencyReport rep;
  rep.s0 = s0;
  rep.theta0 = theta0;
  auto F = [&](double x) { return tube.h(x, theta0[0], theta0[1]) - s0; };
  rep.sbar0 = safeguarded_root(F, tube.sbar_min, tube.sbar_max, 1e-15, 1e-14 * std::max(1.0, std::abs(s0))).x;
  const LocalInverse inv =
      implicit_reparametrize(tube, rep.sbar0, theta0[0], theta0[1], 0.25 * (tube.sbar_max - tube.sbar_min));

  const PointGeometry pg = point_geometry(chart, {s0, rep.sbar0, theta0[0], theta0[1]});
  rep.tr_chi = pg.sc.tr_chi();
  rep.Omega2 = pg.Omega2;
  rep.expected_slope = -2.0 * pg.Omega2;

  const ThetaGrid grid = ThetaGrid::patch(family.grid_n, theta0[0], theta0[1], family.half_width, family.half_width);
  const Node centre{(family.grid_n - 1) / 2, (family.grid_n - 1) / 2};
  Rng rng(family.seed);
  std::vector<Mat2> hessians(family.count);
  for (auto& H : hessians) {
    H(0, 0) = rng.uniform(-family.hessian_scale, family.hessian_scale);
    H(1, 1) = rng.uniform(-family.hessian_scale, family.hessian_scale);
    H(0, 1) = H(1, 0) = rng.uniform(-family.hessian_scale, family.hessian_scale);
  }
  rep.samples.resize(family.count);
  parallel_for(family.count, [&](std::size_t k) {
    SectionSpec spec;
    spec.kind = SectionSpec::Kind::bump;
    spec.s0 = s0;
    spec.theta0 = theta0;
    spec.hessian = hessians[k];
    const SurfaceGraph g = section_from_tube(chart, grid, inv, spec);
    const GraphJet gj = g.jet(centre);
    const PointGeometry pk = point_geometry(chart, gj.point());
    const NullFrameSolution sol = solve_null_frame(pk, gj);
    TangencySample& t = rep.samples[k];
    t.frame_at_p0 = std::max({sol.e.cwiseAbs().maxCoeff(), sol.eps_vec.cwiseAbs().maxCoeff(), std::abs(sol.eps)});
    t.trchi_dot = second_fundamental_forms(pk, gj).tr_chi();
    t.hessian_trace = (pg.sc.gamma_inv * hessians[k]).trace();
    t.predicted = rep.tr_chi - 2.0 * pg.Omega2 * t.hessian_trace;
    t.residual = std::abs(t.trchi_dot - t.predicted);
  });

  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const double n = family.count;
  for (const auto& t : rep.samples) {
    rep.max_residual = std::max(rep.max_residual, t.residual);
    sx += t.hessian_trace;
    sy += t.trchi_dot;
    sxx += t.hessian_trace * t.hessian_trace;
    sxy += t.hessian_trace * t.trchi_dot;
    syy += t.trchi_dot * t.trchi_dot;
  }
  const double vx = sxx - sx * sx / n, vy = syy - sy * sy / n, cxy = sxy - sx * sy / n;
  rep.slope = cxy / vx;
  rep.intercept = (sy - rep.slope * sx) / n;
  rep.r2 = vy > 0.0 ? cxy * cxy / (vx * vy) : 1.0;
  rep.slope_relative_error = std::abs(rep.slope - rep.expected_slope) / std::abs(rep.expected_slope);
  return rep;
}

// ---------------------------------------------------------------- classification

const char* to_string(CausalClass c) {
  switch (c) {
    case CausalClass::null: return "null";
    case CausalClass::spacelike: return "spacelike";
    case CausalClass::timelike: return "timelike";
    default: return "mixed";
  }
}

ClassifyReport classify_tube(const DoubleNullChart& chart, const TubeGraph& tube, double tol) {
  ClassifyReport rep;
  const GridAxis& a0 = tube.theta.axis[0];
  const GridAxis& a1 = tube.theta.axis[1];
  const std::size_t per_level = static_cast<std::size_t>(a0.n) * a1.n;
  rep.nodes.resize(per_level * tube.n_sbar);
  std::vector<char> in_N(rep.nodes.size(), 0);
  parallel_for(rep.nodes.size(), [&](std::size_t k) {
    const int l = static_cast<int>(k / per_level);
    const int i = static_cast<int>((k % per_level) / a1.n);
    const int j = static_cast<int>(k % a1.n);
    TubeNodeClass& nc = rep.nodes[k];
    nc.sbar = tube.sbar_at(l);
    nc.th1 = a0.coord(i);
    nc.th2 = a1.coord(j);
    const double hs = tube.h_sbar(nc.sbar, nc.th1, nc.th2);
    const Vec2 ht = tube.h_theta(nc.sbar, nc.th1, nc.th2);
    const MetricMatrix m = assemble_metric(chart.eval({tube(nc.sbar, nc.th1, nc.th2), nc.sbar, nc.th1, nc.th2}));
    Eigen::Matrix<double, 4, 3> T = Eigen::Matrix<double, 4, 3>::Zero();
    T(S, 0) = hs;
    T(SBAR, 0) = 1.0;
    for (int a = 0; a < 2; ++a) {
      T(S, 1 + a) = ht[a];
      T(TH1 + a, 1 + a) = 1.0;
    }
    const Eigen::Matrix3d G = T.transpose() * m.g * T;
    const Vec4 nrm(1.0, -hs, -ht[0], -ht[1]);
    nc.normal_norm = nrm.dot(m.inverse * nrm);
    nc.det = G.determinant();
    const double scale = G.cwiseAbs().maxCoeff();
    if (std::abs(nc.det) < tol * scale * scale * scale)
      nc.cls = CausalClass::null;
    else if (G(0, 0) > 0.0 && G.topLeftCorner<2, 2>().determinant() > 0.0 && nc.det > 0.0)
      nc.cls = CausalClass::spacelike;
    else
      nc.cls = CausalClass::timelike;
    in_N[k] = std::abs(hs) > 1e-8;
  });
  std::size_t n_in = 0;
  for (std::size_t k = 0; k < rep.nodes.size(); ++k) {
    switch (rep.nodes[k].cls) {
      case CausalClass::null: ++rep.n_null; break;
      case CausalClass::spacelike: ++rep.n_spacelike; break;
      default: ++rep.n_timelike; break;
    }
    n_in += in_N[k];
  }
  const int total = static_cast<int>(rep.nodes.size());
  rep.overall = rep.n_null == total        ? CausalClass::null
                : rep.n_spacelike == total ? CausalClass::spacelike
                : rep.n_timelike == total  ? CausalClass::timelike
                                           : CausalClass::mixed;
  rep.N_fraction = static_cast<double>(n_in) / total;
  return rep;
}

// ---------------------------------------------------------------- scan

ScanReport marginality_scan(const DoubleNullChart& chart, const TubeGraph& tube, const ScanOptions& opt) {
  if (opt.levels < 1 || opt.bumps_per_level < 0 || opt.grid_n < 5) throw ConfigError("invalid scan options");
  if (!(opt.tol > 0.0)) throw ConfigError("scan tolerance must be positive");
  ThetaGrid grid = tube.theta;
  for (auto& a : grid.axis) a.n = opt.grid_n;  // same extent, scan resolution
  const double span = tube.sbar_max - tube.sbar_min;
  const double amp = std::min(opt.bump_amplitude, 0.05 * span);
  const int per_level = 1 + opt.bumps_per_level;
  std::vector<double> levels(opt.levels);
  for (int l = 0; l < opt.levels; ++l)
    levels[l] = opt.levels == 1 ? tube.sbar_min + 0.5 * span
                                : tube.sbar_min + span * (0.1 + 0.8 * l / (opt.levels - 1));
  // bump polynomials are drawn sequentially so the family does not depend on threading
  Rng rng(opt.seed);
  std::vector<TrigPoly> polys(static_cast<std::size_t>(opt.levels) * opt.bumps_per_level);
  for (auto& p : polys) p = TrigPoly::random(rng, 4, amp);

  ScanReport rep;
  rep.sections.resize(static_cast<std::size_t>(opt.levels) * per_level);
  parallel_for(rep.sections.size(), [&](std::size_t k) {
    SectionResult& r = rep.sections[k];
    r.level = static_cast<int>(k / per_level);
    r.bump = static_cast<int>(k % per_level) - 1;
    r.sbar_level = levels[r.level];
    const double lvl = r.sbar_level;
    GraphFunction fbar;
    if (r.bump < 0) {
      fbar = [lvl](double, double) { return lvl; };
    } else {
      const TrigPoly& p = polys[static_cast<std::size_t>(r.level) * opt.bumps_per_level + r.bump];
      fbar = [lvl, &p](double t1, double t2) { return lvl + p(t1, t2); };
    }
    const SurfaceGraph g = section_over_sbar(chart, tube, grid, fbar);
    for (const Node& n : g.nodes()) {
      const SurfaceGeometrySample s = second_fundamental_forms(chart, g, n);
      r.max_abs_trchi = std::max(r.max_abs_trchi, std::abs(s.tr_chi()));
      r.max_shear2 = std::max(r.max_shear2, s.chi_hat_norm2());
    }
    r.marginal = r.max_abs_trchi < opt.tol;
  });
  rep.all_sections_marginal = true;
  for (const auto& r : rep.sections) {
    rep.all_sections_marginal = rep.all_sections_marginal && r.marginal;
    rep.max_expansion = std::max(rep.max_expansion, r.max_abs_trchi);
    rep.max_shear2 = std::max(rep.max_shear2, r.max_shear2);
  }
  return rep;
}

TubeReport verify_tube(const DoubleNullChart& chart, const TubeGraph& tube, const ScanOptions& opt) {
  TubeReport rep;
  rep.tube = tube.name;
  rep.chart = chart.name();
  rep.classification = classify_tube(chart, tube);
  rep.scan = marginality_scan(chart, tube, opt);
  rep.theorem_consistent =
      !(rep.classification.overall == CausalClass::spacelike && rep.scan.all_sections_marginal);
  return rep;
}

}  // namespace nulltube
