#include "nulltube/surface.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nulltube/random.hpp"
#include "surface_internal.hpp"

namespace nulltube {

using detail::D2;

// ---------------------------------------------------------------- graph

SurfaceGraph SurfaceGraph::from_functions(const ThetaGrid& grid, const GraphFunction& f,
                                          const GraphFunction& fbar) {
  SurfaceGraph g;
  g.grid_ = grid;
  g.f_.assign(grid.storage(), 0.0);
  g.fbar_.assign(grid.storage(), 0.0);
  const GridAxis& a0 = grid.axis[0];
  const GridAxis& a1 = grid.axis[1];
  for (int i = -a0.ghosts(); i < a0.n + a0.ghosts(); ++i)
    for (int j = -a1.ghosts(); j < a1.n + a1.ghosts(); ++j) {
      const double t1 = a0.coord(i), t2 = a1.coord(j);
      g.f_[grid.flat(i, j)] = f(t1, t2);
      g.fbar_[grid.flat(i, j)] = fbar(t1, t2);
    }
  g.differentiate();
  return g;
}

SurfaceGraph SurfaceGraph::from_values(const ThetaGrid& grid, std::vector<double> f,
                                       std::vector<double> fbar) {
  if (f.size() != grid.storage() || fbar.size() != grid.storage())
    throw ConfigError("surface arrays have " + std::to_string(f.size()) + "/" +
                      std::to_string(fbar.size()) + " values, grid stores " +
                      std::to_string(grid.storage()));
  SurfaceGraph g;
  g.grid_ = grid;
  g.f_ = std::move(f);
  g.fbar_ = std::move(fbar);
  g.differentiate();
  return g;
}

void SurfaceGraph::differentiate() {
  jets_.assign(grid_.storage(), GraphJet{});
  has_jet_.assign(grid_.storage(), 0);
  const GridAxis& a0 = grid_.axis[0];
  const GridAxis& a1 = grid_.axis[1];
  const double h0 = a0.step(), h1 = a1.step();
  auto d1 = [&](const std::vector<double>& v, int i, int j, int axis) {
    auto at = [&](int o) { return axis == 0 ? v[grid_.flat(i + o, j)] : v[grid_.flat(i, j + o)]; };
    return fd1(at(-2), at(-1), at(1), at(2), axis == 0 ? h0 : h1);
  };
  auto d2 = [&](const std::vector<double>& v, int i, int j, int axis) {
    auto at = [&](int o) { return axis == 0 ? v[grid_.flat(i + o, j)] : v[grid_.flat(i, j + o)]; };
    return fd2(at(-2), at(-1), at(0), at(1), at(2), axis == 0 ? h0 : h1);
  };
  auto d12 = [&](const std::vector<double>& v, int i, int j) {
    double row[4];
    const int off[4] = {-2, -1, 1, 2};
    for (int q = 0; q < 4; ++q) row[q] = d1(v, i + off[q], j, 1);
    return fd1(row[0], row[1], row[2], row[3], h0);
  };
  for (int i = -a0.ghosts(); i < a0.n + a0.ghosts(); ++i)
    for (int j = -a1.ghosts(); j < a1.n + a1.ghosts(); ++j) {
      if (!grid_.reachable(i, j, 2)) continue;
      GraphJet gj;
      gj.th1 = a0.coord(i);
      gj.th2 = a1.coord(j);
      const std::size_t k = grid_.flat(i, j);
      gj.f = f_[k];
      gj.fbar = fbar_[k];
      for (const auto* arr : {&f_, &fbar_}) {
        Vec2& d = arr == &f_ ? gj.df : gj.dfbar;
        Mat2& dd = arr == &f_ ? gj.ddf : gj.ddfbar;
        d = Vec2(d1(*arr, i, j, 0), d1(*arr, i, j, 1));
        dd(0, 0) = d2(*arr, i, j, 0);
        dd(1, 1) = d2(*arr, i, j, 1);
        dd(0, 1) = dd(1, 0) = d12(*arr, i, j);
      }
      jets_[k] = gj;
      has_jet_[k] = 1;
    }
}

GraphJet SurfaceGraph::jet(int i, int j) const {
  if (!grid_.reachable(i, j, 2)) throw StencilError("graph derivative stencil leaves the grid at node (" +
                                                    std::to_string(i) + ", " + std::to_string(j) + ")");
  const std::size_t k = grid_.flat(i, j);
  if (!has_jet_[k]) throw StencilError("no derivative data at node (" + std::to_string(i) + ", " +
                                       std::to_string(j) + ")");
  GraphJet gj = jets_[k];
  // periodic wrap: report the logical coordinate
  gj.th1 = grid_.axis[0].coord(i);
  gj.th2 = grid_.axis[1].coord(j);
  return gj;
}

namespace {
bool all_equal(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}
}  // namespace

bool SurfaceGraph::f_constant() const { return f_.empty() || all_equal(f_); }
bool SurfaceGraph::fbar_constant() const { return fbar_.empty() || all_equal(fbar_); }

std::vector<Node> SurfaceGraph::nodes() const {
  std::vector<Node> out;
  out.reserve(grid_.size());
  for (int i = 0; i < grid_.axis[0].n; ++i)
    for (int j = 0; j < grid_.axis[1].n; ++j) out.push_back({i, j});
  return out;
}

// ---------------------------------------------------------------- frame

namespace {
PointGeometry geometry_at(const DoubleNullChart& chart, const GraphJet& gj) {
  return point_geometry(chart, gj.point());
}
}  // namespace

TangentFrame tangent_frame(const PointGeometry& pg, const GraphJet& gj) {
  TangentFrame t;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) t.B(i, j) = (i == j ? 1.0 : 0.0) - gj.df[i] * pg.b[j];
  t.detB = t.B.determinant();
  if (std::abs(t.detB) <= 1e-10)
    throw DegenerateGraphError("graph is degenerate: |det B| = " + std::to_string(std::abs(t.detB)));
  for (int i = 0; i < 2; ++i) {
    t.d[i] = Vec4(gj.df[i], gj.dfbar[i], i == 0 ? 1.0 : 0.0, i == 1 ? 1.0 : 0.0);
  }
  return t;
}

TangentFrame tangent_frame(const DoubleNullChart& chart, const SurfaceGraph& graph, const Node& n) {
  const GraphJet gj = graph.jet(n);
  return tangent_frame(geometry_at(chart, gj), gj);
}

Mat2 induced_metric(const PointGeometry& pg, const GraphJet& gj) {
  const TangentFrame t = tangent_frame(pg, gj);
  const Mat2 gd = t.B * pg.sc.gamma * t.B.transpose() +
                  2.0 * pg.Omega2 * (gj.df * gj.dfbar.transpose() + gj.dfbar * gj.df.transpose());
  if (!(gd(0, 0) > 0.0 && gd.determinant() > 0.0))
    throw NotSpacelikeError("surface is not spacelike at theta = (" + std::to_string(gj.th1) + ", " +
                            std::to_string(gj.th2) + ")");
  return gd;
}

Mat2 induced_metric(const DoubleNullChart& chart, const SurfaceGraph& graph, const Node& n) {
  const GraphJet gj = graph.jet(n);
  return induced_metric(geometry_at(chart, gj), gj);
}

namespace detail {
FrameCore<D2> checked_frame(const PointGeometry& pg, const GraphJet& gj) {
  induced_metric(pg, gj);  // degenerate-graph and spacelike gates
  FrameCore<D2> c = frame_core(frame_inputs_dual(pg, gj));
  if (!(c.D.v > 0.0))
    throw FrameDegeneracyError("null frame discriminant D = " + std::to_string(c.D.v) + " is not positive");
  return c;
}
}  // namespace detail

NullFrameSolution solve_null_frame(const PointGeometry& pg, const GraphJet& gj) {
  induced_metric(pg, gj);
  const auto c = detail::frame_core(detail::frame_inputs(pg, gj));
  if (!(c.D > 0.0))
    throw FrameDegeneracyError("null frame discriminant D = " + std::to_string(c.D) + " is not positive");
  NullFrameSolution s;
  s.e = Vec2(c.e[0], c.e[1]);
  s.ebar = Vec2(c.eb[0], c.eb[1]);
  s.eps = c.eps;
  s.epsbar = c.epsb;
  s.eps_vec = Vec2(c.ev[0], c.ev[1]);
  s.epsbar_vec = Vec2(c.ebv[0], c.ebv[1]);
  s.D = c.D;
  s.Omegadot2 = c.Omd2;
  const Vec2& b = pg.b;
  s.Ldot = Vec4(s.eps, 1.0, s.eps * b[0] + s.eps_vec[0], s.eps * b[1] + s.eps_vec[1]);
  s.Lbardot = Vec4(1.0, s.epsbar, b[0] + s.epsbar_vec[0], b[1] + s.epsbar_vec[1]);
  s.Ldot_p = s.Ldot / s.Omegadot2;
  s.Lbardot_p = s.Lbardot / s.Omegadot2;
  return s;
}

NullFrameSolution solve_null_frame(const DoubleNullChart& chart, const SurfaceGraph& graph,
                                   const Node& n) {
  const GraphJet gj = graph.jet(n);
  return solve_null_frame(geometry_at(chart, gj), gj);
}

std::array<double, 5> frame_system_residual(const PointGeometry& pg, const GraphJet& gj,
                                            const NullFrameSolution& sol) {
  const Mat4& g = pg.metric.g;
  const double gscale = g.cwiseAbs().maxCoeff();
  auto rel = [&](const Vec4& x, const Vec4& y) {
    return std::abs(x.dot(g * y)) / (gscale * x.cwiseAbs().maxCoeff() * y.cwiseAbs().maxCoeff());
  };
  const TangentFrame t = tangent_frame(pg, gj);
  std::array<double, 5> r{};
  r[0] = rel(sol.Ldot, sol.Ldot);
  r[1] = rel(sol.Lbardot, sol.Lbardot);
  r[2] = std::max(rel(sol.Ldot, t.d[0]), rel(sol.Ldot, t.d[1]));
  r[3] = std::max(rel(sol.Lbardot, t.d[0]), rel(sol.Lbardot, t.d[1]));
  r[4] = std::abs(sol.Lbardot.dot(g * sol.Ldot_p) - 2.0) / 2.0;
  return r;
}

// ---------------------------------------------------------------- closed forms

SurfaceGeometrySample second_fundamental_forms(const PointGeometry& pg, const GraphJet& gj) {
  using detail::sym;
  const auto c = detail::checked_frame(pg, gj);
  const StructureCoefficients& sc = pg.sc;
  const Mat2& gam = sc.gamma;
  const Mat2& chi = sc.chi;
  const Mat2& chb = sc.chibar;
  const Vec2& eta = sc.eta;
  const Vec2& etb = sc.etabar;
  const Vec2& b = pg.b;
  const Mat2& nb = pg.nabla_b;
  const double O2 = pg.Omega2;
  const Vec2& df = gj.df;
  const Vec2& dfb = gj.dfbar;

  const double eps = c.eps.v, epsb = c.epsb.v;
  const Vec2 ev = detail::vec_value(c.ev), ebv = detail::vec_value(c.ebv);
  const Mat2 Hf = detail::leaf_hessian(pg, gj.ddf, df);
  const Mat2 Hfb = detail::leaf_hessian(pg, gj.ddfbar, dfb);

  auto gdot = [&](const Vec2& u, const Vec2& v) { return u.dot(gam * v); };
  auto nb_dot = [&](const Vec2& v) -> Vec2 { return nb * (gam * v); };
  const Vec2 nbb = nb.transpose() * b;  // nabla_b b
  auto bil = [](const Mat2& m, const Vec2& u, const Vec2& v) { return u.dot(m * v); };

  SurfaceGeometrySample out;
  out.gdot = induced_metric(pg, gj);
  out.Omegadot2 = c.Omd2.v;

  out.chibar = chb + epsb * chi + (gdot(ebv, b) - 2.0 * O2 * epsb) * Hf - 2.0 * O2 * Hfb -
               2.0 * sym(chi * ebv + 2.0 * O2 * etb, dfb) +
               2.0 * sym(nb_dot(ebv) - chb * ebv - chb * b - 2.0 * O2 * epsb * eta - epsb * (chi * b), df) +
               2.0 * (2.0 * O2 * eta.dot(ebv) + bil(chi, b, ebv) + 2.0 * O2 * etb.dot(b)) * sym(df, dfb) -
               4.0 * sc.omega * O2 * dfb * dfb.transpose() +
               (2.0 * bil(chb, b, ebv) + bil(chb, b, b) + epsb * bil(chi, b, b) + 4.0 * O2 * epsb * eta.dot(b) -
                gdot(nbb, ebv) + gdot(pg.ds_b, ebv) - 4.0 * O2 * epsb * sc.omegabar) *
                   df * df.transpose();

  out.chi = chi + eps * chb + (gdot(ev, b) - 2.0 * O2) * Hf - 2.0 * O2 * eps * Hfb -
            2.0 * sym(chi * ev + 2.0 * O2 * eps * etb, dfb) +
            2.0 * sym(nb_dot(ev) - chb * ev - eps * (chb * b) - chi * b - 2.0 * O2 * eta, df) +
            2.0 * (2.0 * O2 * eta.dot(ev) + bil(chi, b, ev) + 2.0 * O2 * eps * etb.dot(b)) * sym(df, dfb) -
            4.0 * eps * sc.omega * O2 * dfb * dfb.transpose() +
            (2.0 * bil(chb, b, ev) + bil(chi, b, b) + eps * bil(chb, b, b) + 4.0 * O2 * eta.dot(b) -
             gdot(nbb, ev) + gdot(pg.ds_b, ev) - 4.0 * O2 * sc.omegabar) *
                df * df.transpose();

  // torsion; needs surface derivatives of epsbar and its vector
  const Vec2 nb_eb = nb.transpose() * ebv;  // nabla_{epsbar} b
  Vec2 two_eta = 2.0 * O2 * eta + 2.0 * O2 * eps * epsb * etb - chi * ebv + epsb * (chi * ev) + chb * ev -
                 eps * (chb * ebv);
  two_eta += df * (4.0 * O2 * sc.omegabar - 2.0 * O2 * eta.dot(b) - 2.0 * O2 * eps * epsb * etb.dot(b) +
                   2.0 * O2 * eta.dot(ebv) - 2.0 * O2 * epsb * eta.dot(ev) + bil(chi, b, ebv) -
                   epsb * bil(chi, b, ev) + bil(chb, ebv, ev) - bil(chb, b, ev) + eps * bil(chb, b, ebv) -
                   gdot(nb_eb, ev));
  two_eta += dfb * (-2.0 * O2 * etb.dot(ev) + 2.0 * O2 * eps * etb.dot(ebv) + 4.0 * O2 * eps * epsb * sc.omega +
                    bil(chi, ebv, ev));
  const Vec2 gev = gam * ev;
  for (int i = 0; i < 2; ++i) {
    double acc = 2.0 * O2 * eps * c.epsb.d[i];
    for (int k = 0; k < 2; ++k) {
      double dk = c.ebv[k].d[i];
      for (int m = 0; m < 2; ++m) dk += pg.gamma2[k][i][m] * ebv[m];
      acc += dk * gev[k];
    }
    two_eta[i] += acc;
  }
  out.eta = two_eta / (2.0 * out.Omegadot2);
  return out;
}

SurfaceGeometrySample second_fundamental_forms(const DoubleNullChart& chart, const SurfaceGraph& graph,
                                               const Node& n) {
  const GraphJet gj = graph.jet(n);
  return second_fundamental_forms(geometry_at(chart, gj), gj);
}

// ---------------------------------------------------------------- specialisations

SurfaceGeometrySample specialization_case1(const PointGeometry& pg, const GraphJet& gj) {
  using detail::sym;
  const StructureCoefficients& sc = pg.sc;
  const double O2 = pg.Omega2;
  const Vec2& dfb = gj.dfbar;
  const Mat2& gi = sc.gamma_inv;
  const double epsb = -O2 * dfb.dot(gi * dfb);
  const Mat2 Hfb = detail::leaf_hessian(pg, gj.ddfbar, dfb);
  SurfaceGeometrySample out;
  out.gdot = sc.gamma;
  out.Omegadot2 = O2;
  out.chi = sc.chi;
  out.chibar = sc.chibar + epsb * sc.chi - 2.0 * O2 * Hfb - 4.0 * O2 * sym(sc.etabar, dfb) -
               4.0 * sc.omega * O2 * dfb * dfb.transpose() + 4.0 * O2 * sym(dfb, sc.chi * (gi * dfb));
  out.eta = sc.eta + sc.chi * (gi * dfb);
  return out;
}

SurfaceGeometrySample specialization_case2(const PointGeometry& pg, const GraphJet& gj) {
  using detail::sym;
  const StructureCoefficients& sc = pg.sc;
  const double O2 = pg.Omega2;
  const Vec2& df = gj.df;
  const Vec2& b = pg.b;
  const Mat2& gam = sc.gamma;
  const Mat2& gi = sc.gamma_inv;
  const Mat2& chb = sc.chibar;
  const Mat2 chip = sc.chi_prime();
  const TangentFrame t = tangent_frame(pg, gj);
  const Vec2 u = t.B.inverse() * df;
  const double ep = -u.dot(gi * u);
  const Vec2 evp = -2.0 * (gi * u);
  const Mat2 Hf = detail::leaf_hessian(pg, gj.ddf, df);
  auto gdot = [&](const Vec2& x, const Vec2& y) { return x.dot(gam * y); };
  auto bil = [](const Mat2& m, const Vec2& x, const Vec2& y) { return x.dot(m * y); };
  const Vec2 nbb = pg.nabla_b.transpose() * b;

  SurfaceGeometrySample out;
  out.gdot = t.B * gam * t.B.transpose();
  out.Omegadot2 = O2;
  out.chibar = chb - 2.0 * sym(chb * b, df) + bil(chb, b, b) * df * df.transpose();
  const Mat2 chidot_p =
      chip + ep * chb + (gdot(b, evp) - 2.0) * Hf +
      2.0 * sym(pg.nabla_b * (gam * evp) - chb * evp - ep * (chb * b) - chip * b - 2.0 * sc.eta, df) +
      (2.0 * bil(chb, b, evp) + ep * bil(chb, b, b) + bil(chip, b, b) + 4.0 * sc.eta.dot(b) - gdot(nbb, evp) +
       gdot(pg.ds_b, evp) - 4.0 * sc.omegabar) *
          df * df.transpose();
  out.chi = O2 * chidot_p;
  out.eta = sc.eta + 0.5 * (chb * evp) + df * (2.0 * sc.omegabar - sc.eta.dot(b) - 0.5 * bil(chb, b, evp));
  return out;
}

SurfaceGeometrySample specialization_case1(const DoubleNullChart& chart, const SurfaceGraph& graph,
                                           const Node& n) {
  if (!graph.f_constant()) throw PreconditionError("case 1 needs f constant on the grid");
  const GraphJet gj = graph.jet(n);
  return specialization_case1(geometry_at(chart, gj), gj);
}

SurfaceGeometrySample specialization_case2(const DoubleNullChart& chart, const SurfaceGraph& graph,
                                           const Node& n) {
  if (!graph.fbar_constant()) throw PreconditionError("case 2 needs fbar constant on the grid");
  const GraphJet gj = graph.jet(n);
  return specialization_case2(geometry_at(chart, gj), gj);
}

SurfacePlacement default_placement(const DoubleNullChart& chart) {
  const Rectangle& r = chart.rectangle();
  SurfacePlacement p;
  p.s0 = r.s_min + 0.3 * (r.s_max - r.s_min);
  p.sbar0 = r.sbar_min + 0.3 * (r.sbar_max - r.sbar_min);
  p.centre = chart.topology().kind == TopologyKind::spherical_patch ? Vec2(1.57, 1.0) : Vec2(1.0, 2.0);
  p.half = 0.5;
  return p;
}

SurfaceGraph random_graph(const ThetaGrid& grid, std::uint64_t seed, double s0, double sbar0, double amplitude) {
  Rng rng(seed);
  const TrigPoly p = TrigPoly::random(rng, 4, amplitude, s0);
  const TrigPoly q = TrigPoly::random(rng, 4, amplitude, sbar0);
  return SurfaceGraph::from_functions(grid, p, q);
}

SurfaceInvariants surface_invariants(const DoubleNullChart& chart, const SurfaceGraph& graph, const Node& n) {
  const GraphJet gj = graph.jet(n);
  const PointGeometry pg = point_geometry(chart, gj.point());
  const SurfaceGeometrySample s = second_fundamental_forms(pg, gj);
  const NullFrameSolution fr = solve_null_frame(pg, gj);
  const TangentFrame tf = tangent_frame(pg, gj);
  const Vec4 v(0.0, 0.0, fr.epsbar_vec[0], fr.epsbar_vec[1]);
  const Vec4 gv = pg.metric.g * v;
  const Vec2 w(gv.dot(tf.d[0]), gv.dot(tf.d[1]));
  SurfaceInvariants out;
  out.tr_chi = s.tr_chi();
  out.tr_chibar = s.tr_chibar();
  out.chi_hat_norm2 = s.chi_hat_norm2();
  out.chibar_hat_norm2 = s.chibar_hat_norm2();
  out.eta_epsbar = s.eta.dot(s.gdot_inv() * w) / s.Omegadot2;
  return out;
}

double max_component_difference(const SurfaceGeometrySample& a, const SurfaceGeometrySample& b) {
  double m = (a.chi - b.chi).cwiseAbs().maxCoeff();
  m = std::max(m, (a.chibar - b.chibar).cwiseAbs().maxCoeff());
  m = std::max(m, (a.eta - b.eta).cwiseAbs().maxCoeff());
  return m;
}

}  // namespace nulltube
