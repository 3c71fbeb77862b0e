#include <cmath>
#include <numbers>

#include "doctest.h"
#include "json.hpp"
#include "nulltube/errors.hpp"
#include "nulltube/random.hpp"
#include "nulltube/surface.hpp"

using namespace nulltube;
using doctest::Approx;

namespace {

using Vec3 = Eigen::Vector3d;

// Null second fundamental forms of a graph in minkowski, computed from its
// Cartesian embedding t = fbar - f, r = f + fbar with the flat connection.
struct CartesianForms {
  Mat2 gdot, chi, chibar;
};

CartesianForms cartesian_forms(const GraphJet& j) {
  const double t1 = j.th1, t2 = j.th2;
  const Vec3 n(std::sin(t1) * std::cos(t2), std::sin(t1) * std::sin(t2), std::cos(t1));
  const Vec3 n1(std::cos(t1) * std::cos(t2), std::cos(t1) * std::sin(t2), -std::sin(t1));
  const Vec3 n2(-std::sin(t1) * std::sin(t2), std::sin(t1) * std::cos(t2), 0.0);
  const Vec3 n11 = -n;
  const Vec3 n12(-std::cos(t1) * std::sin(t2), std::cos(t1) * std::cos(t2), 0.0);
  const Vec3 n22(-std::sin(t1) * std::cos(t2), -std::sin(t1) * std::sin(t2), 0.0);
  const Vec3 dn[2] = {n1, n2};
  const Vec3 ddn[2][2] = {{n11, n12}, {n12, n22}};
  const double r = j.f + j.fbar;
  const Vec2 dr = j.df + j.dfbar, dt = j.dfbar - j.df;
  const Mat2 ddr = j.ddf + j.ddfbar, ddt = j.ddfbar - j.ddf;

  Vec4 T[2], X2[2][2];
  for (int a = 0; a < 2; ++a) {
    const Vec3 sp = dr[a] * n + r * dn[a];
    T[a] << dt[a], sp;
    for (int b = 0; b < 2; ++b) {
      const Vec3 s2 = ddr(a, b) * n + dr[a] * dn[b] + dr[b] * dn[a] + r * ddn[a][b];
      X2[a][b] << ddt(a, b), s2;
    }
  }
  const Eigen::DiagonalMatrix<double, 4> eta(Eigen::Vector4d(-1.0, 1.0, 1.0, 1.0));
  auto dot = [&](const Vec4& x, const Vec4& y) { return x.dot(eta * y); };

  Eigen::Matrix<double, 2, 4> M;
  M.row(0) = (eta * T[0]).transpose();
  M.row(1) = (eta * T[1]).transpose();
  const Eigen::Matrix<double, 4, 2> K = Eigen::FullPivLU<Eigen::Matrix<double, 2, 4>>(M).kernel();
  // null combinations a K0 + K1
  const double A = dot(K.col(0), K.col(0)), B = dot(K.col(0), K.col(1)), C = dot(K.col(1), K.col(1));
  const double disc = std::sqrt(B * B - A * C);
  Vec4 N[2];
  for (int q = 0; q < 2; ++q) N[q] = ((-B + (q ? disc : -disc)) / A) * K.col(0) + K.col(1);
  // ds = (dr - dt) / 2, dsbar = (dr + dt) / 2 on a vector
  auto ds = [&](const Vec4& v) { return 0.5 * (n.dot(v.tail<3>()) - v[0]); };
  auto dsb = [&](const Vec4& v) { return 0.5 * (n.dot(v.tail<3>()) + v[0]); };
  // L has dsbar = 1 and small ds; Lbar the reverse
  const int il = std::abs(ds(N[0]) / dsb(N[0])) < std::abs(ds(N[1]) / dsb(N[1])) ? 0 : 1;
  const Vec4 L = N[il] / dsb(N[il]);
  const Vec4 Lb = N[1 - il] / ds(N[1 - il]);

  CartesianForms out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      out.gdot(a, b) = dot(T[a], T[b]);
      out.chi(a, b) = -dot(L, X2[a][b]);
      out.chibar(a, b) = -dot(Lb, X2[a][b]);
    }
  return out;
}

ThetaGrid patch(int n) { return ThetaGrid::patch(n, 1.4, 0.8, 0.3, 0.3); }

SurfaceGraph random_surface(std::uint64_t seed, double s0, double sb0, double amp, int n = 16) {
  return random_graph(patch(n), seed, s0, sb0, amp);
}

}  // namespace

TEST_CASE("leaf of the foliation") {
  const DoubleNullChart mk = make_builtin_chart("minkowski");
  const SurfaceGraph g = SurfaceGraph::from_functions(
      patch(16), [](double, double) { return 2.0; }, [](double, double) { return 3.0; });
  const Node n{7, 9};
  const GraphJet gj = g.jet(n);
  const PointGeometry pg = point_geometry(mk, gj.point());
  const TangentFrame tf = tangent_frame(pg, gj);
  CHECK((tf.B - Mat2::Identity()).norm() == 0.0);
  const NullFrameSolution fr = solve_null_frame(pg, gj);
  CHECK(fr.e.norm() == 0.0);
  CHECK(fr.ebar.norm() == 0.0);
  CHECK(fr.eps == 0.0);
  CHECK(fr.epsbar == 0.0);
  CHECK(fr.Omegadot2 == Approx(pg.Omega2));
  const SurfaceGeometrySample s = second_fundamental_forms(pg, gj);
  CHECK((s.gdot - pg.sc.gamma).norm() == 0.0);
  CHECK((s.chi - pg.sc.chi).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((s.chibar - pg.sc.chibar).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((s.eta - pg.sc.eta).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(s.tr_chi() == Approx(2.0 / 5.0));
  CHECK(s.tr_chibar() == Approx(2.0 / 5.0));
}

TEST_CASE("tangent frame") {
  SUBCASE("b = 0 gives B = I for any graph") {
    const DoubleNullChart mk = make_builtin_chart("minkowski");
    const SurfaceGraph g = random_surface(3, 2.0, 3.0, 0.1);
    CHECK((tangent_frame(mk, g, Node{5, 5}).B - Mat2::Identity()).norm() == 0.0);
  }
  SUBCASE("det B = 1 - f_i b^i") {
    const DoubleNullChart sh = make_builtin_chart("minkowski_shifted");
    const SurfaceGraph g = random_surface(4, 2.0, 3.0, 0.1);
    const GraphJet gj = g.jet(6, 8);
    const PointGeometry pg = point_geometry(sh, gj.point());
    const TangentFrame tf = tangent_frame(pg, gj);
    CHECK(gj.df.norm() > 1e-3);
    CHECK((tf.B - Mat2::Identity()).norm() > 1e-4);
    CHECK(tf.B.determinant() == Approx(1.0 - gj.df.dot(pg.b)).epsilon(1e-14));
    CHECK(tf.detB == Approx(1.0 - gj.df.dot(pg.b)).epsilon(1e-14));
  }
}

TEST_CASE("induced metric equals the pullback of g") {
  for (const char* name : {"minkowski", "minkowski_shifted", "schwarzschild_kruskal"}) {
    const DoubleNullChart chart = make_builtin_chart(name);
    const SurfacePlacement pl = default_placement(chart);
    const SurfaceGraph g = random_surface(5, pl.s0, pl.sbar0, 0.1);
    for (const Node& n : {Node{3, 4}, Node{10, 12}}) {
      const GraphJet gj = g.jet(n);
      const PointGeometry pg = point_geometry(chart, gj.point());
      const TangentFrame tf = tangent_frame(pg, gj);
      const Mat4& G = pg.metric.g;
      Mat2 pull;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) pull(a, b) = tf.d[a].dot(G * tf.d[b]);
      CAPTURE(std::string(name));
      CHECK((induced_metric(pg, gj) - pull).cwiseAbs().maxCoeff() < 1e-12 * pull.cwiseAbs().maxCoeff());
    }
  }
}

TEST_CASE("outgoing cone sections: frame in closed form") {
  const DoubleNullChart sch = make_builtin_chart("schwarzschild_kruskal");
  const ThetaGrid grid = patch(16);
  Rng rng(11);
  const TrigPoly q = TrigPoly::random(rng, 3, 0.1, 0.6);
  const SurfaceGraph g = SurfaceGraph::from_functions(grid, [](double, double) { return 0.4; }, q);
  const GraphJet gj = g.jet(8, 6);
  const PointGeometry pg = point_geometry(sch, gj.point());
  const NullFrameSolution fr = solve_null_frame(pg, gj);
  const Mat2 gi = pg.sc.gamma_inv;
  CHECK(std::abs(fr.eps) < 1e-30);
  CHECK(fr.epsbar == Approx(-pg.Omega2 * gj.dfbar.dot(gi * gj.dfbar)).epsilon(1e-13));
  CHECK((fr.epsbar_vec + 2.0 * pg.Omega2 * gi * gj.dfbar).norm() < 1e-14);
  CHECK(fr.Omegadot2 == Approx(pg.Omega2).epsilon(1e-14));
  const SurfaceGeometrySample s = second_fundamental_forms(pg, gj);
  CHECK((s.chi - pg.sc.chi).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(s.tr_chi() == Approx(pg.sc.tr_chi()).epsilon(1e-12));
  CHECK((s.eta - pg.sc.eta - pg.sc.chi * gi * gj.dfbar).norm() < 1e-12);
}

TEST_CASE("minkowski cone sections keep tr chi = 2/r") {
  const DoubleNullChart mk = make_builtin_chart("minkowski");
  Rng rng(2);
  const TrigPoly q = TrigPoly::random(rng, 4, 0.2, 3.0);
  const SurfaceGraph g = SurfaceGraph::from_functions(patch(16), [](double, double) { return 2.0; }, q);
  for (const Node& n : g.nodes()) {
    const SurfaceGeometrySample s = second_fundamental_forms(mk, g, n);
    CHECK(s.tr_chi() == Approx(2.0 / (2.0 + g.fbar(n.i, n.j))).epsilon(1e-12));
  }
}

TEST_CASE("null frame solves its defining system") {
  for (const char* name : {"schwarzschild_kruskal", "minkowski_shifted", "torus_generic"}) {
    const DoubleNullChart chart = make_builtin_chart(name);
    const SurfacePlacement pl = default_placement(chart);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const SurfaceGraph g = random_graph(ThetaGrid::patch(16, pl.centre[0], pl.centre[1], pl.half, pl.half), seed,
                                          pl.s0, pl.sbar0, 0.1);
      for (const Node& n : g.nodes()) {
        const GraphJet gj = g.jet(n);
        const PointGeometry pg = point_geometry(chart, gj.point());
        const auto r = frame_system_residual(pg, gj, solve_null_frame(pg, gj));
        CHECK(*std::max_element(r.begin(), r.end()) < 1e-10);
      }
    }
  }
}

TEST_CASE("closed forms against the Cartesian embedding of minkowski") {
  const DoubleNullChart mk = make_builtin_chart("minkowski");
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const SurfaceGraph g = random_surface(seed, 2.0, 3.0, 0.15);
    for (const Node& n : {Node{2, 3}, Node{8, 8}, Node{13, 1}}) {
      const GraphJet gj = g.jet(n);
      const SurfaceGeometrySample s = second_fundamental_forms(point_geometry(mk, gj.point()), gj);
      const CartesianForms c = cartesian_forms(gj);
      CHECK((s.gdot - c.gdot).cwiseAbs().maxCoeff() < 1e-11);
      CHECK((s.chi - c.chi).cwiseAbs().maxCoeff() < 1e-11);
      CHECK((s.chibar - c.chibar).cwiseAbs().maxCoeff() < 1e-11);
    }
  }
}

TEST_CASE("closed forms against the oracle, fourth order") {
  for (const char* name : {"minkowski_shifted", "schwarzschild_kruskal"}) {
    const DoubleNullChart chart = make_builtin_chart(name);
    const SurfacePlacement pl = default_placement(chart);
    auto err = [&](int n) {
      return compare_with_oracle(
                 chart, random_graph(ThetaGrid::patch(n, pl.centre[0], pl.centre[1], pl.half, pl.half), 9, pl.s0,
                                     pl.sbar0, 0.05))
          .max();
    };
    const double e16 = err(16), e32 = err(32);
    CAPTURE(std::string(name));
    CHECK(e32 < 1e-5);
    CHECK(std::log2(e16 / e32) > 3.5);
  }
}

TEST_CASE("specialisations agree with the general evaluator") {
  for (const char* name : {"minkowski_shifted", "schwarzschild_kruskal", "torus_generic"}) {
    const DoubleNullChart chart = make_builtin_chart(name);
    const SurfacePlacement pl = default_placement(chart);
    const ThetaGrid grid = ThetaGrid::patch(16, pl.centre[0], pl.centre[1], pl.half, pl.half);
    Rng rng(21);
    const TrigPoly p = TrigPoly::random(rng, 4, 0.1, pl.s0);
    const TrigPoly q = TrigPoly::random(rng, 4, 0.1, pl.sbar0);
    const auto c1 = SurfaceGraph::from_functions(grid, [&](double, double) { return pl.s0; }, q);
    const auto c2 = SurfaceGraph::from_functions(grid, p, [&](double, double) { return pl.sbar0; });
    for (const Node& n : c1.nodes()) {
      CHECK(max_component_difference(specialization_case1(chart, c1, n), second_fundamental_forms(chart, c1, n)) < 1e-9);
      CHECK(max_component_difference(specialization_case2(chart, c2, n), second_fundamental_forms(chart, c2, n)) < 1e-9);
    }
    CHECK_THROWS_AS(specialization_case1(chart, c2, Node{1, 1}), PreconditionError);
    CHECK_THROWS_AS(specialization_case2(chart, c1, Node{1, 1}), PreconditionError);
  }
}

TEST_CASE("incoming cone sections with b = 0 keep chibar") {
  const DoubleNullChart sch = make_builtin_chart("schwarzschild_kruskal");
  Rng rng(5);
  const TrigPoly p = TrigPoly::random(rng, 4, 0.1, 0.5);
  const auto g = SurfaceGraph::from_functions(patch(16), p, [](double, double) { return 0.7; });
  for (const Node& n : {Node{4, 4}, Node{11, 2}}) {
    const GraphJet gj = g.jet(n);
    const PointGeometry pg = point_geometry(sch, gj.point());
    CHECK((specialization_case2(pg, gj).chibar - pg.sc.chibar).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("Pi route") {
  SUBCASE("constant chart, leaf") {
    const DoubleNullChart c = make_builtin_chart("constant", {{"b1", 0.2}});
    const auto g = SurfaceGraph::from_functions(
        ThetaGrid::torus(16), [](double, double) { return 0.5; }, [](double, double) { return -0.5; });
    const PiCoefficients pi = pi_coefficients(c, g, Node{3, 7});
    double m = pi.PL.cwiseAbs().maxCoeff() + pi.PLbar.cwiseAbs().maxCoeff() + pi.Pk_lbar.cwiseAbs().maxCoeff() +
               pi.PL_lbar.cwiseAbs().maxCoeff() + pi.PLbar_lbar.cwiseAbs().maxCoeff();
    for (const Mat2& x : pi.Pk) m += x.cwiseAbs().maxCoeff();
    CHECK(m < 1e-15);
  }
  SUBCASE("recomposition on generic graphs") {
    for (const char* name : {"minkowski_shifted", "schwarzschild_kruskal", "torus_generic"}) {
      const DoubleNullChart chart = make_builtin_chart(name);
      const SurfacePlacement pl = default_placement(chart);
      const SurfaceGraph g = random_graph(ThetaGrid::patch(16, pl.centre[0], pl.centre[1], pl.half, pl.half), 6,
                                          pl.s0, pl.sbar0, 0.1);
      for (const Node& n : {Node{2, 2}, Node{9, 13}}) {
        const GraphJet gj = g.jet(n);
        const PiCheck c = pi_consistency(point_geometry(chart, gj.point()), gj);
        CAPTURE(std::string(name));
        CHECK(c.tangent_residual < 1e-8);
        CHECK(c.lbar_residual < 1e-8);
        CHECK(c.chibar_residual < 1e-9);
        CHECK(c.chi_residual < 1e-9);
        CHECK(c.eta_residual < 1e-9);
      }
    }
  }
}

TEST_CASE("invariants across the angular relabelling") {
  const DoubleNullChart mk = make_builtin_chart("minkowski");
  const DoubleNullChart sh = make_builtin_chart("minkowski_shifted", {{"a", 0.2}, {"k", 0.05}});
  const auto psi = [](double s) { return 0.2 * s + 0.025 * s * s; };
  Rng rng(8);
  const TrigPoly p = TrigPoly::random(rng, 3, 0.1, 2.0);
  const TrigPoly q = TrigPoly::random(rng, 3, 0.1, 3.0);
  const auto phi_of = [&](double t1, double tp) {
    double ph = tp;
    for (int it = 0; it < 100; ++it) ph = tp - psi(p(t1, ph));
    return ph;
  };
  const double c1 = 1.1, cp = 0.9, cphi = phi_of(c1, cp);
  const auto g1 = SurfaceGraph::from_functions(ThetaGrid::patch(17, c1, cphi, 0.02, 0.02), p, q);
  const auto g2 = SurfaceGraph::from_functions(
      ThetaGrid::patch(17, c1, cp, 0.02, 0.02), [&](double t1, double tp) { return p(t1, phi_of(t1, tp)); },
      [&](double t1, double tp) { return q(t1, phi_of(t1, tp)); });
  const SurfaceInvariants a = surface_invariants(mk, g1, Node{8, 8});
  const SurfaceInvariants b = surface_invariants(sh, g2, Node{8, 8});
  CHECK(a.tr_chi == Approx(b.tr_chi).epsilon(1e-9));
  CHECK(a.tr_chibar == Approx(b.tr_chibar).epsilon(1e-9));
  CHECK(std::abs(a.chi_hat_norm2 - b.chi_hat_norm2) < 1e-10);
  CHECK(std::abs(a.chibar_hat_norm2 - b.chibar_hat_norm2) < 1e-10);
  CHECK(std::abs(a.eta_epsbar - b.eta_epsbar) < 1e-10);
}

TEST_CASE("graph differentiation") {
  SUBCASE("periodic grid, trigonometric data") {
    const auto g = SurfaceGraph::from_functions(
        ThetaGrid::torus(32), [](double a, double b) { return std::sin(a) * std::cos(2.0 * b); },
        [](double, double) { return 0.0; });
    const GraphJet j = g.jet(5, 9);
    const double a = j.th1, b = j.th2;
    CHECK(j.df[0] == Approx(std::cos(a) * std::cos(2.0 * b)).epsilon(1e-4));
    CHECK(j.df[1] == Approx(-2.0 * std::sin(a) * std::sin(2.0 * b)).epsilon(2e-3));
    CHECK(j.ddf(0, 1) == Approx(-2.0 * std::cos(a) * std::sin(2.0 * b)).epsilon(1e-3));
    CHECK(j.ddf(1, 1) == Approx(-4.0 * std::sin(a) * std::cos(2.0 * b)).epsilon(1e-3));
  }
  SUBCASE("patch grid reaches only interior nodes") {
    const auto g = random_surface(1, 2.0, 3.0, 0.1);
    CHECK(g.nodes().size() == 256u);
    CHECK_NOTHROW(g.jet(0, 15));
    CHECK_THROWS_AS(g.jet(-4, 0), StencilError);
  }
  SUBCASE("random graphs are reproducible") {
    const auto a = random_surface(42, 2.0, 3.0, 0.1), b = random_surface(42, 2.0, 3.0, 0.1);
    CHECK(a.f(3, 3) == b.f(3, 3));
    CHECK(a.fbar(7, 1) == b.fbar(7, 1));
    CHECK(a.f(3, 3) != random_surface(43, 2.0, 3.0, 0.1).f(3, 3));
  }
}

TEST_CASE("surface files") {
  nlohmann::json doc = {{"theta", {{"topology", "patch"}, {"n", 16}, {"center", {1.2, 1.0}}, {"half", {0.2, 0.2}}}},
                        {"f", "2 + 0.05*sin(th1)*cos(th2)"},
                        {"fbar", "3"}};
  const SurfaceGraph g = surface_from_json(doc, "test");
  CHECK(g.f(0, 0) == Approx(2.0 + 0.05 * std::sin(g.th1(0)) * std::cos(g.th2(0))));
  CHECK(g.fbar_constant());
  doc["fbar"] = std::vector<double>{1.0, 2.0};
  CHECK_THROWS_AS(surface_from_json(doc, "test"), LoadError);
  doc["fbar"] = "3 +";
  CHECK_THROWS_AS(surface_from_json(doc, "test"), ConfigError);
  doc["fbar"] = "3";
  doc["theta"]["topology"] = "cylinder";
  CHECK_THROWS_AS(surface_from_json(doc, "test"), LoadError);
}

TEST_CASE("timelike graphs are rejected") {
  const DoubleNullChart mk = make_builtin_chart("minkowski");
  // t = fbar - f varying as fast as r along theta makes the surface non-spacelike
  const auto g = SurfaceGraph::from_functions(
      patch(16), [](double a, double) { return 2.0 - 4.0 * (a - 1.4); }, [](double a, double) { return 3.0 + 4.0 * (a - 1.4); });
  CHECK_THROWS_AS(second_fundamental_forms(mk, g, Node{8, 8}), NotSpacelikeError);
}
