#include <cmath>
#include <numbers>

#include "doctest.h"
#include "json.hpp"
#include "nulltube/charts.hpp"
#include "nulltube/connection.hpp"
#include "nulltube/errors.hpp"
#include "nulltube/expr.hpp"
#include "nulltube/spline.hpp"

using namespace nulltube;
using doctest::Approx;

namespace {

MetricSample constant_sample(double omega, Vec2 b, Mat2 gamma) {
  MetricSample m;
  m.omega = Jet2(omega);
  m.b = {Jet2(b[0]), Jet2(b[1])};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m.gamma[i][j] = Jet2(gamma(i, j));
  return m;
}

// Samples an analytic chart on a grid in the loaded-chart file format.
nlohmann::json tabulate(const DoubleNullChart& chart, std::array<double, 2> s, std::array<double, 2> sb,
                        std::array<double, 2> t1, int n) {
  nlohmann::json doc;
  doc["name"] = "tabulated";
  doc["topology"] = "spherical_patch";
  doc["domain"] = {{"s", {s[0], s[1]}},
                   {"sbar", {sb[0], sb[1]}},
                   {"theta1", {t1[0], t1[1]}},
                   {"theta2", {0.0, 2.0 * std::numbers::pi}}};
  doc["grid"] = {{"shape", {n, n, n, n}}};
  std::vector<double> om, g11, g12, g22;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          const ChartPoint p{s[0] + (s[1] - s[0]) * a / (n - 1), sb[0] + (sb[1] - sb[0]) * b / (n - 1),
                             t1[0] + (t1[1] - t1[0]) * c / (n - 1), 2.0 * std::numbers::pi * d / n};
          const MetricSample m = chart.eval(p);
          om.push_back(m.omega.v);
          g11.push_back(m.gamma[0][0].v);
          g12.push_back(m.gamma[0][1].v);
          g22.push_back(m.gamma[1][1].v);
        }
  doc["omega"] = om;
  doc["gamma11"] = g11;
  doc["gamma12"] = g12;
  doc["gamma22"] = g22;
  return doc;
}

}  // namespace

TEST_CASE("minkowski sample at r = 4") {
  const DoubleNullChart mk = make_builtin_chart("minkowski");
  const MetricSample m = mk.eval({1.0, 3.0, std::numbers::pi / 2, 0.0});
  CHECK(m.omega.v == Approx(1.0));
  CHECK(m.b[0].v == 0.0);
  CHECK(m.b[1].v == 0.0);
  CHECK(m.gamma[0][0].v == Approx(16.0));
  CHECK(m.gamma[1][1].v == Approx(16.0));
  CHECK(m.gamma[0][1].v == Approx(0.0));
  // d_s gamma11 = 2 r
  CHECK(m.gamma[0][0].d[S] == Approx(8.0));
}

TEST_CASE("r = 0 lies outside the minkowski chart") {
  const DoubleNullChart mk = make_builtin_chart("minkowski");
  CHECK_THROWS_AS(mk.eval({0.0, 0.0, 1.0, 0.0}), DomainError);
}

TEST_CASE("metric assembly") {
  SUBCASE("b = 0") {
    const MetricMatrix g = assemble_metric(constant_sample(1.0, Vec2::Zero(), 16.0 * Mat2::Identity()));
    CHECK(g.g(S, SBAR) == Approx(2.0));
    CHECK(g.g(S, S) == 0.0);
    CHECK(g.g(TH1, TH1) == Approx(16.0));
    CHECK(g.g(TH2, TH2) == Approx(16.0));
    CHECK(g.g(TH1, TH2) == 0.0);
  }
  SUBCASE("b = (beta, 0), gamma = I") {
    const double beta = 0.3;
    const MetricMatrix g = assemble_metric(constant_sample(1.0, Vec2(beta, 0.0), Mat2::Identity()));
    CHECK(g.g(S, S) == Approx(beta * beta));
    CHECK(g.g(S, TH1) == Approx(-beta));
    CHECK(g.g(S, TH2) == Approx(0.0));
  }
  SUBCASE("inverse") {
    Mat2 gam;
    gam << 2.0, 0.3, 0.3, 1.5;
    const MetricMatrix g = assemble_metric(constant_sample(1.3, Vec2(0.2, -0.4), gam));
    CHECK((g.g * g.inverse - Mat4::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(g.inverse(S, S) == Approx(0.0));
    CHECK(g.inverse(SBAR, SBAR) == Approx(0.0));
  }
}

TEST_CASE("eikonal residuals of the builtin charts") {
  for (const ChartInfo& info : builtin_charts()) {
    const DoubleNullChart chart = make_builtin_chart(info.name);
    double worst = 0.0;
    for (const ChartPoint& p : sample_points(chart, 5, 5, 0.05)) worst = std::max(worst, verify_eikonal(chart, p).max());
    CAPTURE(std::string(info.name));
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("kruskal area radius solves (r/2M - 1) exp(r/2M) = s sbar") {
  const DoubleNullChart sch = make_builtin_chart("schwarzschild_kruskal", {{"M", 1.5}});
  for (double s : {-0.4, 0.0, 0.3, 1.2})
    for (double sb : {-0.3, 0.0, 0.5, 1.4}) {
      const MetricSample m = sch.eval({s, sb, 1.0, 0.0});
      const double r = std::sqrt(m.gamma[0][0].v);
      const double x = r / 3.0;
      CHECK((x - 1.0) * std::exp(x) == Approx(s * sb).epsilon(1e-12));
      CHECK(m.omega2() > 0.0);
    }
  // horizon locus s = 0: r = 2M
  CHECK(std::sqrt(sch.eval({0.0, 0.7, 1.0, 0.0}).gamma[0][0].v) == Approx(3.0).epsilon(1e-14));
}

TEST_CASE("curvature of the vacuum charts") {
  auto worst_ricci = [](const DoubleNullChart& chart, bool relative) {
    double worst = 0.0;
    for (const ChartPoint& p : sample_points(chart, 4, 3, 0.05)) {
      const CurvatureSample c = ricci(chart, p);
      double scale = 1.0;
      if (relative)
        for (const auto& a : c.gamma)
          for (const auto& b : a)
            for (double x : b) scale = std::max(scale, x * x);
      worst = std::max(worst, c.ricci.cwiseAbs().maxCoeff() / scale);
    }
    return worst;
  };
  CHECK(worst_ricci(make_builtin_chart("minkowski"), false) < 1e-9);
  CHECK(worst_ricci(make_builtin_chart("minkowski_shifted", {{"k", 0.0}}), false) < 1e-9);
  CHECK(worst_ricci(make_builtin_chart("schwarzschild_kruskal"), false) < 1e-8);
  // with k != 0 the Christoffels grow like s^2; measure against their square
  CHECK(worst_ricci(make_builtin_chart("minkowski_shifted"), true) < 1e-12);
  const MetricSample m = make_builtin_chart("minkowski_shifted").eval({2.0, 3.0, 1.0, 0.0});
  CHECK(m.b[1].v == Approx(0.1 + 0.02 * 2.0));
}

TEST_CASE("constant chart has vanishing Christoffels") {
  const DoubleNullChart c = make_builtin_chart("constant", {{"b1", 0.3}, {"g12", 0.2}, {"omega", 1.4}});
  const Christoffel G = christoffel(c, {0.1, 0.2, 0.3, 0.4});
  double worst = 0.0;
  for (const auto& a : G)
    for (const auto& b : a)
      for (double x : b) worst = std::max(worst, std::abs(x));
  CHECK(worst == 0.0);
}

TEST_CASE("lowered Christoffels are symmetric in the last two slots") {
  const DoubleNullChart chart = make_builtin_chart("torus_generic");
  const ChartPoint p{0.3, 0.4, 1.0, 2.0};
  const Christoffel G = christoffel(chart, p);
  const Mat4 g = assemble_metric(chart.eval(p)).g;
  double worst = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) {
        double x = 0.0, y = 0.0;
        for (int m = 0; m < 4; ++m) {
          x += g(a, m) * G[m][b][c];
          y += g(a, m) * G[m][c][b];
        }
        worst = std::max(worst, std::abs(x - y));
      }
  CHECK(worst < 1e-14);
}

TEST_CASE("unknown charts and parameters are configuration errors") {
  CHECK_THROWS_AS(resolve_chart("no-such-chart", {}), ConfigError);
  CHECK_THROWS_AS(make_builtin_chart("schwarzschild_kruskal", {{"M", -1.0}}), ConfigError);
  CHECK_THROWS_AS(make_builtin_chart("minkowski", {{"bogus", 1.0}}), ConfigError);
}

TEST_CASE("loaded chart reproduces the analytic chart") {
  const DoubleNullChart sch = make_builtin_chart("schwarzschild_kruskal");
  const auto doc = tabulate(sch, {0.1, 0.5}, {0.2, 0.6}, {0.8, 2.3}, 17);
  const DoubleNullChart loaded = chart_from_json(doc, "test");
  const ChartPoint p{0.27, 0.41, 1.4, 0.9};
  const MetricSample a = sch.eval(p), b = loaded.eval(p);
  CHECK(b.omega.v == Approx(a.omega.v).epsilon(1e-6));
  CHECK(b.gamma[0][0].v == Approx(a.gamma[0][0].v).epsilon(1e-6));
  CHECK(b.gamma[1][1].v == Approx(a.gamma[1][1].v).epsilon(1e-4));
  CHECK(b.gamma[0][0].d[S] == Approx(a.gamma[0][0].d[S]).epsilon(1e-4));
  CHECK(verify_eikonal(loaded, p).max() < 1e-10);
}

TEST_CASE("corrupted loaded charts are rejected") {
  const DoubleNullChart mk = make_builtin_chart("minkowski");
  auto doc = tabulate(mk, {1.0, 2.0}, {1.0, 2.0}, {0.8, 2.3}, 5);
  SUBCASE("non-symmetric gamma") {
    std::vector<double> g21 = doc["gamma12"];
    for (double& x : g21) x += 0.5;
    doc["gamma21"] = g21;
    const DoubleNullChart bad = chart_from_json(doc, "test");
    CHECK_THROWS_AS(bad.eval({1.5, 1.5, 1.5, 1.0}), InvariantViolation);
    CHECK_THROWS_AS(verify_eikonal(bad, {1.5, 1.5, 1.5, 1.0}), InvariantViolation);
  }
  SUBCASE("missing key") {
    doc.erase("omega");
    CHECK_THROWS_AS(chart_from_json(doc, "test"), LoadError);
  }
  SUBCASE("wrong array length") {
    doc["gamma22"] = std::vector<double>{1.0, 2.0};
    CHECK_THROWS_AS(chart_from_json(doc, "test"), LoadError);
  }
  SUBCASE("negative omega") {
    std::vector<double> om = doc["omega"];
    om[3] = -1.0;
    doc["omega"] = om;
    CHECK_THROWS_AS(chart_from_json(doc, "test"), LoadError);
  }
}

TEST_CASE("cubic spline interpolates cubics exactly on periodic-free axes") {
  std::vector<SplineAxis> axes = {{0.0, 0.25, 9, false}, {1.0, 0.5, 9, false}};
  std::vector<double> v;
  auto f = [](double x, double y) { return 1.0 + x - 2.0 * y + x * y + 0.5 * x * x * x - y * y; };
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j) v.push_back(f(0.25 * i, 1.0 + 0.5 * j));
  const CubicSpline sp(axes, v);
  const double x[2] = {0.63, 2.71};
  double grad[2];
  CHECK(sp.eval(x, grad) == Approx(f(x[0], x[1])).epsilon(1e-10));
  CHECK(grad[0] == Approx(1.0 + x[1] + 1.5 * x[0] * x[0]).epsilon(1e-9));
  CHECK(grad[1] == Approx(-2.0 + x[0] - 2.0 * x[1]).epsilon(1e-9));
}

TEST_CASE("periodic spline converges at fourth order") {
  auto err = [](int n) {
    std::vector<SplineAxis> axes = {{0.0, 2.0 * std::numbers::pi / n, n, true}};
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(std::sin(2.0 * std::numbers::pi * i / n));
    const CubicSpline sp(axes, v);
    double e = 0.0;
    for (int k = 0; k < 50; ++k) {
      const double x = 0.123 * k;
      e = std::max(e, std::abs(sp.eval(&x) - std::sin(x)));
    }
    return e;
  };
  CHECK(std::log2(err(32) / err(64)) > 3.7);
}

TEST_CASE("expressions") {
  const Expression e("sin(th1)^2 + 0.5*cos(theta2) - sbar/2 + s");
  CHECK(e(0.3, 1.1, 2.0, 4.0) == Approx(std::pow(std::sin(0.3), 2) + 0.5 * std::cos(1.1) - 2.0 + 2.0));
  CHECK(e.uses("s"));
  CHECK(Expression("-2^2")(0, 0) == Approx(-4.0));
  CHECK(Expression("2*pi")(0, 0) == Approx(2.0 * std::numbers::pi));
  CHECK_THROWS_AS(Expression("sin(th1"), ConfigError);
  CHECK_THROWS_AS(Expression("foo + 1"), ConfigError);
}
