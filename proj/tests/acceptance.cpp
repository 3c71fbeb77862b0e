// End-to-end acceptance suite: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "nulltube/cli.hpp"
#include "nulltube/connection.hpp"
#include "nulltube/errors.hpp"
#include "nulltube/finder.hpp"
#include "nulltube/parallel.hpp"
#include "nulltube/random.hpp"
#include "nulltube/surface.hpp"
#include "nulltube/tube.hpp"

using namespace nulltube;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

const char* bundled[] = {"minkowski", "minkowski_shifted", "schwarzschild_kruskal"};

ThetaGrid test_grid(const DoubleNullChart& chart, int n) {
  const SurfacePlacement pl = default_placement(chart);
  return ThetaGrid::patch(n, pl.centre[0], pl.centre[1], pl.half, pl.half);
}

SurfaceGraph test_surface(const DoubleNullChart& chart, int n, std::uint64_t seed, double amp = 0.05) {
  const SurfacePlacement pl = default_placement(chart);
  return random_graph(test_grid(chart, n), seed, pl.s0, pl.sbar0, amp);
}

// 1. frame system residuals on random graphs
void criterion1() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (const char* name : bundled) {
    const DoubleNullChart chart = make_builtin_chart(name);
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      const SurfaceGraph g = test_surface(chart, 16, seed, 0.1);
      const std::vector<Node> nodes = g.nodes();
      std::vector<double> r(nodes.size());
      parallel_for(nodes.size(), [&](std::size_t k) {
        const GraphJet gj = g.jet(nodes[k]);
        const PointGeometry pg = point_geometry(chart, gj.point());
        const auto res = frame_system_residual(pg, gj, solve_null_frame(pg, gj));
        r[k] = *std::max_element(res.begin(), res.end());
      });
      for (double x : r) worst = std::max(worst, x);
    }
  }
  const double t = seconds_since(t0);
  report(1, worst < 1e-10 && t < 10.0, fmt("max relative frame residual %.3e over 300 graphs, %.2f s", worst, t));
}

// 2. closed forms against the oracle under refinement
void criterion2() {
  const auto t0 = Clock::now();
  bool pass = true;
  std::string detail;
  for (const char* name : {"minkowski", "minkowski_shifted", "schwarzschild_kruskal", "torus_generic"}) {
    const DoubleNullChart chart = make_builtin_chart(name);
    double e[3];
    int k = 0;
    for (int n : {32, 64, 128}) e[k++] = compare_with_oracle(chart, test_surface(chart, n, 7)).max();
    const double o1 = std::log2(e[0] / e[1]), o2 = std::log2(e[1] / e[2]);
    pass = pass && e[1] < 1e-6 && o1 >= 3.5 && o2 >= 3.5;
    detail += std::string(name) + fmt(" err64 %.2e orders %.2f %.2f; ", e[1], o1, o2);
  }
  const double t = seconds_since(t0);
  report(2, pass && t < 120.0, detail + fmt("%.1f s", t));
}

// 3. specialised evaluators against the general one
void criterion3() {
  double worst1 = 0.0, worst2 = 0.0;
  for (const char* name : bundled) {
    const DoubleNullChart chart = make_builtin_chart(name);
    const SurfacePlacement pl = default_placement(chart);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      Rng rng(seed);
      const TrigPoly p = TrigPoly::random(rng, 4, 0.05, pl.s0);
      const TrigPoly q = TrigPoly::random(rng, 4, 0.05, pl.sbar0);
      const ThetaGrid grid = test_grid(chart, 16);
      const auto c1 = SurfaceGraph::from_functions(grid, [&](double, double) { return pl.s0; }, q);
      const auto c2 = SurfaceGraph::from_functions(grid, p, [&](double, double) { return pl.sbar0; });
      for (const Node& n : c1.nodes()) {
        worst1 = std::max(worst1, max_component_difference(specialization_case1(chart, c1, n),
                                                           second_fundamental_forms(chart, c1, n)));
        worst2 = std::max(worst2, max_component_difference(specialization_case2(chart, c2, n),
                                                           second_fundamental_forms(chart, c2, n)));
      }
    }
  }
  report(3, worst1 < 1e-9 && worst2 < 1e-9, fmt("case 1 max diff %.3e, case 2 max diff %.3e (20 graphs per chart)", worst1, worst2));
}

// 4. Pi recomposition
void criterion4() {
  double tang = 0.0, lbar = 0.0, chib = 0.0;
  for (const char* name : {"minkowski", "minkowski_shifted", "schwarzschild_kruskal", "torus_generic"}) {
    const DoubleNullChart chart = make_builtin_chart(name);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const SurfaceGraph g = test_surface(chart, 16, seed, 0.1);
      for (const Node& n : g.nodes()) {
        const GraphJet gj = g.jet(n);
        const PiCheck c = pi_consistency(point_geometry(chart, gj.point()), gj);
        tang = std::max(tang, c.tangent_residual);
        lbar = std::max(lbar, c.lbar_residual);
        chib = std::max(chib, c.chibar_residual);
      }
    }
  }
  report(4, tang < 1e-8 && lbar < 1e-8 && chib < 1e-8,
         fmt("nabla d d %.3e, nabla d Lbar %.3e, chibar %.3e", tang, lbar, chib));
}

// 5. identity sweeps and Raychaudhuri convergence
void criterion5() {
  double sc = 0.0, lb = 0.0, ray = 0.0;
  int stencil = 0;
  for (const char* name : bundled) {
    const DoubleNullChart chart = make_builtin_chart(name);
    const auto pts = sample_points(chart, 8, 8, 0.02);
    std::vector<std::array<double, 3>> r(pts.size());
    std::vector<int> bad(pts.size(), 0);
    parallel_for(pts.size(), [&](std::size_t k) {
      try {
        r[k] = {scacs_residuals(chart, pts[k]).max(), lie_b_residual(chart, pts[k]),
                raychaudhuri_residual(chart, pts[k])};
      } catch (const StencilError&) {
        r[k] = {0, 0, 0};
        bad[k] = 1;
      }
    });
    for (std::size_t k = 0; k < pts.size(); ++k) {
      sc = std::max(sc, r[k][0]);
      lb = std::max(lb, r[k][1]);
      ray = std::max(ray, r[k][2]);
      stencil += bad[k];
    }
  }
  // convergence under step refinement, steps chosen so truncation dominates
  double order = 1e300;
  struct Probe {
    const char* chart;
    double h0;
  };
  for (const Probe& pr : {Probe{"schwarzschild_kruskal", 0.16}, Probe{"minkowski_shifted", 1.6},
                          Probe{"torus_generic", 0.16}}) {
    const DoubleNullChart chart = make_builtin_chart(pr.chart);
    const Rectangle& rc = chart.rectangle();
    const ChartPoint p{rc.s_min + 0.4 * (rc.s_max - rc.s_min), rc.sbar_min + 0.45 * (rc.sbar_max - rc.sbar_min), 1.1, 0.7};
    const double e0 = raychaudhuri_residual(chart, p, pr.h0);
    const double e1 = raychaudhuri_residual(chart, p, pr.h0 / 2);
    const double e2 = raychaudhuri_residual(chart, p, pr.h0 / 4);
    order = std::min({order, std::log2(e0 / e1), std::log2(e1 / e2)});
  }
  report(5, sc < 1e-6 && lb < 1e-6 && ray < 1e-6 && stencil == 0 && order >= 3.5,
         fmt("scacs %.3e, lie_b %.3e, raychaudhuri %.3e, min order %.2f", sc, lb, ray, order) +
             ", stencil rows " + std::to_string(stencil));
}

// 6. Schwarzschild marginal section
void criterion6() {
  const auto t0 = Clock::now();
  const DoubleNullChart chart = make_builtin_chart("schwarzschild_kruskal");
  FinderOptions opt;
  opt.family = ConeFamily::incoming;
  const double sbar0 = 0.5;
  const ThetaGrid grid = ThetaGrid::patch(16, 1.57, 1.0, 0.5, 0.5);
  const MarginalSection sec = find_marginal_on_cone(chart, sbar0, grid, -0.4, 0.4, opt);
  double dr = 0.0;
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) {
      const ChartPoint p{sec.at(i, j), sbar0, grid.axis[0].coord(i), grid.axis[1].coord(j)};
      dr = std::max(dr, std::abs(std::sqrt(chart.eval(p).gamma[0][0].v) - 2.0));
    }
  const auto prof = expansion_profile(chart, sbar0, -0.4, 0.4, 1.57, 1.0, 9, ConeFamily::incoming);
  const bool sign_change = prof.front().second * prof.back().second < 0.0;
  const double t = seconds_since(t0);
  report(6, dr < 1e-8 && sign_change && t < 5.0,
         fmt("max |r - 2| %.3e, tr chi %.3e -> %.3e across the locus, %.2f s", dr, prof.front().second,
             prof.back().second, t));
}

// 7. tangency identity and the tube verdicts
void criterion7() {
  bool a = true;
  std::string detail;
  for (const char* name : {"tilted-spacelike", "schwarzschild-tangency"}) {
    const TubeGraph tube = make_builtin_tube(name);
    const DoubleNullChart chart = resolve_chart(tube.chart, {});
    const double s0 = tube.chart == "minkowski" ? 2.0 : 0.2;
    BumpFamily fam;
    fam.count = 50;
    const TangencyReport r = tangency_identity_residual(chart, tube, s0, Vec2(1.2, 1.0), fam);
    a = a && r.max_residual < 1e-7 && r.slope_relative_error < 0.01 && r.r2 > 0.999;
    detail += std::string(name) + fmt(" res %.2e slope err %.2e R2 %.9f; ", r.max_residual, r.slope_relative_error, r.r2);
  }
  bool b = true, c = true;
  for (const TubeInfo& info : builtin_tubes()) {
    const TubeGraph tube = make_builtin_tube(info.name);
    const TubeReport r = verify_tube(resolve_chart(tube.chart, {}), tube);
    const bool spacelike = r.classification.overall == CausalClass::spacelike;
    if (spacelike && r.scan.all_sections_marginal) b = false;
    if (r.classification.overall == CausalClass::null)
      c = c && r.scan.all_sections_marginal && r.scan.max_expansion < 1e-8;
    detail += info.name + std::string(" ") + to_string(r.classification.overall) +
              (r.scan.all_sections_marginal ? " all-marginal" : " not-all-marginal") + "; ";
  }
  report(7, a && b && c, detail + (a ? "(a) ok " : "(a) fail ") + (b ? "(b) ok " : "(b) fail ") + (c ? "(c) ok" : "(c) fail"));
}

// 8. horizon sections are shear free
void criterion8() {
  const TubeGraph tube = make_builtin_tube("schwarzschild-horizon");
  const TubeReport r = verify_tube(resolve_chart(tube.chart, {}), tube);
  report(8, r.scan.max_shear2 < 1e-8 && !r.scan.sections.empty(),
         fmt("max |chi hat|^2 %.3e over %.0f sections", r.scan.max_shear2, double(r.scan.sections.size())));
}

// 9. invariants agree across the angular relabelling theta2 -> theta2 + psi(s)
void criterion9() {
  const DoubleNullChart mk = make_builtin_chart("minkowski");
  const DoubleNullChart sh = make_builtin_chart("minkowski_shifted");
  const double a = sh.params().at("a"), k = sh.params().at("k");
  const auto psi = [&](double s) { return a * s + 0.5 * k * s * s; };
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    const TrigPoly p = TrigPoly::random(rng, 4, 0.05, 3.0);
    const TrigPoly q = TrigPoly::random(rng, 4, 0.05, 4.0);
    // shifted label phi' = phi + psi(f(theta1, phi)); invert by fixed-point iteration
    const auto phi_of = [&](double t1, double tp) {
      double ph = tp;
      for (int it = 0; it < 80; ++it) ph = tp - psi(p(t1, ph));
      return ph;
    };
    const double c1 = 1.2 + 0.02 * seed, cp = 1.0;
    const double cphi = phi_of(c1, cp);
    const auto g1 = SurfaceGraph::from_functions(ThetaGrid::patch(17, c1, cphi, 0.02, 0.02), p, q);
    const auto g2 = SurfaceGraph::from_functions(
        ThetaGrid::patch(17, c1, cp, 0.02, 0.02), [&](double t1, double tp) { return p(t1, phi_of(t1, tp)); },
        [&](double t1, double tp) { return q(t1, phi_of(t1, tp)); });
    const SurfaceInvariants A = surface_invariants(mk, g1, Node{8, 8});
    const SurfaceInvariants B = surface_invariants(sh, g2, Node{8, 8});
    worst = std::max({worst, std::abs(A.tr_chi - B.tr_chi), std::abs(A.tr_chibar - B.tr_chibar),
                      std::abs(A.chi_hat_norm2 - B.chi_hat_norm2), std::abs(A.eta_epsbar - B.eta_epsbar)});
  }
  report(9, worst < 1e-8, fmt("max invariant difference %.3e over 20 surfaces", worst));
}

// 10. byte-identical CLI output
void criterion10() {
  const std::vector<std::vector<std::string>> runs = {
      {"chart-info", "--chart", "schwarzschild_kruskal", "--samples", "4"},
      {"residuals", "--chart", "minkowski_shifted", "--samples", "4", "--format", "csv"},
      {"surface", "--chart", "torus_generic", "--grid", "16", "--seed", "3"},
      {"find-marginal", "--chart", "schwarzschild_kruskal", "--sbar0", "0.5", "--bracket", "-0.4", "0.4"},
      {"verify-tube", "--tube", "tilted-spacelike", "--levels", "2", "--bumps", "2"},
  };
  bool same = true;
  for (const auto& args : runs) {
    std::string first;
    for (int rep = 0; rep < 3; ++rep) {
      if (rep == 2) setenv("NULLTUBE_THREADS", "1", 1);
      std::ostringstream out, err;
      run_cli(args, out, err);
      if (rep == 0) first = out.str();
      else same = same && out.str() == first && !first.empty();
    }
    unsetenv("NULLTUBE_THREADS");
  }
  report(10, same, same ? "five commands reproduce byte for byte" : "output differs between runs");
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> all = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                                  criterion6, criterion7, criterion8, criterion9, criterion10};
  for (std::size_t k = 0; k < all.size(); ++k) {
    try {
      all[k]();
    } catch (const std::exception& e) {
      report(static_cast<int>(k + 1), false, std::string("exception: ") + e.what());
    }
  }
  std::printf("%d of %zu criteria failed\n", failures, all.size());
  return failures == 0 ? 0 : 1;
}
