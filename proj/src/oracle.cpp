#include <array>

#include "nulltube/parallel.hpp"
#include "nulltube/surface.hpp"
#include "surface_internal.hpp"

namespace nulltube {

SurfaceGeometrySample oracle_second_forms(const DoubleNullChart& chart, const SurfaceGraph& graph,
                                          const Node& n) {
  const ThetaGrid& grid = graph.grid();
  if (!grid.reachable(n.i, n.j, 4))
    throw StencilError("oracle stencil leaves the grid at node (" + std::to_string(n.i) + ", " +
                       std::to_string(n.j) + ")");
  const GraphJet gj = graph.jet(n);
  const PointGeometry pg = point_geometry(chart, gj.point());
  const NullFrameSolution centre = solve_null_frame(pg, gj);
  const TangentFrame tf = tangent_frame(pg, gj);
  const Mat4& g = pg.metric.g;
  const Christoffel& G = pg.gamma4;

  // derivative of the frame components along theta^a, taken over neighbouring nodes
  std::array<Vec4, 2> dL, dLb;
  const int off[4] = {-2, -1, 1, 2};
  for (int a = 0; a < 2; ++a) {
    Vec4 L[4], Lb[4];
    for (int q = 0; q < 4; ++q) {
      const Node m = a == 0 ? Node{n.i + off[q], n.j} : Node{n.i, n.j + off[q]};
      const NullFrameSolution s = solve_null_frame(chart, graph, m);
      L[q] = s.Ldot;
      Lb[q] = s.Lbardot;
    }
    const double h = grid.axis[a].step();
    for (int mu = 0; mu < 4; ++mu) {
      dL[a][mu] = fd1(L[0][mu], L[1][mu], L[2][mu], L[3][mu], h);
      dLb[a][mu] = fd1(Lb[0][mu], Lb[1][mu], Lb[2][mu], Lb[3][mu], h);
    }
  }

  SurfaceGeometrySample out;
  out.gdot = induced_metric(pg, gj);
  out.Omegadot2 = centre.Omegadot2;
  for (int a = 0; a < 2; ++a) {
    Vec4 nL = dL[a], nLb = dLb[a];
    const Vec4& X = tf.d[a];
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu)
        for (int rho = 0; rho < 4; ++rho) {
          nL[mu] += G[mu][nu][rho] * X[nu] * centre.Ldot[rho];
          nLb[mu] += G[mu][nu][rho] * X[nu] * centre.Lbardot[rho];
        }
    const Vec4 gL = g * nL, gLb = g * nLb;
    for (int b = 0; b < 2; ++b) {
      out.chi(a, b) = gL.dot(tf.d[b]);
      out.chibar(a, b) = gLb.dot(tf.d[b]);
    }
    out.eta[a] = 0.5 / centre.Omegadot2 * gLb.dot(centre.Ldot);
  }
  return out;
}

OracleComparison compare_with_oracle(const DoubleNullChart& chart, const SurfaceGraph& graph) {
  const std::vector<Node> nodes = graph.nodes();
  std::vector<std::array<double, 3>> d(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t k) {
    const SurfaceGeometrySample a = second_fundamental_forms(chart, graph, nodes[k]);
    const SurfaceGeometrySample b = oracle_second_forms(chart, graph, nodes[k]);
    d[k] = {(a.chi - b.chi).cwiseAbs().maxCoeff(), (a.chibar - b.chibar).cwiseAbs().maxCoeff(),
            (a.eta - b.eta).cwiseAbs().maxCoeff()};
  });
  OracleComparison out;
  out.nodes = static_cast<int>(nodes.size());
  for (const auto& x : d) {
    out.chi = std::max(out.chi, x[0]);
    out.chibar = std::max(out.chibar, x[1]);
    out.eta = std::max(out.eta, x[2]);
  }
  return out;
}

}  // namespace nulltube
