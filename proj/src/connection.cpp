#include "nulltube/connection.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "nulltube/errors.hpp"
#include "nulltube/grid.hpp"

namespace nulltube {

FrameVectors frame_vectors(const MetricSample& m) {
  FrameVectors f;
  const double om2 = m.omega2();
  f.L = Vec4(0.0, 1.0, 0.0, 0.0);
  f.Lbar = Vec4(1.0, 0.0, m.b[0].v, m.b[1].v);
  f.Lp = f.L / om2;
  f.Lbarp = f.Lbar / om2;
  return f;
}

double frame_algebra_residual(const MetricSample& m) {
  const Mat4 g = assemble_metric(m).g;
  const FrameVectors f = frame_vectors(m);
  auto dot = [&](const Vec4& a, const Vec4& b) { return a.dot(g * b); };
  double r = 0.0;
  r = std::max(r, std::abs(dot(f.L, f.L)));
  r = std::max(r, std::abs(dot(f.Lbar, f.Lbar)));
  r = std::max(r, std::abs(dot(f.L, f.Lbarp) - 2.0));
  r = std::max(r, std::abs(dot(f.Lp, f.Lbar) - 2.0));
  r = std::max(r, std::abs(dot(f.L, f.Lbar) / (2.0 * m.omega2()) - 1.0));
  return r;
}

Christoffel christoffel(const MetricSample& sample) {
  const MetricJet gj = assemble_metric_jet(sample);
  const Mat4 ginv = assemble_metric(sample).inverse;
  Christoffel G{};
  // lowered: Gamma_{sigma nu rho}
  double low[4][4][4];
  for (int s = 0; s < 4; ++s)
    for (int n = 0; n < 4; ++n)
      for (int r = 0; r < 4; ++r)
        low[s][n][r] = 0.5 * (gj[s][r].d[n] + gj[s][n].d[r] - gj[n][r].d[s]);
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n)
      for (int r = n; r < 4; ++r) {
        double acc = 0.0;
        for (int s = 0; s < 4; ++s) acc += ginv(m, s) * low[s][n][r];
        G[m][n][r] = G[m][r][n] = acc;
      }
  return G;
}

Christoffel christoffel(const DoubleNullChart& chart, const ChartPoint& p) {
  return christoffel(chart.eval(p));
}

Vec4 covariant_derivative(const Christoffel& G, const Vec4& X, const Vec4& V, const Mat4& dV) {
  Vec4 out = dV * X;
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n)
      for (int r = 0; r < 4; ++r) out[m] += G[m][n][r] * X[n] * V[r];
  return out;
}

namespace {

Christoffel2 leaf_christoffel(const MetricSample& m, const Mat2& ginv) {
  Christoffel2 G{};
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double acc = 0.0;
        for (int l = 0; l < 2; ++l)
          acc += ginv(k, l) * (m.gamma[l][j].d[2 + i] + m.gamma[l][i].d[2 + j] - m.gamma[i][j].d[2 + l]);
        G[k][i][j] = 0.5 * acc;
      }
  return G;
}

// Components and partials of Lbar = d_s + b.
void lbar_field(const MetricSample& m, Vec4& V, Mat4& dV) {
  V = Vec4(1.0, 0.0, m.b[0].v, m.b[1].v);
  dV.setZero();
  for (int a = 0; a < 2; ++a)
    for (int n = 0; n < 4; ++n) dV(2 + a, n) = m.b[a].d[n];
}

}  // namespace

PointGeometry point_geometry(const DoubleNullChart& chart, const ChartPoint& p) {
  PointGeometry pg;
  pg.p = p;
  pg.sample = chart.eval(p);
  const MetricSample& m = pg.sample;
  pg.metric = assemble_metric(m);
  const MetricJet gj = assemble_metric_jet(m);
  for (int k = 0; k < 4; ++k)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) pg.dg[k](a, b) = gj[a][b].d[k];
  pg.gamma4 = christoffel(m);
  const Mat4& g = pg.metric.g;
  const Christoffel& G = pg.gamma4;

  StructureCoefficients& sc = pg.sc;
  pg.Omega2 = m.omega2();
  sc.Omega2 = pg.Omega2;
  sc.gamma = m.gamma_value();
  sc.gamma_inv = sc.gamma.inverse();
  pg.b = m.b_value();
  pg.gamma2 = leaf_christoffel(m, sc.gamma_inv);

  sc.omega = m.omega.d[SBAR] / m.omega.v;
  sc.omegabar = (m.omega.d[S] + pg.b[0] * m.omega.d[TH1] + pg.b[1] * m.omega.d[TH2]) / m.omega.v;

  Vec4 Lb;
  Mat4 dLb;
  lbar_field(m, Lb, dLb);
  for (int a = 0; a < 2; ++a) {
    Vec4 ea = Vec4::Zero();
    ea[2 + a] = 1.0;
    Vec4 nablaL;  // nabla_a L = Gamma^mu_{a sbar}
    for (int mu = 0; mu < 4; ++mu) nablaL[mu] = G[mu][2 + a][SBAR];
    const Vec4 nablaLb = covariant_derivative(G, ea, Lb, dLb);
    const Vec4 gL = g * nablaL, gLb = g * nablaLb;
    for (int b = 0; b < 2; ++b) {
      sc.chi(a, b) = gL[2 + b];
      sc.chibar(a, b) = gLb[2 + b];
    }
    sc.eta[a] = 0.5 / pg.Omega2 * gLb[SBAR];
    sc.etabar[a] = 0.5 / pg.Omega2 * Lb.dot(gL);
  }

  for (int i = 0; i < 2; ++i) {
    pg.ds_b[i] = m.b[i].d[S];
    for (int k = 0; k < 2; ++k) {
      double acc = m.b[k].d[2 + i];
      for (int j = 0; j < 2; ++j) acc += pg.gamma2[k][i][j] * pg.b[j];
      pg.nabla_b(i, k) = acc;
    }
  }
  return pg;
}

StructureCoefficients structure_coefficients(const DoubleNullChart& chart, const ChartPoint& p) {
  return point_geometry(chart, p).sc;
}

double default_fd_step(double x) {
  static const double base = std::pow(std::numeric_limits<double>::epsilon(), 1.0 / 6.0);
  return base * std::max(1.0, std::abs(x));
}

namespace {

const char* axis_name(int mu) {
  static const char* names[4] = {"s", "sbar", "th1", "th2"};
  return names[mu];
}

void require_stencil(const DoubleNullChart& chart, const ChartPoint& p, int mu, double reach) {
  ChartPoint lo = p, hi = p;
  lo[mu] -= reach;
  hi[mu] += reach;
  if (!chart.contains(lo) || !chart.contains(hi))
    throw StencilError(chart.name() + ": finite-difference stencil along " + axis_name(mu) +
                       " leaves the chart at (" + std::to_string(p.s) + ", " + std::to_string(p.sbar) +
                       ", " + std::to_string(p.th1) + ", " + std::to_string(p.th2) + ")");
}

}  // namespace

CurvatureSample ricci(const DoubleNullChart& chart, const ChartPoint& p) {
  CurvatureSample out;
  out.gamma = christoffel(chart, p);
  const Christoffel& G = out.gamma;
  // dG[k][mu][nu][rho] = d_k Gamma^mu_{nu rho}
  static thread_local double dG[4][4][4][4];
  // fourth-order differences at h and h/2, combined by one Richardson step
  const double off[4] = {-2.0, -1.0, 1.0, 2.0};
  for (int k = 0; k < 4; ++k) {
    // angles are translation invariant, so their step does not scale with the coordinate
    const double h = k < 2 ? default_fd_step(p[k]) : default_fd_step(0.0);
    require_stencil(chart, p, k, 2.0 * h);
    Christoffel c[2][4];
    for (int lvl = 0; lvl < 2; ++lvl)
      for (int q = 0; q < 4; ++q) {
        ChartPoint x = p;
        x[k] += off[q] * h / (1 + lvl);
        c[lvl][q] = christoffel(chart, x);
      }
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n)
        for (int r = 0; r < 4; ++r) {
          const double coarse = fd1(c[0][0][m][n][r], c[0][1][m][n][r], c[0][2][m][n][r], c[0][3][m][n][r], h);
          const double fine = fd1(c[1][0][m][n][r], c[1][1][m][n][r], c[1][2][m][n][r], c[1][3][m][n][r], 0.5 * h);
          dG[k][m][n][r] = (16.0 * fine - coarse) / 15.0;
        }
  }
  for (int n = 0; n < 4; ++n)
    for (int r = 0; r < 4; ++r) {
      double acc = 0.0;
      for (int m = 0; m < 4; ++m) {
        acc += dG[m][m][n][r] - dG[n][m][m][r];
        for (int l = 0; l < 4; ++l) acc += G[m][m][l] * G[l][n][r] - G[m][n][l] * G[l][m][r];
      }
      out.ricci(n, r) = acc;
    }
  out.ricci = 0.5 * (out.ricci + out.ricci.transpose()).eval();
  out.r_LL = out.ricci(SBAR, SBAR);
  return out;
}

double ScacsReport::max() const {
  double m = 0.0;
  for (double r : residual) m = std::max(m, r);
  return m;
}

ScacsReport scacs_residuals(const DoubleNullChart& chart, const ChartPoint& p) {
  const PointGeometry pg = point_geometry(chart, p);
  const MetricSample& m = pg.sample;
  const StructureCoefficients& sc = pg.sc;
  const Christoffel& G = pg.gamma4;
  const double om2 = pg.Omega2;

  // Gram-Schmidt of (d_1, d_2) under gamma, carried on jets so the frame has partials.
  const Jet2& g11 = m.gamma[0][0];
  const Jet2& g12 = m.gamma[0][1];
  const Jet2& g22 = m.gamma[1][1];
  const Jet2 n1 = 1.0 / sqrt(g11);
  const Jet2 n2 = 1.0 / sqrt(g22 - g12 * g12 / g11);
  // e1 = n1 d1, e2 = n2 (d2 - g12/g11 d1)
  std::array<std::array<Jet2, 2>, 2> e;
  e[0] = {n1, Jet2(0.0)};
  e[1] = {-(n2 * g12 / g11), n2};

  Vec4 E[2];
  Mat4 dE[2];
  for (int A = 0; A < 2; ++A) {
    E[A].setZero();
    dE[A].setZero();
    for (int c = 0; c < 2; ++c) {
      E[A][2 + c] = e[A][c].v;
      for (int n = 0; n < 4; ++n) dE[A](2 + c, n) = e[A][c].d[n];
    }
  }
  Vec4 Lb;
  Mat4 dLb;
  lbar_field(m, Lb, dLb);
  const Vec4 L(0.0, 1.0, 0.0, 0.0);
  const Mat4 zero = Mat4::Zero();

  Mat2 Em;  // Em(A, a) = e_A^a
  for (int A = 0; A < 2; ++A)
    for (int a = 0; a < 2; ++a) Em(A, a) = E[A][2 + a];
  const Mat2 chiF = Em * sc.chi * Em.transpose();
  const Mat2 chibF = Em * sc.chibar * Em.transpose();
  const Vec2 etaF = Em * sc.eta;
  const Vec2 etabF = Em * sc.etabar;

  ScacsReport rep;
  auto track = [&](int slot, const Vec4& lhs, const Vec4& rhs) {
    rep.residual[slot] = std::max(rep.residual[slot], (lhs - rhs).cwiseAbs().maxCoeff());
  };
  for (int A = 0; A < 2; ++A) {
    for (int B = 0; B < 2; ++B) {
      const Vec4 lhs = covariant_derivative(G, E[A], E[B], dE[B]);
      Vec4 slash = Vec4::Zero();  // nabla-slash_{e_A} e_B
      for (int c = 0; c < 2; ++c) {
        double acc = 0.0;
        for (int a = 0; a < 2; ++a) {
          acc += E[A][2 + a] * dE[B](2 + c, 2 + a);
          for (int d = 0; d < 2; ++d) acc += E[A][2 + a] * pg.gamma2[c][a][d] * E[B][2 + d];
        }
        slash[2 + c] = acc;
      }
      track(0, lhs, -0.5 / om2 * chiF(A, B) * Lb - 0.5 / om2 * chibF(A, B) * L + slash);
    }
    Vec4 rhs = etaF[A] * Lb;
    for (int B = 0; B < 2; ++B) rhs += chibF(A, B) * E[B];
    track(1, covariant_derivative(G, E[A], Lb, dLb), rhs);
    rhs = etabF[A] * L;
    for (int B = 0; B < 2; ++B) rhs += chiF(A, B) * E[B];
    track(2, covariant_derivative(G, E[A], L, zero), rhs);
  }
  track(3, covariant_derivative(G, Lb, Lb, dLb), 2.0 * sc.omegabar * Lb);
  Vec4 eta_sharp = Vec4::Zero(), etab_sharp = Vec4::Zero();
  for (int A = 0; A < 2; ++A) {
    eta_sharp += etaF[A] * E[A];
    etab_sharp += etabF[A] * E[A];
  }
  track(4, covariant_derivative(G, Lb, L, zero), -2.0 * om2 * eta_sharp);
  track(5, covariant_derivative(G, L, L, zero), 2.0 * sc.omega * L);
  track(6, covariant_derivative(G, L, Lb, dLb), -2.0 * om2 * etab_sharp);
  return rep;
}

double lie_b_residual(const DoubleNullChart& chart, const ChartPoint& p) {
  const PointGeometry pg = point_geometry(chart, p);
  const Vec2 lie(pg.sample.b[0].d[SBAR], pg.sample.b[1].d[SBAR]);
  const Vec2 rhs = 2.0 * pg.Omega2 * pg.sc.gamma_inv * (pg.sc.eta - pg.sc.etabar);
  return (lie - rhs).norm();
}

double raychaudhuri_residual(const DoubleNullChart& chart, const ChartPoint& p, double step) {
  // a quarter of the default: the Kruskal expansion varies fast near r -> 0
  const double h = step > 0.0 ? step : 0.25 * default_fd_step(p.sbar);
  require_stencil(chart, p, SBAR, 2.0 * h);
  double tr[4];
  const double off[4] = {-2.0, -1.0, 1.0, 2.0};
  for (int q = 0; q < 4; ++q) {
    ChartPoint x = p;
    x.sbar += off[q] * h;
    tr[q] = structure_coefficients(chart, x).tr_chi();
  }
  const double Ltr = (tr[0] - 8.0 * tr[1] + 8.0 * tr[2] - tr[3]) / (12.0 * h);
  const StructureCoefficients sc = structure_coefficients(chart, p);
  const double trc = sc.tr_chi();
  const double shear = sc.norm2(sc.chi_hat());
  const double rll = ricci(chart, p).r_LL;
  return std::abs(Ltr - 2.0 * sc.omega * trc + 0.5 * trc * trc + shear + rll);
}

}  // namespace nulltube
