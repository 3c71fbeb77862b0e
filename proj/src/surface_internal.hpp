#pragma once

#include <cmath>

#include "nulltube/errors.hpp"
#include "nulltube/surface.hpp"

namespace nulltube::detail {

using D2 = Dual<2>;

template <class T>
struct FrameInputs {
  T Om2;
  T b[2];
  T g[2][2];
  T df[2];
  T dfb[2];
};

template <class T>
struct FrameCore {
  T e[2], eb[2];
  T eps, epsb;
  T ev[2], ebv[2];
  T Omd2;
  T D;
  T detB;
};

template <class T>
FrameCore<T> frame_core(const FrameInputs<T>& in) {
  FrameCore<T> out;
  T B[2][2];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) B[i][j] = T(i == j ? 1.0 : 0.0) - in.df[i] * in.b[j];
  out.detB = B[0][0] * B[1][1] - B[0][1] * B[1][0];
  const T gdet = in.g[0][0] * in.g[1][1] - in.g[0][1] * in.g[1][0];
  T gi[2][2] = {{in.g[1][1] / gdet, -in.g[0][1] / gdet}, {-in.g[1][0] / gdet, in.g[0][0] / gdet}};
  // u = B^{-1} df, ub = B^{-1} dfbar
  auto solveB = [&](const T* r, T* u) {
    u[0] = (B[1][1] * r[0] - B[0][1] * r[1]) / out.detB;
    u[1] = (B[0][0] * r[1] - B[1][0] * r[0]) / out.detB;
  };
  T u[2], ub[2];
  solveB(in.df, u);
  solveB(in.dfb, ub);
  for (int k = 0; k < 2; ++k) {
    out.e[k] = -2.0 * in.Om2 * (gi[k][0] * u[0] + gi[k][1] * u[1]);
    out.eb[k] = -2.0 * in.Om2 * (gi[k][0] * ub[0] + gi[k][1] * ub[1]);
  }
  auto dot = [&](const T* x, const T* y) {
    T acc(0.0);
    for (int a = 0; a < 2; ++a)
      for (int c = 0; c < 2; ++c) acc += in.g[a][c] * x[a] * y[c];
    return acc;
  };
  const T ee = dot(out.e, out.e), bb = dot(out.eb, out.eb), eb = dot(out.e, out.eb);
  const T p = 2.0 * in.Om2 + eb;
  out.D = p * p - ee * bb;
  if (value_of(out.D) <= 0.0) return out;
  using std::sqrt;
  const T den = p + sqrt(out.D);
  out.epsb = -bb / den;
  out.eps = -ee / den;
  for (int k = 0; k < 2; ++k) {
    out.ev[k] = out.e[k] + out.eps * out.eb[k];
    out.ebv[k] = out.eb[k] + out.epsb * out.e[k];
  }
  out.Omd2 = in.Om2 * (1.0 + out.eps * out.epsb) + 0.5 * dot(out.ev, out.ebv);
  return out;
}

inline FrameInputs<double> frame_inputs(const PointGeometry& pg, const GraphJet& gj) {
  FrameInputs<double> in;
  in.Om2 = pg.Omega2;
  for (int a = 0; a < 2; ++a) {
    in.b[a] = pg.b[a];
    in.df[a] = gj.df[a];
    in.dfb[a] = gj.dfbar[a];
    for (int c = 0; c < 2; ++c) in.g[a][c] = pg.sc.gamma(a, c);
  }
  return in;
}

/// Surface derivative of a chart field: d_i + f_i d_s + fbar_i d_sbar.
inline D2 along_surface(const Jet2& x, const GraphJet& gj) {
  D2 r(x.v);
  for (int i = 0; i < 2; ++i) r.d[i] = x.d[TH1 + i] + gj.df[i] * x.d[S] + gj.dfbar[i] * x.d[SBAR];
  return r;
}

inline FrameInputs<D2> frame_inputs_dual(const PointGeometry& pg, const GraphJet& gj) {
  const MetricSample& m = pg.sample;
  FrameInputs<D2> in;
  const D2 om = along_surface(m.omega, gj);
  in.Om2 = om * om;
  for (int a = 0; a < 2; ++a) {
    in.b[a] = along_surface(m.b[a], gj);
    in.df[a] = D2(gj.df[a], {gj.ddf(a, 0), gj.ddf(a, 1)});
    in.dfb[a] = D2(gj.dfbar[a], {gj.ddfbar(a, 0), gj.ddfbar(a, 1)});
    for (int c = 0; c < 2; ++c) in.g[a][c] = along_surface(m.gamma[a][c], gj);
  }
  return in;
}

/// Frame with surface derivatives; throws on degenerate configurations.
FrameCore<D2> checked_frame(const PointGeometry& pg, const GraphJet& gj);

/// Second covariant derivative of a graph function with the leaf connection.
inline Mat2 leaf_hessian(const PointGeometry& pg, const Mat2& dd, const Vec2& d) {
  Mat2 h = dd;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) h(i, j) -= pg.gamma2[k][i][j] * d[k];
  return h;
}

inline Mat2 sym(const Vec2& p, const Vec2& q) { return 0.5 * (p * q.transpose() + q * p.transpose()); }

inline Vec2 vec_value(const D2* x) { return {x[0].v, x[1].v}; }

}  // namespace nulltube::detail
