#include "nulltube/surface.hpp"
#include "surface_internal.hpp"

namespace nulltube {

PiCoefficients pi_coefficients(const PointGeometry& pg, const GraphJet& gj) {
  const auto c = detail::checked_frame(pg, gj);
  const StructureCoefficients& sc = pg.sc;
  const Mat2& gi = sc.gamma_inv;
  const Mat2& chi = sc.chi;
  const Mat2& chb = sc.chibar;
  const Vec2& eta = sc.eta;
  const Vec2& etb = sc.etabar;
  const Vec2& b = pg.b;
  const Mat2& nb = pg.nabla_b;
  const double O2 = pg.Omega2;
  const double hO = 0.5 / O2;
  const Vec2& f = gj.df;
  const Vec2& fb = gj.dfbar;
  const Mat2& ff = gj.ddf;
  const Mat2& ffb = gj.ddfbar;

  const Mat2 chi_up = chi * gi;  // chi_j^k
  const Mat2 chb_up = chb * gi;
  const Vec2 A = nb.transpose() * b - 2.0 * gi * (chb * b) - pg.ds_b;
  const Vec2 C = -2.0 * O2 * gi * eta - gi * (chi * b);

  PiCoefficients P;
  for (int k = 0; k < 2; ++k) {
    Mat2& Pk = P.Pk[k];
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        Pk(i, j) = pg.gamma2[k][i][j] - ff(i, j) * b[k] + f[i] * (chb_up(j, k) - nb(j, k)) +
                   f[j] * (chb_up(i, k) - nb(i, k)) + fb[i] * chi_up(j, k) + fb[j] * chi_up(i, k) +
                   f[i] * f[j] * A[k] + (f[i] * fb[j] + f[j] * fb[i]) * C[k];
  }
  const Vec2 chib_b = chi * b, chbb_b = chb * b;
  const double chi_bb = b.dot(chi * b), chb_bb = b.dot(chb * b);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      P.PLbar(i, j) = ff(i, j) - hO * chi(i, j) + f[i] * (eta[j] + hO * chib_b[j]) +
                      f[j] * (eta[i] + hO * chib_b[i]) +
                      f[i] * f[j] * (2.0 * sc.omegabar - 2.0 * eta.dot(b) - hO * chi_bb);
      P.PL(i, j) = ffb(i, j) - hO * chb(i, j) + hO * (f[i] * chbb_b[j] + f[j] * chbb_b[i]) + fb[i] * etb[j] +
                   fb[j] * etb[i] - hO * chb_bb * f[i] * f[j] + 2.0 * sc.omega * fb[i] * fb[j] -
                   etb.dot(b) * (f[i] * fb[j] + f[j] * fb[i]);
    }

  // derivative of Lbardot
  const double epsb = c.epsb.v;
  const Vec2 ebv = detail::vec_value(c.ebv);
  const Vec2 nb_eb = nb.transpose() * ebv;
  const Vec2 vk_f = -gi * chbb_b + gi * (chb * ebv) - 2.0 * O2 * epsb * (gi * eta) - epsb * (gi * chib_b) - nb_eb;
  const Vec2 vk_fb = gi * (chi * ebv) - 2.0 * O2 * (gi * etb);
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k < 2; ++k) {
      double dk = c.ebv[k].d[i];
      for (int m = 0; m < 2; ++m) dk += pg.gamma2[k][i][m] * ebv[m];
      P.Pk_lbar(i, k) = chb_up(i, k) + epsb * chi_up(i, k) + f[i] * vk_f[k] + fb[i] * vk_fb[k] + dk;
    }
    P.PLbar_lbar[i] = eta[i] - hO * (chi * ebv)[i] +
                      f[i] * (2.0 * sc.omegabar - eta.dot(b) + eta.dot(ebv) + hO * b.dot(chi * ebv));
    P.PL_lbar[i] = epsb * etb[i] - hO * (chb * ebv)[i] + f[i] * (-epsb * etb.dot(b) + hO * b.dot(chb * ebv)) +
                   fb[i] * (2.0 * sc.omega * epsb + etb.dot(ebv)) + c.epsb.d[i];
  }
  return P;
}

PiCoefficients pi_coefficients(const DoubleNullChart& chart, const SurfaceGraph& graph, const Node& n) {
  const GraphJet gj = graph.jet(n);
  return pi_coefficients(point_geometry(chart, gj.point()), gj);
}

PiCheck pi_consistency(const PointGeometry& pg, const GraphJet& gj) {
  const PiCoefficients P = pi_coefficients(pg, gj);
  const auto c = detail::checked_frame(pg, gj);
  const TangentFrame tf = tangent_frame(pg, gj);
  const Christoffel& G = pg.gamma4;
  const Vec2& b = pg.b;
  const Mat2& gam = pg.sc.gamma;
  const double O2 = pg.Omega2;
  auto gamma_term = [&](const Vec4& X, const Vec4& Y) {
    Vec4 r = Vec4::Zero();
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu)
        for (int rho = 0; rho < 4; ++rho) r[mu] += G[mu][nu][rho] * X[nu] * Y[rho];
    return r;
  };
  auto recompose = [&](double pk0, double pk1, double pLbar, double pL) {
    return Vec4(pLbar, pL, pk0 + pLbar * b[0], pk1 + pLbar * b[1]);
  };

  PiCheck out;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const Vec4 direct = Vec4(gj.ddf(i, j), gj.ddfbar(i, j), 0.0, 0.0) + gamma_term(tf.d[i], tf.d[j]);
      const Vec4 pi = recompose(P.Pk[0](i, j), P.Pk[1](i, j), P.PLbar(i, j), P.PL(i, j));
      out.tangent_residual = std::max(out.tangent_residual, (direct - pi).cwiseAbs().maxCoeff());
    }
    Vec4 dLb(0.0, c.epsb.d[i], 0.0, 0.0);
    Vec4 Lbd(1.0, c.epsb.v, 0.0, 0.0);
    for (int k = 0; k < 2; ++k) {
      dLb[2 + k] = detail::along_surface(pg.sample.b[k], gj).d[i] + c.ebv[k].d[i];
      Lbd[2 + k] = b[k] + c.ebv[k].v;
    }
    const Vec4 direct = dLb + gamma_term(tf.d[i], Lbd);
    const Vec4 pi = recompose(P.Pk_lbar(i, 0), P.Pk_lbar(i, 1), P.PLbar_lbar[i], P.PL_lbar[i]);
    out.lbar_residual = std::max(out.lbar_residual, (direct - pi).cwiseAbs().maxCoeff());
  }

  const SurfaceGeometrySample closed = second_fundamental_forms(pg, gj);
  const double eps = c.eps.v, epsb = c.epsb.v;
  const Vec2 ev = detail::vec_value(c.ev), ebv = detail::vec_value(c.ebv);
  Mat2 chibar, chi;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const Vec2 pk(P.Pk[0](i, j), P.Pk[1](i, j));
      chibar(i, j) = -pk.dot(gam * ebv) - 2.0 * O2 * P.PL(i, j) - 2.0 * O2 * epsb * P.PLbar(i, j);
      chi(i, j) = -pk.dot(gam * ev) - 2.0 * O2 * P.PLbar(i, j) - 2.0 * O2 * eps * P.PL(i, j);
    }
  Vec2 eta;
  for (int i = 0; i < 2; ++i) {
    const Vec2 pk(P.Pk_lbar(i, 0), P.Pk_lbar(i, 1));
    eta[i] = (pk.dot(gam * ev) + 2.0 * O2 * P.PLbar_lbar[i] + 2.0 * O2 * eps * P.PL_lbar[i]) / (2.0 * c.Omd2.v);
  }
  out.chibar_residual = (chibar - closed.chibar).cwiseAbs().maxCoeff();
  out.chi_residual = (chi - closed.chi).cwiseAbs().maxCoeff();
  out.eta_residual = (eta - closed.eta).cwiseAbs().maxCoeff();
  return out;
}

}  // namespace nulltube
