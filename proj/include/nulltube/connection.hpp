#pragma once

#include <array>

#include "nulltube/charts.hpp"

namespace nulltube {

/// gamma4[mu][nu][rho] = Gamma^mu_{nu rho} in coordinates (s, sbar, th1, th2).
using Christoffel = std::array<std::array<std::array<double, 4>, 4>, 4>;
/// Gamma-slash^k_{ij} of the leaf metric gamma (angular indices 0, 1).
using Christoffel2 = std::array<std::array<std::array<double, 2>, 2>, 2>;

struct FrameVectors {
  Vec4 L, Lbar, Lp, Lbarp;
};

FrameVectors frame_vectors(const MetricSample& m);

/// Max deviation of g(L,L), g(Lbar,Lbar), g(L,Lbar')-2, g(L',Lbar)-2 and the
/// relative error of g(L,Lbar) = 2 Omega^2.
double frame_algebra_residual(const MetricSample& m);

struct StructureCoefficients {
  double omega = 0.0;
  double omegabar = 0.0;
  Vec2 eta = Vec2::Zero();
  Vec2 etabar = Vec2::Zero();
  Mat2 chi = Mat2::Zero();
  Mat2 chibar = Mat2::Zero();
  double Omega2 = 1.0;
  Mat2 gamma = Mat2::Identity();
  Mat2 gamma_inv = Mat2::Identity();

  Mat2 chi_prime() const { return chi / Omega2; }
  Mat2 chibar_prime() const { return chibar / Omega2; }
  double tr_chi() const { return (gamma_inv * chi).trace(); }
  double tr_chibar() const { return (gamma_inv * chibar).trace(); }
  Mat2 chi_hat() const { return chi - 0.5 * tr_chi() * gamma; }
  Mat2 chibar_hat() const { return chibar - 0.5 * tr_chibar() * gamma; }
  /// gamma^{ac} gamma^{bd} T_ab T_cd
  double norm2(const Mat2& t) const { return (gamma_inv * t * gamma_inv * t.transpose()).trace(); }
};

/// Everything about the background needed by the surface formulas at one point.
struct PointGeometry {
  ChartPoint p;
  MetricSample sample;
  MetricMatrix metric;
  std::array<Mat4, 4> dg;  // dg[k](mu, nu) = d_k g_{mu nu}
  Christoffel gamma4{};
  Christoffel2 gamma2{};
  StructureCoefficients sc;
  Mat2 nabla_b;  // nabla_b(i, k) = nabla-slash_i b^k
  Vec2 ds_b;     // d_s b^k
  Vec2 b;
  double Omega2 = 1.0;
};

PointGeometry point_geometry(const DoubleNullChart& chart, const ChartPoint& p);

Christoffel christoffel(const DoubleNullChart& chart, const ChartPoint& p);
Christoffel christoffel(const MetricSample& sample);

/// nabla_X V with V given by its components and coordinate partials dV(mu, nu) = d_nu V^mu.
Vec4 covariant_derivative(const Christoffel& G, const Vec4& X, const Vec4& V, const Mat4& dV);

struct CurvatureSample {
  Christoffel gamma{};
  Mat4 ricci = Mat4::Zero();
  double r_LL = 0.0;
};

/// Default step for fourth-order central differences: eps^(1/6) * max(1, |x|).
double default_fd_step(double x);

/// Ricci from Christoffels and a fourth-order central difference of them.
/// Throws StencilError when the stencil leaves the chart.
CurvatureSample ricci(const DoubleNullChart& chart, const ChartPoint& p);

StructureCoefficients structure_coefficients(const DoubleNullChart& chart, const ChartPoint& p);

struct ScacsReport {
  // e_A e_B, e_A Lbar, e_A L, Lbar Lbar, Lbar L, L L, L Lbar
  std::array<double, 7> residual{};
  double max() const;
};

ScacsReport scacs_residuals(const DoubleNullChart& chart, const ChartPoint& p);
double lie_b_residual(const DoubleNullChart& chart, const ChartPoint& p);
/// step <= 0 selects default_fd_step(sbar) / 4.
double raychaudhuri_residual(const DoubleNullChart& chart, const ChartPoint& p, double step = 0.0);

}  // namespace nulltube
