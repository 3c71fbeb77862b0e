#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nulltube/connection.hpp"
#include "nulltube/grid.hpp"

namespace nulltube {

using GraphFunction = std::function<double(double th1, double th2)>;

/// Values and coordinate derivatives of (f, fbar) at one node.
struct GraphJet {
  double th1 = 0.0, th2 = 0.0;
  double f = 0.0, fbar = 0.0;
  Vec2 df = Vec2::Zero(), dfbar = Vec2::Zero();
  Mat2 ddf = Mat2::Zero(), ddfbar = Mat2::Zero();

  ChartPoint point() const { return {f, fbar, th1, th2}; }
};

/// Spacelike surface theta -> (f(theta), fbar(theta), theta) sampled on a grid.
class SurfaceGraph {
 public:
  SurfaceGraph() = default;
  /// Samples callables on every stored node (ghosts included).
  static SurfaceGraph from_functions(const ThetaGrid& grid, const GraphFunction& f,
                                     const GraphFunction& fbar);
  /// Arrays over all stored nodes (patch axes include their ghost layers), row-major.
  static SurfaceGraph from_values(const ThetaGrid& grid, std::vector<double> f,
                                  std::vector<double> fbar);

  const ThetaGrid& grid() const { return grid_; }
  double f(int i, int j) const { return f_[grid_.flat(i, j)]; }
  double fbar(int i, int j) const { return fbar_[grid_.flat(i, j)]; }
  double th1(int i) const { return grid_.axis[0].coord(i); }
  double th2(int j) const { return grid_.axis[1].coord(j); }

  /// Throws StencilError if the node has no full derivative stencil.
  GraphJet jet(int i, int j) const;
  GraphJet jet(const Node& n) const { return jet(n.i, n.j); }

  /// True if f (resp. fbar) takes one value on every stored node.
  bool f_constant() const;
  bool fbar_constant() const;

  /// All interior nodes in row-major order.
  std::vector<Node> nodes() const;

 private:
  void differentiate();

  ThetaGrid grid_;
  std::vector<double> f_, fbar_;
  std::vector<GraphJet> jets_;
  std::vector<char> has_jet_;
};

struct TangentFrame {
  Mat2 B = Mat2::Identity();  // B(i, j) = B_i^j = delta - f_i b^j
  std::array<Vec4, 2> d;      // coordinate components of the tangent vectors
  double detB = 1.0;
};

TangentFrame tangent_frame(const PointGeometry& pg, const GraphJet& gj);
TangentFrame tangent_frame(const DoubleNullChart& chart, const SurfaceGraph& graph, const Node& n);

/// B gamma B^T + 2 Omega^2 (df dfbar^T + dfbar df^T); throws NotSpacelikeError if not SPD.
Mat2 induced_metric(const PointGeometry& pg, const GraphJet& gj);
Mat2 induced_metric(const DoubleNullChart& chart, const SurfaceGraph& graph, const Node& n);

struct NullFrameSolution {
  Vec2 e = Vec2::Zero(), ebar = Vec2::Zero();
  double eps = 0.0, epsbar = 0.0;
  Vec2 eps_vec = Vec2::Zero(), epsbar_vec = Vec2::Zero();
  Vec4 Ldot, Lbardot, Ldot_p, Lbardot_p;
  double Omegadot2 = 1.0;
  double D = 0.0;
};

NullFrameSolution solve_null_frame(const PointGeometry& pg, const GraphJet& gj);
NullFrameSolution solve_null_frame(const DoubleNullChart& chart, const SurfaceGraph& graph,
                                   const Node& n);

/// Relative residuals of the four null-frame conditions and the conjugacy
/// g(Lbardot, Ldot') = 2, computed with the assembled 4-metric.
std::array<double, 5> frame_system_residual(const PointGeometry& pg, const GraphJet& gj,
                                            const NullFrameSolution& sol);

struct SurfaceGeometrySample {
  Mat2 gdot = Mat2::Identity();
  Mat2 chi = Mat2::Zero(), chibar = Mat2::Zero();
  Vec2 eta = Vec2::Zero();
  double Omegadot2 = 1.0;

  Mat2 gdot_inv() const { return gdot.inverse(); }
  double tr_chi() const { return (gdot_inv() * chi).trace(); }
  double tr_chibar() const { return (gdot_inv() * chibar).trace(); }
  Mat2 chi_hat() const { return chi - 0.5 * tr_chi() * gdot; }
  Mat2 chibar_hat() const { return chibar - 0.5 * tr_chibar() * gdot; }
  double norm2(const Mat2& t) const {
    const Mat2 gi = gdot_inv();
    return (gi * t * gi * t.transpose()).trace();
  }
  double chi_hat_norm2() const { return norm2(chi_hat()); }
  double chibar_hat_norm2() const { return norm2(chibar_hat()); }
  double eta_norm2() const { return eta.dot(gdot_inv() * eta); }
};

/// Closed-form null second fundamental forms and torsion of the surface.
SurfaceGeometrySample second_fundamental_forms(const PointGeometry& pg, const GraphJet& gj);
SurfaceGeometrySample second_fundamental_forms(const DoubleNullChart& chart,
                                               const SurfaceGraph& graph, const Node& n);

/// Direct evaluation: null frame re-solved at neighbouring nodes, differentiated
/// by fourth-order differences along the grid, Christoffel terms added, projected.
SurfaceGeometrySample oracle_second_forms(const DoubleNullChart& chart, const SurfaceGraph& graph,
                                          const Node& n);

struct PiCoefficients {
  // nabla_{dot d_i} dot d_j = Pi^k d_k + Pi^L L + Pi^Lbar Lbar
  std::array<Mat2, 2> Pk;  // Pk[k](i, j)
  Mat2 PL = Mat2::Zero(), PLbar = Mat2::Zero();
  // nabla_{dot d_i} Lbardot = Pi_i^k d_k + Pi_i^Lbar Lbar + Pi_i^L L
  Mat2 Pk_lbar = Mat2::Zero();  // (i, k)
  Vec2 PL_lbar = Vec2::Zero(), PLbar_lbar = Vec2::Zero();
};

PiCoefficients pi_coefficients(const PointGeometry& pg, const GraphJet& gj);
PiCoefficients pi_coefficients(const DoubleNullChart& chart, const SurfaceGraph& graph, const Node& n);

struct PiCheck {
  double tangent_residual = 0.0;  // |Pi recomposition - nabla dot d_i dot d_j| (max)
  double lbar_residual = 0.0;     // |Pi recomposition - nabla dot d_i Lbardot| (max)
  double chibar_residual = 0.0;   // |chibar via Pi - closed form| (max)
  double chi_residual = 0.0;
  double eta_residual = 0.0;
};

/// Compares the Pi route against direct Christoffel evaluation and the closed forms.
PiCheck pi_consistency(const PointGeometry& pg, const GraphJet& gj);

/// f constant: closed forms specialised to the outgoing null hypersurface.
SurfaceGeometrySample specialization_case1(const DoubleNullChart& chart, const SurfaceGraph& graph,
                                           const Node& n);
/// fbar constant: closed forms specialised to the incoming null hypersurface.
SurfaceGeometrySample specialization_case2(const DoubleNullChart& chart, const SurfaceGraph& graph,
                                           const Node& n);
SurfaceGeometrySample specialization_case1(const PointGeometry& pg, const GraphJet& gj);
SurfaceGeometrySample specialization_case2(const PointGeometry& pg, const GraphJet& gj);

struct OracleComparison {
  double chi = 0.0, chibar = 0.0, eta = 0.0;
  int nodes = 0;
  double max() const { return std::max({chi, chibar, eta}); }
};

/// Closed forms against the oracle at every interior node (componentwise maxima).
OracleComparison compare_with_oracle(const DoubleNullChart& chart, const SurfaceGraph& graph);

/// Where test surfaces sit in a chart: base values of (f, fbar) and a theta patch.
struct SurfacePlacement {
  double s0 = 0.0, sbar0 = 0.0;
  Vec2 centre = Vec2::Zero();
  double half = 0.5;
};
SurfacePlacement default_placement(const DoubleNullChart& chart);

/// f = s0 + p(theta), fbar = sbar0 + q(theta) with p, q random trigonometric
/// polynomials of degree 4 and amplitude `amplitude`, drawn from `seed`.
SurfaceGraph random_graph(const ThetaGrid& grid, std::uint64_t seed, double s0, double sbar0, double amplitude);

/// {"topology": "torus", "n": N[, "period": [p1, p2]]} or
/// {"topology": "patch", "n": N, "center": [c1, c2], "half": [h1, h2]}
ThetaGrid theta_grid_from_json(const nlohmann::json& doc, const std::string& origin);
/// {"theta": grid, "f": expr | values, "fbar": expr | values}; value arrays cover
/// every stored node (ghost layers included) in row-major order.
SurfaceGraph surface_from_json(const nlohmann::json& doc, const std::string& origin);
SurfaceGraph load_surface(const std::string& path);

/// Scalars that do not depend on the angular labelling of the chart. eta_epsbar is
/// Omegadot^-2 eta(P epsbar), with P the orthogonal projection onto the surface.
struct SurfaceInvariants {
  double tr_chi = 0.0, tr_chibar = 0.0;
  double chi_hat_norm2 = 0.0, chibar_hat_norm2 = 0.0;
  double eta_epsbar = 0.0;
};
SurfaceInvariants surface_invariants(const DoubleNullChart& chart, const SurfaceGraph& graph, const Node& n);

/// Largest componentwise difference of chi, chibar, eta.
double max_component_difference(const SurfaceGeometrySample& a, const SurfaceGeometrySample& b);

}  // namespace nulltube
