#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nulltube/surface.hpp"

namespace nulltube {

using TubeFunction = std::function<double(double sbar, double th1, double th2)>;

/// Hypersurface s = h(sbar, theta). The grid (sbar range x theta grid) is where
/// the tube is classified and where its sections live.
struct TubeGraph {
  std::string name;
  std::string chart;  // default chart selector for builtin and file tubes
  TubeFunction h;
  double sbar_min = 0.0, sbar_max = 1.0;
  int n_sbar = 16;
  ThetaGrid theta;

  double operator()(double sbar, double th1, double th2) const { return h(sbar, th1, th2); }
  /// Fourth-order central differences of h.
  double h_sbar(double sbar, double th1, double th2) const;
  Vec2 h_theta(double sbar, double th1, double th2) const;
  double sbar_at(int k) const { return sbar_min + (sbar_max - sbar_min) * k / (n_sbar - 1); }
};

struct TubeInfo {
  std::string name;
  std::string chart;
  std::string description;
};

std::vector<TubeInfo> builtin_tubes();
TubeGraph make_builtin_tube(const std::string& name);
TubeGraph tube_from_json(const nlohmann::json& doc, const std::string& origin);
TubeGraph load_tube(const std::string& path);
/// Builtin name or file path.
TubeGraph resolve_tube(const std::string& selector);

/// sbar = hbar(s, theta), the inverse of h in its first argument near a point.
class LocalInverse {
 public:
  LocalInverse(const TubeGraph& tube, double sbar_lo, double sbar_hi);
  /// Throws SolverError if h(., theta) - s has no sign change on the box.
  double operator()(double s, double th1, double th2) const;
  /// |h(hbar(s, theta), theta) - s| at one point.
  double residual(double s, double th1, double th2) const;
  double sbar_lo() const { return lo_; }
  double sbar_hi() const { return hi_; }

 private:
  TubeGraph tube_;
  double lo_, hi_;
};

/// Local inverse around (sbar0, theta0); the box is the sbar interval of half
/// width `half` (clipped to the tube range). Throws NotReparametrizableError if
/// |h_sbar| <= 1e-8 at the base point.
LocalInverse implicit_reparametrize(const TubeGraph& tube, double sbar0, double th1, double th2,
                                    double half);

/// Gridded hbar on a theta grid at fixed s, with the worst residual.
struct GriddedInverse {
  std::vector<double> values;  // indexed by grid.flat(i, j)
  double max_residual = 0.0;
};
GriddedInverse grid_inverse(const LocalInverse& inv, const ThetaGrid& grid, double s);

struct SectionSpec {
  enum class Kind { constant, bump };
  Kind kind = Kind::constant;
  double s0 = 0.0;
  Vec2 theta0 = Vec2::Zero();  // bump centre, placed on a grid node
  Mat2 hessian = Mat2::Zero();

  /// f(theta) = s0 + 1/2 H_ij sin(theta^i - theta0^i) sin(theta^j - theta0^j)
  double f(double th1, double th2) const;
};

/// Section through the tube parametrised by s: f from the spec, fbar = hbar(f, theta).
/// Throws NotSpacelikeError if the induced metric fails to be positive definite.
SurfaceGraph section_from_tube(const DoubleNullChart& chart, const ThetaGrid& grid, const LocalInverse& hbar,
                               const SectionSpec& spec);

/// Section parametrised by sbar: fbar given, f = h(fbar, theta). Works for every
/// tube, including those with h_sbar = 0.
SurfaceGraph section_over_sbar(const DoubleNullChart& chart, const TubeGraph& tube, const ThetaGrid& grid,
                               const GraphFunction& fbar);

struct TangencySample {
  double hessian_trace = 0.0;  // gamma^{ij} H_ij
  double trchi_dot = 0.0;      // from the closed-form evaluator
  double predicted = 0.0;      // tr chi(p0) - 2 Omega^2 gamma^{ij} H_ij
  double residual = 0.0;
  double frame_at_p0 = 0.0;    // max(|e|, |eps vec|, |eps|) at p0
};

struct TangencyReport {
  double s0 = 0.0, sbar0 = 0.0;
  Vec2 theta0 = Vec2::Zero();
  double tr_chi = 0.0, Omega2 = 0.0;
  std::vector<TangencySample> samples;
  double max_residual = 0.0;
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
  double expected_slope = 0.0;
  double slope_relative_error = 0.0;
};

struct BumpFamily {
  int count = 50;
  std::uint64_t seed = 1;
  double hessian_scale = 0.5;  // entries of H uniform in [-scale, scale]
  int grid_n = 17;             // odd, so theta0 is the centre node
  double half_width = 0.08;
};

TangencyReport tangency_identity_residual(const DoubleNullChart& chart, const TubeGraph& tube, double s0,
                                          const Vec2& theta0, const BumpFamily& family = {});

enum class CausalClass { null, spacelike, timelike, mixed };
const char* to_string(CausalClass c);

struct TubeNodeClass {
  double sbar = 0.0, th1 = 0.0, th2 = 0.0;
  double det = 0.0;          // det of the induced 3-metric
  double normal_norm = 0.0;  // g^{-1}(n, n) for n = ds - h_sbar dsbar - h_a dtheta^a
  CausalClass cls = CausalClass::null;
};

struct ClassifyReport {
  std::vector<TubeNodeClass> nodes;
  int n_null = 0, n_spacelike = 0, n_timelike = 0;
  CausalClass overall = CausalClass::null;
  double N_fraction = 0.0;  // share of nodes with |h_sbar| > tolerance
};

ClassifyReport classify_tube(const DoubleNullChart& chart, const TubeGraph& tube, double tol = 1e-10);

struct ScanOptions {
  int levels = 8;
  int bumps_per_level = 16;
  int grid_n = 16;
  std::uint64_t seed = 1;
  double tol = 1e-8;
  double bump_amplitude = 0.1;
};

struct SectionResult {
  int level = 0;
  int bump = -1;  // -1: constant slice
  double sbar_level = 0.0;
  double max_abs_trchi = 0.0;
  double max_shear2 = 0.0;
  bool marginal = false;
};

struct ScanReport {
  std::vector<SectionResult> sections;
  bool all_sections_marginal = false;
  double max_expansion = 0.0;
  double max_shear2 = 0.0;
};

ScanReport marginality_scan(const DoubleNullChart& chart, const TubeGraph& tube, const ScanOptions& opt = {});

struct TubeReport {
  std::string tube, chart;
  ClassifyReport classification;
  ScanReport scan;
  /// False exactly when the tube is spacelike and every scanned section is marginal.
  bool theorem_consistent = true;
};

TubeReport verify_tube(const DoubleNullChart& chart, const TubeGraph& tube, const ScanOptions& opt = {});

}  // namespace nulltube
