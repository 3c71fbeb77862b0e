#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "nulltube/jet.hpp"

namespace nulltube {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

// Coordinate slots used throughout: 0 = s, 1 = sbar, 2 = th1, 3 = th2.
enum Coord : int { S = 0, SBAR = 1, TH1 = 2, TH2 = 3 };

struct ChartPoint {
  double s = 0.0;
  double sbar = 0.0;
  double th1 = 0.0;
  double th2 = 0.0;

  double operator[](int i) const {
    switch (i) {
      case 0: return s;
      case 1: return sbar;
      case 2: return th1;
      default: return th2;
    }
  }
  double& operator[](int i) {
    switch (i) {
      case 0: return s;
      case 1: return sbar;
      case 2: return th1;
      default: return th2;
    }
  }
};

using Params = std::map<std::string, double>;

/// Omega, b, gamma at a point together with their partials to total order 2.
struct MetricSample {
  Jet2 omega;
  std::array<Jet2, 2> b;
  std::array<std::array<Jet2, 2>, 2> gamma;

  /// Throws InvariantViolation on Omega <= 0, gamma12 != gamma21 or gamma not SPD.
  void validate() const;

  double omega2() const { return omega.v * omega.v; }
  Vec2 b_value() const { return {b[0].v, b[1].v}; }
  Mat2 gamma_value() const;
};

enum class TopologyKind { torus, spherical_patch };

struct Topology {
  TopologyKind kind = TopologyKind::torus;
  std::array<double, 2> period{2.0 * 3.14159265358979323846, 2.0 * 3.14159265358979323846};
  // spherical patch: th1 in [th1_min, th1_max], th2 periodic with period[1]
  double th1_min = 0.0;
  double th1_max = 0.0;

  bool periodic(int axis) const { return kind == TopologyKind::torus || axis == 1; }
};

struct Rectangle {
  double s_min = 0.0, s_max = 0.0;
  double sbar_min = 0.0, sbar_max = 0.0;
};

using Evaluator = std::function<MetricSample(const ChartPoint&)>;

class DoubleNullChart {
 public:
  DoubleNullChart() = default;
  DoubleNullChart(std::string name, Params params, Topology topology, Rectangle rect,
                  Evaluator evaluator)
      : name_(std::move(name)),
        params_(std::move(params)),
        topology_(topology),
        rect_(rect),
        evaluator_(std::move(evaluator)) {}

  const std::string& name() const { return name_; }
  const Params& params() const { return params_; }
  const Topology& topology() const { return topology_; }
  const Rectangle& rectangle() const { return rect_; }

  bool contains(const ChartPoint& p) const;
  /// Throws DomainError naming the violated bound.
  void check(const ChartPoint& p) const;
  /// Angles reduced into [0, period) on periodic axes.
  ChartPoint normalize(ChartPoint p) const;

  MetricSample eval(const ChartPoint& p) const;

 private:
  std::string name_;
  Params params_;
  Topology topology_;
  Rectangle rect_;
  Evaluator evaluator_;
};

inline MetricSample eval_chart(const DoubleNullChart& chart, const ChartPoint& p) {
  return chart.eval(p);
}

struct MetricMatrix {
  Mat4 g;
  Mat4 inverse;
};

/// Coordinate components of g with partials (as jets).
using MetricJet = std::array<std::array<Jet2, 4>, 4>;

MetricJet assemble_metric_jet(const MetricSample& sample);
MetricMatrix assemble_metric(const MetricSample& sample);

struct EikonalResidual {
  double grad_s = 0.0;     // |g(grad s, grad s)|
  double grad_sbar = 0.0;  // |g(grad sbar, grad sbar)|
  double conjugacy = 0.0;  // |g(L', Lbar') - 2 Omega^-2|
  double max() const;
};

EikonalResidual verify_eikonal(const DoubleNullChart& chart, const ChartPoint& p);

struct ChartInfo {
  std::string name;
  std::string description;
  Params defaults;
};

std::vector<ChartInfo> builtin_charts();
DoubleNullChart make_builtin_chart(const std::string& name, const Params& params = {});

DoubleNullChart load_chart(const std::string& path);
DoubleNullChart chart_from_json(const nlohmann::json& doc, const std::string& origin);

/// Chart by builtin name or, failing that, by file path.
DoubleNullChart resolve_chart(const std::string& selector, const Params& params);

/// Evenly spaced sample points covering the validity rectangle, shrunk by
/// `margin` (fraction of each extent) so FD stencils fit.
std::vector<ChartPoint> sample_points(const DoubleNullChart& chart, int n_null, int n_angle,
                                      double margin);

}  // namespace nulltube
