#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>

#include "nulltube/charts.hpp"
#include "nulltube/errors.hpp"
#include "nulltube/spline.hpp"

namespace nulltube {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
  throw LoadError(origin + ": " + what);
}

std::array<double, 2> range(const json& dom, const char* key, const std::string& origin) {
  if (!dom.contains(key)) fail(origin, std::string("domain.") + key + " missing");
  const json& r = dom.at(key);
  if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number())
    fail(origin, std::string("domain.") + key + " must be [lower, upper]");
  const double lo = r[0].get<double>(), hi = r[1].get<double>();
  if (!(hi > lo)) fail(origin, std::string("domain.") + key + " must have upper > lower");
  return {lo, hi};
}

std::vector<double> field(const json& doc, const char* key, std::size_t count,
                          const std::string& origin) {
  const json& a = doc.at(key);
  if (!a.is_array()) fail(origin, std::string("'") + key + "' must be an array");
  if (a.size() != count)
    fail(origin, std::string("'") + key + "' has " + std::to_string(a.size()) + " entries, grid needs " +
                     std::to_string(count));
  std::vector<double> v(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (!a[i].is_number()) fail(origin, std::string("'") + key + "'[" + std::to_string(i) + "] is not a number");
    v[i] = a[i].get<double>();
    if (!std::isfinite(v[i])) fail(origin, std::string("'") + key + "'[" + std::to_string(i) + "] is not finite");
  }
  return v;
}

struct LoadedFields {
  CubicSpline omega, b1, b2, g11, g12, g22, g21;
  bool has_b = false;
  bool has_g21 = false;
};

Jet2 to_jet(const CubicSpline& sp, const double x[4]) {
  Jet2 j;
  double hess[16];
  j.v = sp.eval(x, j.d.data(), hess);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) j.dd[a][b] = hess[4 * a + b];
  return j;
}

}  // namespace

DoubleNullChart chart_from_json(const json& doc, const std::string& origin) {
  if (!doc.is_object()) fail(origin, "top level must be an object");
  for (const char* key : {"topology", "domain", "grid", "omega", "gamma11", "gamma12", "gamma22"})
    if (!doc.contains(key)) fail(origin, std::string("missing key '") + key + "'");
  if (doc.contains("order") && doc.at("order") != 3)
    fail(origin, "only interpolation order 3 is supported");

  const std::string name = doc.value("name", std::string("loaded"));
  const std::string topo = doc.at("topology").get<std::string>();
  Topology topology;
  if (topo == "torus") topology.kind = TopologyKind::torus;
  else if (topo == "spherical_patch") topology.kind = TopologyKind::spherical_patch;
  else fail(origin, "topology must be 'torus' or 'spherical_patch'");

  const json& dom = doc.at("domain");
  const auto rs = range(dom, "s", origin);
  const auto rsb = range(dom, "sbar", origin);
  const auto r1 = range(dom, "theta1", origin);
  const auto r2 = range(dom, "theta2", origin);

  const json& grid = doc.at("grid");
  const json& shape_j = grid.is_object() ? grid.at("shape") : grid;
  if (!shape_j.is_array() || shape_j.size() != 4) fail(origin, "grid.shape must list 4 sizes");
  std::array<int, 4> shape{};
  std::size_t count = 1;
  for (int a = 0; a < 4; ++a) {
    shape[a] = shape_j[a].get<int>();
    if (shape[a] < 5) fail(origin, "grid.shape entries must be at least 5");
    count *= static_cast<std::size_t>(shape[a]);
  }

  std::vector<SplineAxis> axes(4);
  axes[0] = {rs[0], (rs[1] - rs[0]) / (shape[0] - 1), shape[0], false};
  axes[1] = {rsb[0], (rsb[1] - rsb[0]) / (shape[1] - 1), shape[1], false};
  if (topology.kind == TopologyKind::torus) {
    topology.period = {r1[1] - r1[0], r2[1] - r2[0]};
    axes[2] = {r1[0], topology.period[0] / shape[2], shape[2], true};
  } else {
    topology.th1_min = r1[0];
    topology.th1_max = r1[1];
    topology.period = {2.0 * std::numbers::pi, r2[1] - r2[0]};
    axes[2] = {r1[0], (r1[1] - r1[0]) / (shape[2] - 1), shape[2], false};
  }
  axes[3] = {r2[0], topology.period[1] / shape[3], shape[3], true};

  const auto omega = field(doc, "omega", count, origin);
  const auto g11 = field(doc, "gamma11", count, origin);
  const auto g12 = field(doc, "gamma12", count, origin);
  const auto g22 = field(doc, "gamma22", count, origin);

  auto location = [&](std::size_t flat) {
    std::array<int, 4> idx{};
    for (int a = 3; a >= 0; --a) {
      idx[a] = static_cast<int>(flat % shape[a]);
      flat /= shape[a];
    }
    std::ostringstream os;
    os << "node (" << idx[0] << "," << idx[1] << "," << idx[2] << "," << idx[3] << ") at (s,sbar,th1,th2) = (";
    for (int a = 0; a < 4; ++a) os << (a ? "," : "") << axes[a].lower + idx[a] * axes[a].step;
    os << ")";
    return os.str();
  };
  for (std::size_t i = 0; i < count; ++i) {
    if (!(omega[i] > 0.0)) fail(origin, "non-positive omega at " + location(i));
    if (!(g11[i] > 0.0 && g11[i] * g22[i] - g12[i] * g12[i] > 0.0))
      fail(origin, "gamma not positive definite at " + location(i));
  }

  auto f = std::make_shared<LoadedFields>();
  f->omega = CubicSpline(axes, omega);
  f->g11 = CubicSpline(axes, g11);
  f->g12 = CubicSpline(axes, g12);
  f->g22 = CubicSpline(axes, g22);
  if (doc.contains("b1") || doc.contains("b2")) {
    if (!(doc.contains("b1") && doc.contains("b2"))) fail(origin, "b1 and b2 must be given together");
    f->has_b = true;
    f->b1 = CubicSpline(axes, field(doc, "b1", count, origin));
    f->b2 = CubicSpline(axes, field(doc, "b2", count, origin));
  }
  if (doc.contains("gamma21")) {
    f->has_g21 = true;
    f->g21 = CubicSpline(axes, field(doc, "gamma21", count, origin));
  }

  Rectangle rect{rs[0], rs[1], rsb[0], rsb[1]};
  Params params;
  return {name, params, topology, rect, [f](const ChartPoint& p) {
            const double x[4] = {p.s, p.sbar, p.th1, p.th2};
            MetricSample m;
            m.omega = to_jet(f->omega, x);
            if (f->has_b) m.b = {to_jet(f->b1, x), to_jet(f->b2, x)};
            else m.b = {Jet2(0.0), Jet2(0.0)};
            m.gamma[0][0] = to_jet(f->g11, x);
            m.gamma[0][1] = to_jet(f->g12, x);
            m.gamma[1][0] = f->has_g21 ? to_jet(f->g21, x) : m.gamma[0][1];
            m.gamma[1][1] = to_jet(f->g22, x);
            return m;
          }};
}

DoubleNullChart load_chart(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(path + ": cannot open file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw LoadError(path + ": malformed JSON (" + e.what() + ")");
  }
  try {
    return chart_from_json(doc, path);
  } catch (const json::exception& e) {
    throw LoadError(path + ": " + e.what());
  }
}

}  // namespace nulltube
