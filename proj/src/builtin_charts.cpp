#include <cmath>
#include <filesystem>
#include <numbers>

#include "nulltube/charts.hpp"
#include "nulltube/errors.hpp"

namespace nulltube {
namespace {

constexpr double pi = std::numbers::pi;

struct Vars {
  Jet2 s, sbar, th1, th2;
};

template <class Fields>
Evaluator jet_evaluator(Fields fields) {
  return [fields](const ChartPoint& p) {
    Vars v{Jet2::variable(p.s, 0), Jet2::variable(p.sbar, 1), Jet2::variable(p.th1, 2),
           Jet2::variable(p.th2, 3)};
    MetricSample m;
    m.b = {Jet2(0.0), Jet2(0.0)};
    fields(v, m);
    return m;
  };
}

Params merge(const std::string& chart, const Params& defaults, const Params& given) {
  Params out = defaults;
  for (const auto& [k, v] : given) {
    if (!defaults.count(k)) throw ConfigError("chart '" + chart + "' has no parameter '" + k + "'");
    if (!std::isfinite(v)) throw ConfigError("parameter '" + k + "' is not finite");
    out[k] = v;
  }
  return out;
}

Topology sphere_patch() {
  Topology t;
  t.kind = TopologyKind::spherical_patch;
  t.th1_min = 0.2;
  t.th1_max = pi - 0.2;
  return t;
}

void round_sphere(const Jet2& r, const Jet2& th1, MetricSample& m) {
  const Jet2 r2 = r * r;
  const Jet2 sn = sin(th1);
  m.gamma[0][0] = r2;
  m.gamma[0][1] = m.gamma[1][0] = Jet2(0.0);
  m.gamma[1][1] = r2 * sn * sn;
}

DoubleNullChart minkowski(const Params& given) {
  const Params p = merge("minkowski", {}, given);
  return {"minkowski", p, sphere_patch(), {0.05, 100.0, 0.05, 100.0},
          jet_evaluator([](const Vars& v, MetricSample& m) {
            m.omega = Jet2(1.0);
            round_sphere(v.s + v.sbar, v.th1, m);
          })};
}

// Minkowski after th2 -> th2 + psi(s), psi(s) = a s + k s^2 / 2.
DoubleNullChart minkowski_shifted(const Params& given) {
  const Params p = merge("minkowski_shifted", {{"a", 0.1}, {"k", 0.02}}, given);
  const double a = p.at("a"), k = p.at("k");
  return {"minkowski_shifted", p, sphere_patch(), {0.05, 100.0, 0.05, 100.0},
          jet_evaluator([a, k](const Vars& v, MetricSample& m) {
            m.omega = Jet2(1.0);
            round_sphere(v.s + v.sbar, v.th1, m);
            m.b[1] = a + k * v.s;
          })};
}

// Kruskal form with s = -U, sbar = V, r = 2M (1 + W0(s sbar / e)).
DoubleNullChart schwarzschild_kruskal(const Params& given) {
  const Params p = merge("schwarzschild_kruskal", {{"M", 1.0}}, given);
  const double M = p.at("M");
  if (!(M > 0.0)) throw ConfigError("schwarzschild_kruskal: M must be positive");
  return {"schwarzschild_kruskal", p, sphere_patch(), {-0.5, 1.5, -0.5, 1.5},
          jet_evaluator([M](const Vars& v, MetricSample& m) {
            const Jet2 w = lambert_w0(v.s * v.sbar / std::numbers::e);
            const Jet2 r = 2.0 * M * (1.0 + w);
            m.omega = sqrt(8.0 * M * M * M / r) * exp(-r / (4.0 * M));
            round_sphere(r, v.th1, m);
          })};
}

DoubleNullChart constant_chart(const Params& given) {
  const Params p = merge("constant",
                         {{"omega", 1.0}, {"b1", 0.0}, {"b2", 0.0}, {"g11", 1.0}, {"g12", 0.0}, {"g22", 1.0}},
                         given);
  const double om = p.at("omega"), b1 = p.at("b1"), b2 = p.at("b2");
  const double g11 = p.at("g11"), g12 = p.at("g12"), g22 = p.at("g22");
  if (!(om > 0.0)) throw ConfigError("constant: omega must be positive");
  if (!(g11 > 0.0 && g11 * g22 - g12 * g12 > 0.0)) throw ConfigError("constant: gamma must be positive definite");
  return {"constant", p, Topology{}, {-10.0, 10.0, -10.0, 10.0},
          [=](const ChartPoint&) {
            MetricSample m;
            m.omega = Jet2(om);
            m.b = {Jet2(b1), Jet2(b2)};
            m.gamma[0][0] = Jet2(g11);
            m.gamma[0][1] = m.gamma[1][0] = Jet2(g12);
            m.gamma[1][1] = Jet2(g22);
            return m;
          }};
}

// Smooth non-vacuum torus chart with every structure coefficient switched on.
// gamma = exp(2 phi) G, phi = -focus (sbar - c)^2 / 2, so trchi changes sign
// near sbar = c(th, s).
DoubleNullChart torus_generic(const Params& given) {
  const Params p = merge("torus_generic", {{"amp", 0.1}, {"focus", 0.5}}, given);
  const double amp = p.at("amp"), focus = p.at("focus");
  if (!(std::abs(amp) < 0.5)) throw ConfigError("torus_generic: |amp| must be below 0.5");
  return {"torus_generic", p, Topology{}, {-2.0, 2.0, -2.0, 2.0},
          jet_evaluator([amp, focus](const Vars& v, MetricSample& m) {
            const Jet2& s = v.s;
            const Jet2& sb = v.sbar;
            const Jet2& t1 = v.th1;
            const Jet2& t2 = v.th2;
            m.omega = exp(amp * (0.5 * sin(t1 + 0.3 * s) + 0.4 * cos(t2 - 0.2 * sb) +
                                 0.3 * sin(s + 0.5 * sb)));
            m.b[0] = amp * (sin(t2 + 0.4 * s) + 0.5 * cos(t1 - 0.3 * sb));
            m.b[1] = amp * (0.7 * cos(t1 + t2 + 0.2 * s) + 0.3 * sin(sb));
            const Jet2 c = 0.3 * sin(t1) + 0.2 * cos(t2) + 0.1 * s;
            const Jet2 d = sb - c;
            const Jet2 conf = exp(-focus * d * d);
            m.gamma[0][0] = conf * (1.0 + 0.5 * amp * sin(t1 + 0.3 * sb));
            m.gamma[0][1] = m.gamma[1][0] = conf * (0.3 * amp * cos(t2 + 0.2 * s));
            m.gamma[1][1] = conf * (1.0 + 0.4 * amp * cos(t1 - t2 + 0.25 * sb));
          })};
}

}  // namespace

std::vector<ChartInfo> builtin_charts() {
  return {
      {"minkowski", "flat spacetime, s=(r-t)/2, sbar=(r+t)/2, round spheres", {}},
      {"minkowski_shifted", "flat spacetime with th2 -> th2 + a s + k s^2/2 (b != 0)",
       {{"a", 0.1}, {"k", 0.02}}},
      {"schwarzschild_kruskal", "Schwarzschild in Kruskal null coordinates s=-U, sbar=V",
       {{"M", 1.0}}},
      {"constant", "constant Omega, b, gamma on a flat torus (planar Minkowski by default)",
       {{"omega", 1.0}, {"b1", 0.0}, {"b2", 0.0}, {"g11", 1.0}, {"g12", 0.0}, {"g22", 1.0}}},
      {"torus_generic", "smooth non-vacuum torus chart with all structure coefficients nonzero",
       {{"amp", 0.1}, {"focus", 0.5}}},
  };
}

DoubleNullChart make_builtin_chart(const std::string& name, const Params& params) {
  if (name == "minkowski") return minkowski(params);
  if (name == "minkowski_shifted") return minkowski_shifted(params);
  if (name == "schwarzschild_kruskal" || name == "schwarzschild") return schwarzschild_kruskal(params);
  if (name == "constant") return constant_chart(params);
  if (name == "torus_generic") return torus_generic(params);
  throw ConfigError("unknown chart '" + name + "'");
}

DoubleNullChart resolve_chart(const std::string& selector, const Params& params) {
  for (const auto& info : builtin_charts())
    if (info.name == selector || (selector == "schwarzschild" && info.name == "schwarzschild_kruskal"))
      return make_builtin_chart(selector, params);
  if (std::filesystem::exists(selector)) {
    if (!params.empty()) throw ConfigError("loaded charts take no --param values");
    return load_chart(selector);
  }
  throw ConfigError("unknown chart '" + selector + "' (not a builtin name or readable file)");
}

}  // namespace nulltube
