#include <fstream>
#include <memory>

#include "nulltube/errors.hpp"
#include "nulltube/expr.hpp"
#include "nulltube/surface.hpp"

namespace nulltube {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
  throw LoadError(origin + ": " + what);
}

std::array<double, 2> pair_of(const json& doc, const char* key, const std::string& origin) {
  if (!doc.contains(key) || !doc[key].is_array() || doc[key].size() != 2)
    fail(origin, std::string("theta.") + key + " must have two entries");
  return {doc[key][0].get<double>(), doc[key][1].get<double>()};
}

}  // namespace

ThetaGrid theta_grid_from_json(const json& doc, const std::string& origin) {
  try {
    const std::string topo = doc.value("topology", std::string("torus"));
    const int n = doc.value("n", 16);
    if (n < 5) fail(origin, "theta.n must be at least 5");
    if (topo == "torus") {
      if (doc.contains("period")) {
        const auto p = pair_of(doc, "period", origin);
        if (!(p[0] > 0.0 && p[1] > 0.0)) fail(origin, "theta.period must be positive");
        return ThetaGrid::torus(n, p[0], p[1]);
      }
      return ThetaGrid::torus(n);
    }
    if (topo == "patch") {
      const auto c = pair_of(doc, "center", origin);
      const auto h = pair_of(doc, "half", origin);
      if (!(h[0] > 0.0 && h[1] > 0.0)) fail(origin, "theta.half must be positive");
      return ThetaGrid::patch(n, c[0], c[1], h[0], h[1]);
    }
    fail(origin, "theta.topology must be 'torus' or 'patch'");
  } catch (const json::exception& e) {
    fail(origin, e.what());
  }
}

SurfaceGraph surface_from_json(const json& doc, const std::string& origin) {
  try {
    if (!doc.contains("theta")) fail(origin, "missing key 'theta'");
    const ThetaGrid grid = theta_grid_from_json(doc["theta"], origin);
    auto field = [&](const char* key) -> std::vector<double> {
      if (!doc.contains(key)) fail(origin, std::string("missing key '") + key + "'");
      const json& v = doc[key];
      std::vector<double> out(grid.storage());
      if (v.is_string()) {
        const Expression e(v.get<std::string>());
        if (e.uses("s") || e.uses("sbar")) fail(origin, std::string(key) + " may depend on th1, th2 only");
        const GridAxis& a0 = grid.axis[0];
        const GridAxis& a1 = grid.axis[1];
        for (int i = -a0.ghosts(); i < a0.n + a0.ghosts(); ++i)
          for (int j = -a1.ghosts(); j < a1.n + a1.ghosts(); ++j)
            out[grid.flat(i, j)] = e(a0.coord(i), a1.coord(j));
        return out;
      }
      if (v.is_array()) {
        out = v.get<std::vector<double>>();
        if (out.size() != grid.storage())
          fail(origin, std::string(key) + " has " + std::to_string(out.size()) + " values, grid stores " +
                           std::to_string(grid.storage()));
        return out;
      }
      fail(origin, std::string(key) + " must be an expression string or an array");
    };
    return SurfaceGraph::from_values(grid, field("f"), field("fbar"));
  } catch (const json::exception& e) {
    fail(origin, e.what());
  }
}

SurfaceGraph load_surface(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open surface file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw LoadError(path + ": " + e.what());
  }
  return surface_from_json(doc, path);
}

}  // namespace nulltube
