#include "nulltube/grid.hpp"

#include "nulltube/errors.hpp"

namespace nulltube {

int GridAxis::slot(int k) const {
  if (periodic) return ((k % n) + n) % n;
  return k + ghosts();
}

bool ThetaGrid::reachable(int i, int j, int reach) const {
  auto ok = [reach](const GridAxis& a, int k) {
    if (a.periodic) return true;
    return k - reach >= -a.ghosts() && k + reach < a.n + a.ghosts();
  };
  return ok(axis[0], i) && ok(axis[1], j);
}

ThetaGrid ThetaGrid::torus(int n, double period0, double period1) {
  if (n < 5) throw ConfigError("torus grid needs at least 5 nodes per axis");
  ThetaGrid g;
  g.axis[0] = {n, 0.0, period0, true};
  g.axis[1] = {n, 0.0, period1, true};
  return g;
}

ThetaGrid ThetaGrid::patch(int n, double c1, double c2, double half1, double half2) {
  if (n < 2) throw ConfigError("patch grid needs at least 2 nodes per axis");
  ThetaGrid g;
  g.axis[0] = {n, c1 - half1, c1 + half1, false};
  g.axis[1] = {n, c2 - half2, c2 + half2, false};
  return g;
}

}  // namespace nulltube
