#pragma once

#include <array>
#include <functional>
#include <vector>

namespace nulltube {

/// One angular axis of a surface grid. Periodic axes cover [lower, upper) with
/// n nodes. Patch axes place n nodes on [lower, upper] inclusive and carry
/// `ghost_width` extra nodes on each side so interior nodes always have full
/// fourth-order stencils (and stencils of stencils, for the oracle).
struct GridAxis {
  static constexpr int ghost_width = 4;

  int n = 16;
  double lower = 0.0;
  double upper = 1.0;
  bool periodic = true;

  int ghosts() const { return periodic ? 0 : ghost_width; }
  int total() const { return n + 2 * ghosts(); }
  double step() const { return periodic ? (upper - lower) / n : (upper - lower) / (n - 1); }
  /// Coordinate of logical node k (k may address ghost nodes).
  double coord(int k) const { return lower + k * step(); }
  /// Storage slot of logical node k, wrapping periodic axes.
  int slot(int k) const;
};

struct ThetaGrid {
  std::array<GridAxis, 2> axis;

  int size() const { return axis[0].n * axis[1].n; }
  std::size_t storage() const { return static_cast<std::size_t>(axis[0].total()) * axis[1].total(); }
  std::size_t flat(int i, int j) const {
    return static_cast<std::size_t>(axis[0].slot(i)) * axis[1].total() + axis[1].slot(j);
  }
  /// True if logical node (i, j) +/- reach stays on stored nodes in both axes.
  bool reachable(int i, int j, int reach) const;

  /// Periodic square grid [0, 2pi)^2.
  static ThetaGrid torus(int n, double period0 = 6.283185307179586, double period1 = 6.283185307179586);
  /// Non-periodic n x n patch of half-width `half` centred at (c1, c2).
  static ThetaGrid patch(int n, double c1, double c2, double half1, double half2);
};

struct Node {
  int i = 0;
  int j = 0;
};

/// Fourth-order central stencils.
inline double fd1(double m2, double m1, double p1, double p2, double h) {
  return (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
}
inline double fd2(double m2, double m1, double c, double p1, double p2, double h) {
  return (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h);
}

}  // namespace nulltube
