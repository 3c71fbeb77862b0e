#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nulltube/surface.hpp"

namespace nulltube {

/// outgoing: sections of C_{s = s0}, root of tr chi in sbar.
/// incoming: sections of Cbar_{sbar = sbar0}, root of tr chi in s.
enum class ConeFamily { outgoing, incoming };

struct FinderOptions {
  ConeFamily family = ConeFamily::outgoing;
  double tol = 1e-10;       // relative to the expansion scale on the bracket
  int profile_samples = 48; // sign-change scan used for bracketing
};

struct MarginalSection {
  ConeFamily family = ConeFamily::outgoing;
  double fixed = 0.0;  // s0 (outgoing) or sbar0 (incoming)
  double lo = 0.0, hi = 0.0;
  ThetaGrid grid;
  /// Root per stored grid node, indexed by grid.flat(i, j).
  std::vector<double> root;
  std::vector<double> residual;
  std::vector<int> iterations;
  std::vector<char> multiple;
  double max_residual = 0.0;
  double expansion_scale = 0.0;
  std::vector<std::string> warnings;

  double at(int i, int j) const { return root[grid.flat(i, j)]; }
  /// The section as a surface graph (f, fbar) on the same grid.
  SurfaceGraph graph() const;
};

MarginalSection find_marginal_on_cone(const DoubleNullChart& chart, double fixed, const ThetaGrid& grid,
                                      double lo, double hi, const FinderOptions& opt = {});

/// tr chi sampled at n points on [lo, hi] along one generator.
std::vector<std::pair<double, double>> expansion_profile(const DoubleNullChart& chart, double fixed,
                                                         double lo, double hi, double th1, double th2,
                                                         int n, ConeFamily family = ConeFamily::outgoing);

}  // namespace nulltube
