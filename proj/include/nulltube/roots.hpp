#pragma once

#include <functional>

namespace nulltube {

struct RootResult {
  double x = 0.0;
  double fx = 0.0;
  int iterations = 0;
  int bisections = 0;
};

/// Newton iteration kept inside a shrinking sign-change bracket; any step that
/// leaves the bracket or fails to halve |F| is replaced by bisection. The
/// derivative is a central difference inside the bracket unless `dF` is given.
/// Throws SolverError when F(a), F(b) have the same strict sign.
RootResult safeguarded_root(const std::function<double(double)>& F, double a, double b, double xtol,
                            double ftol, int max_iterations = 200,
                            const std::function<double(double)>& dF = {});

}  // namespace nulltube
