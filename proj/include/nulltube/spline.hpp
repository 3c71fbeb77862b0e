#pragma once

#include <array>
#include <vector>

namespace nulltube {

struct SplineAxis {
  double lower = 0.0;
  double step = 1.0;
  int n = 0;             // number of data nodes
  bool periodic = false;  // periodic axes cover [lower, lower + n*step)

  double upper() const { return periodic ? lower + n * step : lower + (n - 1) * step; }
};

/// Tensor-product uniform cubic B-spline interpolant in up to four dimensions.
/// Non-periodic ends take the second derivative from a one-sided fourth-order
/// difference of the data, so the interpolant is fourth-order accurate up to the
/// boundary.
class CubicSpline {
 public:
  static constexpr int max_dims = 4;

  CubicSpline() = default;
  /// `values` in row-major order over the axes.
  CubicSpline(std::vector<SplineAxis> axes, const std::vector<double>& values);

  int dims() const { return static_cast<int>(axes_.size()); }
  const std::vector<SplineAxis>& axes() const { return axes_; }

  /// Value at x; optionally gradient (dims entries) and Hessian (dims*dims, row-major).
  double eval(const double* x, double* grad = nullptr, double* hess = nullptr) const;

 private:
  std::vector<SplineAxis> axes_;
  std::array<int, max_dims> extent_{};  // coefficient count per axis
  std::vector<double> coef_;
};

}  // namespace nulltube
