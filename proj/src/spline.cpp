#include "nulltube/spline.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace nulltube {
namespace {

// Maps the n samples of one line onto its B-spline coefficients.
Eigen::MatrixXd coefficient_operator(const SplineAxis& ax) {
  const int n = ax.n;
  if (ax.periodic) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) {
      a(k, (k + n - 1) % n) += 1.0 / 6.0;
      a(k, k) += 4.0 / 6.0;
      a(k, (k + 1) % n) += 1.0 / 6.0;
    }
    return a.partialPivLu().inverse();
  }
  // unknowns c_{-1..n}; rows: interpolation at nodes, then the two end
  // second-derivative conditions expressed in the data.
  const int m = n + 2;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(m, n);
  for (int k = 0; k < n; ++k) {
    a(k, k) = 1.0 / 6.0;
    a(k, k + 1) = 4.0 / 6.0;
    a(k, k + 2) = 1.0 / 6.0;
    rhs(k, k) = 1.0;
  }
  static const double w[5] = {35.0, -104.0, 114.0, -56.0, 11.0};
  // c_{-1} - 2 c_0 + c_1 = h^2 y''_0
  a(n, 0) = 1.0;
  a(n, 1) = -2.0;
  a(n, 2) = 1.0;
  for (int j = 0; j < 5; ++j) rhs(n, j) = w[j] / 12.0;
  a(n + 1, m - 3) = 1.0;
  a(n + 1, m - 2) = -2.0;
  a(n + 1, m - 1) = 1.0;
  for (int j = 0; j < 5; ++j) rhs(n + 1, n - 1 - j) = w[j] / 12.0;
  return a.partialPivLu().solve(rhs);
}

void basis(double t, double w[4], double d1[4], double d2[4]) {
  const double u = 1.0 - t;
  w[0] = u * u * u / 6.0;
  w[1] = (3.0 * t * t * t - 6.0 * t * t + 4.0) / 6.0;
  w[2] = (-3.0 * t * t * t + 3.0 * t * t + 3.0 * t + 1.0) / 6.0;
  w[3] = t * t * t / 6.0;
  d1[0] = -0.5 * u * u;
  d1[1] = 1.5 * t * t - 2.0 * t;
  d1[2] = -1.5 * t * t + t + 0.5;
  d1[3] = 0.5 * t * t;
  d2[0] = u;
  d2[1] = 3.0 * t - 2.0;
  d2[2] = -3.0 * t + 1.0;
  d2[3] = t;
}

}  // namespace

CubicSpline::CubicSpline(std::vector<SplineAxis> axes, const std::vector<double>& values)
    : axes_(std::move(axes)) {
  const int d = dims();
  if (d < 1 || d > max_dims) throw std::invalid_argument("spline dimension must be 1..4");
  std::array<int, max_dims> shape{};
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) {
    const auto& ax = axes_[a];
    if (ax.n < (ax.periodic ? 3 : 5)) throw std::invalid_argument("spline axis too short");
    if (!(ax.step > 0.0)) throw std::invalid_argument("spline step must be positive");
    shape[a] = ax.n;
    total *= static_cast<std::size_t>(ax.n);
  }
  if (values.size() != total) throw std::invalid_argument("spline value count does not match grid");

  std::vector<double> cur = values;
  for (int a = 0; a < d; ++a) {
    const Eigen::MatrixXd op = coefficient_operator(axes_[a]);
    const int n_in = shape[a];
    const int n_out = static_cast<int>(op.rows());
    std::size_t outer = 1, inner = 1;
    for (int b = 0; b < a; ++b) outer *= shape[b];
    for (int b = a + 1; b < d; ++b) inner *= shape[b];
    std::vector<double> next(outer * n_out * inner, 0.0);
    Eigen::VectorXd line(n_in);
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t i = 0; i < inner; ++i) {
        for (int k = 0; k < n_in; ++k) line[k] = cur[(o * n_in + k) * inner + i];
        const Eigen::VectorXd c = op * line;
        for (int k = 0; k < n_out; ++k) next[(o * n_out + k) * inner + i] = c[k];
      }
    }
    shape[a] = n_out;
    cur.swap(next);
  }
  extent_ = shape;
  coef_ = std::move(cur);
}

double CubicSpline::eval(const double* x, double* grad, double* hess) const {
  const int d = dims();
  int base[max_dims];
  double w[max_dims][4], d1[max_dims][4], d2[max_dims][4];
  for (int a = 0; a < d; ++a) {
    const auto& ax = axes_[a];
    const double u = (x[a] - ax.lower) / ax.step;
    double k = std::floor(u);
    if (!ax.periodic) k = std::min(std::max(k, 0.0), static_cast<double>(ax.n - 2));
    basis(u - k, w[a], d1[a], d2[a]);
    for (int j = 0; j < 4; ++j) {
      d1[a][j] /= ax.step;
      d2[a][j] /= ax.step * ax.step;
    }
    base[a] = static_cast<int>(k);
  }

  double value = 0.0;
  double g[max_dims] = {0, 0, 0, 0};
  double h[max_dims][max_dims] = {};
  int combos = 1;
  for (int a = 0; a < d; ++a) combos *= 4;
  for (int c = 0; c < combos; ++c) {
    int j[max_dims];
    std::size_t flat = 0;
    int rem = c;
    for (int a = d - 1; a >= 0; --a) {
      j[a] = rem % 4;
      rem /= 4;
    }
    for (int a = 0; a < d; ++a) {
      int idx;
      if (axes_[a].periodic) {
        const int n = axes_[a].n;
        idx = ((base[a] - 1 + j[a]) % n + n) % n;
      } else {
        idx = base[a] + j[a];  // offset of c_{-1}
      }
      flat = flat * extent_[a] + idx;
    }
    const double cv = coef_[flat];
    double prod = 1.0;
    for (int a = 0; a < d; ++a) prod *= w[a][j[a]];
    value += cv * prod;
    if (!grad && !hess) continue;
    for (int a = 0; a < d; ++a) {
      double pa = d1[a][j[a]];
      for (int b = 0; b < d; ++b)
        if (b != a) pa *= w[b][j[b]];
      g[a] += cv * pa;
      if (!hess) continue;
      for (int b = a; b < d; ++b) {
        double pab = 1.0;
        for (int e = 0; e < d; ++e) {
          if (a == b && e == a) pab *= d2[e][j[e]];
          else if (e == a || e == b) pab *= d1[e][j[e]];
          else pab *= w[e][j[e]];
        }
        h[a][b] += cv * pab;
      }
    }
  }
  if (grad)
    for (int a = 0; a < d; ++a) grad[a] = g[a];
  if (hess)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) hess[a * d + b] = a <= b ? h[a][b] : h[b][a];
  return value;
}

}  // namespace nulltube
