#include "nulltube/finder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nulltube/errors.hpp"
#include "nulltube/parallel.hpp"
#include "nulltube/roots.hpp"

namespace nulltube {

RootResult safeguarded_root(const std::function<double(double)>& F, double a, double b, double xtol,
                            double ftol, int max_iterations, const std::function<double(double)>& dF) {
  if (a > b) std::swap(a, b);
  double fa = F(a), fb = F(b);
  RootResult r;
  if (std::abs(fa) <= ftol) return {a, fa, 0, 0};
  if (std::abs(fb) <= ftol) return {b, fb, 0, 0};
  if ((fa > 0.0) == (fb > 0.0)) {
    std::ostringstream msg;
    msg << "no sign change on [" << a << ", " << b << "]: F = " << fa << ", " << fb;
    throw SolverError(msg.str());
  }
  auto deriv = [&](double x, double lo, double hi) {
    if (dF) return dF(x);
    double h = 1e-5 * (hi - lo);
    if (x - h < lo) return (F(x + h) - F(x)) / h;
    if (x + h > hi) return (F(x) - F(x - h)) / h;
    return (F(x + h) - F(x - h)) / (2.0 * h);
  };
  double x = 0.5 * (a + b);
  double fx = F(x);
  for (r.iterations = 1; r.iterations <= max_iterations; ++r.iterations) {
    if (std::abs(fx) <= ftol || b - a <= xtol) break;
    if ((fx > 0.0) == (fa > 0.0)) {
      a = x;
      fa = fx;
    } else {
      b = x;
    }
    const double d = deriv(x, a, b);
    double xn = d != 0.0 ? x - fx / d : a - 1.0;
    bool bisect = !(xn > a && xn < b);
    double fn = 0.0;
    if (!bisect) {
      fn = F(xn);
      bisect = std::abs(fn) > 0.5 * std::abs(fx) && b - a > 1e3 * xtol;
    }
    if (bisect) {
      ++r.bisections;
      xn = 0.5 * (a + b);
      fn = F(xn);
    }
    if (xn == x) break;
    x = xn;
    fx = fn;
  }
  if (std::abs(fx) > ftol && b - a > xtol) throw SolverError("root iteration did not converge");
  r.x = x;
  r.fx = fx;
  return r;
}

namespace {

ChartPoint generator_point(ConeFamily family, double fixed, double x, double th1, double th2) {
  return family == ConeFamily::outgoing ? ChartPoint{fixed, x, th1, th2} : ChartPoint{x, fixed, th1, th2};
}

}  // namespace

std::vector<std::pair<double, double>> expansion_profile(const DoubleNullChart& chart, double fixed,
                                                         double lo, double hi, double th1, double th2,
                                                         int n, ConeFamily family) {
  if (n < 2) throw ConfigError("expansion profile needs at least 2 samples");
  std::vector<std::pair<double, double>> out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) {
    const double x = lo + (hi - lo) * k / (n - 1);
    out.emplace_back(x, structure_coefficients(chart, generator_point(family, fixed, x, th1, th2)).tr_chi());
  }
  return out;
}

SurfaceGraph MarginalSection::graph() const {
  std::vector<double> constant(root.size(), fixed);
  return family == ConeFamily::outgoing ? SurfaceGraph::from_values(grid, constant, root)
                                        : SurfaceGraph::from_values(grid, root, constant);
}

MarginalSection find_marginal_on_cone(const DoubleNullChart& chart, double fixed, const ThetaGrid& grid,
                                      double lo, double hi, const FinderOptions& opt) {
  if (!(hi > lo)) throw ConfigError("bracket must satisfy lo < hi");
  if (!(opt.tol > 0.0)) throw ConfigError("finder tolerance must be positive");
  chart.check(generator_point(opt.family, fixed, lo, grid.axis[0].coord(0), grid.axis[1].coord(0)));
  chart.check(generator_point(opt.family, fixed, hi, grid.axis[0].coord(0), grid.axis[1].coord(0)));

  MarginalSection sec;
  sec.family = opt.family;
  sec.fixed = fixed;
  sec.lo = lo;
  sec.hi = hi;
  sec.grid = grid;
  const std::size_t n = grid.storage();
  sec.root.assign(n, 0.0);
  sec.residual.assign(n, 0.0);
  sec.iterations.assign(n, 0);
  sec.multiple.assign(n, 0);
  std::vector<double> scale(n, 0.0);
  std::vector<char> failed(n, 0);

  // logical node of each storage slot
  std::vector<std::pair<int, int>> logical(n);
  const GridAxis& a0 = grid.axis[0];
  const GridAxis& a1 = grid.axis[1];
  for (int i = -a0.ghosts(); i < a0.n + a0.ghosts(); ++i)
    for (int j = -a1.ghosts(); j < a1.n + a1.ghosts(); ++j) logical[grid.flat(i, j)] = {i, j};

  parallel_for(n, [&](std::size_t k) {
    const double t1 = a0.coord(logical[k].first), t2 = a1.coord(logical[k].second);
    const auto prof = expansion_profile(chart, fixed, lo, hi, t1, t2, opt.profile_samples, opt.family);
    double sc = 0.0;
    for (const auto& [x, v] : prof) sc = std::max(sc, std::abs(v));
    scale[k] = sc;
    // sign-change cells, exact zeros count as a change
    std::vector<std::pair<double, double>> cells;
    for (std::size_t q = 0; q + 1 < prof.size(); ++q)
      if ((prof[q].second > 0.0) != (prof[q + 1].second > 0.0) || prof[q].second == 0.0)
        cells.emplace_back(prof[q].first, prof[q + 1].first);
    if (prof.back().second == 0.0) cells.emplace_back(prof[prof.size() - 2].first, prof.back().first);
    if (cells.empty()) {
      failed[k] = 1;
      return;
    }
    const double mid = 0.5 * (lo + hi);
    std::size_t best = 0;
    for (std::size_t q = 1; q < cells.size(); ++q)
      if (std::abs(0.5 * (cells[q].first + cells[q].second) - mid) <
          std::abs(0.5 * (cells[best].first + cells[best].second) - mid))
        best = q;
    sec.multiple[k] = cells.size() > 1;
    auto F = [&](double x) {
      return structure_coefficients(chart, generator_point(opt.family, fixed, x, t1, t2)).tr_chi();
    };
    const RootResult r = safeguarded_root(F, cells[best].first, cells[best].second,
                                          4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(mid)),
                                          opt.tol * sc);
    sec.root[k] = r.x;
    sec.residual[k] = std::abs(r.fx);
    sec.iterations[k] = r.iterations;
  });

  std::size_t n_failed = 0, n_multiple = 0;
  std::size_t first_failed = n;
  for (std::size_t k = 0; k < n; ++k) {
    if (failed[k]) {
      ++n_failed;
      first_failed = std::min(first_failed, k);
    }
    n_multiple += sec.multiple[k] ? 1 : 0;
    sec.max_residual = std::max(sec.max_residual, sec.residual[k]);
    sec.expansion_scale = std::max(sec.expansion_scale, scale[k]);
  }
  if (n_failed > 0) {
    std::ostringstream msg;
    msg << "no marginal surface in bracket [" << lo << ", " << hi << "] at " << n_failed << " of " << n
        << " nodes (first at theta = (" << a0.coord(logical[first_failed].first) << ", "
        << a1.coord(logical[first_failed].second) << "))";
    throw SolverError(msg.str());
  }
  if (n_multiple > 0)
    sec.warnings.push_back(std::to_string(n_multiple) +
                           " nodes have several sign changes; the root nearest the bracket midpoint was taken");
  return sec;
}

}  // namespace nulltube
