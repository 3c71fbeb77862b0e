#include "nulltube/charts.hpp"

#include <boost/math/special_functions/lambert_w.hpp>
#include <cmath>
#include <sstream>

#include "nulltube/errors.hpp"

namespace nulltube {

namespace {
std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}
}  // namespace

double lambert_w0(double x) { return boost::math::lambert_w0(x); }

Jet2 lambert_w0(const Jet2& a) {
  const double w = boost::math::lambert_w0(a.v);
  const double w1 = std::exp(-w) / (1.0 + w);
  const double w2 = -w1 * w1 * (2.0 + w) / (1.0 + w);
  return a.chain(w, w1, w2);
}

Mat2 MetricSample::gamma_value() const {
  Mat2 m;
  m << gamma[0][0].v, gamma[0][1].v, gamma[1][0].v, gamma[1][1].v;
  return m;
}

void MetricSample::validate() const {
  if (!(omega.v > 0.0)) throw InvariantViolation("Omega must be positive, got " + fmt(omega.v));
  if (gamma[0][1].v != gamma[1][0].v)
    throw InvariantViolation("gamma is not symmetric: gamma12 = " + fmt(gamma[0][1].v) +
                             ", gamma21 = " + fmt(gamma[1][0].v));
  const double g11 = gamma[0][0].v, g22 = gamma[1][1].v;
  const double det = g11 * g22 - gamma[0][1].v * gamma[0][1].v;
  if (!(g11 > 0.0) || !(det > 0.0))
    throw InvariantViolation("gamma is not positive definite (gamma11 = " + fmt(g11) +
                             ", det = " + fmt(det) + ")");
}

bool DoubleNullChart::contains(const ChartPoint& p) const {
  if (!(p.s >= rect_.s_min && p.s <= rect_.s_max)) return false;
  if (!(p.sbar >= rect_.sbar_min && p.sbar <= rect_.sbar_max)) return false;
  if (topology_.kind == TopologyKind::spherical_patch &&
      !(p.th1 >= topology_.th1_min && p.th1 <= topology_.th1_max))
    return false;
  return std::isfinite(p.th1) && std::isfinite(p.th2);
}

void DoubleNullChart::check(const ChartPoint& p) const {
  auto bound = [&](const char* axis, double v, double lo, double hi) {
    if (!(v >= lo)) throw DomainError(name_ + ": " + axis + " = " + fmt(v) + " below lower bound " + fmt(lo));
    if (!(v <= hi)) throw DomainError(name_ + ": " + axis + " = " + fmt(v) + " above upper bound " + fmt(hi));
  };
  bound("s", p.s, rect_.s_min, rect_.s_max);
  bound("sbar", p.sbar, rect_.sbar_min, rect_.sbar_max);
  if (topology_.kind == TopologyKind::spherical_patch)
    bound("th1", p.th1, topology_.th1_min, topology_.th1_max);
  if (!std::isfinite(p.th1) || !std::isfinite(p.th2)) throw DomainError(name_ + ": non-finite angle");
}

ChartPoint DoubleNullChart::normalize(ChartPoint p) const {
  auto wrap = [](double x, double period) {
    double r = std::fmod(x, period);
    if (r < 0.0) r += period;
    return r;
  };
  if (topology_.kind == TopologyKind::torus) p.th1 = wrap(p.th1, topology_.period[0]);
  p.th2 = wrap(p.th2, topology_.period[1]);
  return p;
}

MetricSample DoubleNullChart::eval(const ChartPoint& p) const {
  check(p);
  MetricSample m = evaluator_(p);
  m.validate();
  return m;
}

MetricJet assemble_metric_jet(const MetricSample& m) {
  MetricJet g;
  const Jet2 om2 = m.omega * m.omega;
  // gamma_ab b^b
  std::array<Jet2, 2> gb;
  for (int a = 0; a < 2; ++a) gb[a] = m.gamma[a][0] * m.b[0] + m.gamma[a][1] * m.b[1];
  g[0][0] = gb[0] * m.b[0] + gb[1] * m.b[1];
  g[0][1] = g[1][0] = 2.0 * om2;
  g[1][1] = Jet2(0.0);
  for (int a = 0; a < 2; ++a) {
    g[2 + a][0] = -gb[a];
    g[0][2 + a] = -(m.gamma[0][a] * m.b[0] + m.gamma[1][a] * m.b[1]);
    g[1][2 + a] = g[2 + a][1] = Jet2(0.0);
    for (int b = 0; b < 2; ++b) g[2 + a][2 + b] = m.gamma[a][b];
  }
  return g;
}

MetricMatrix assemble_metric(const MetricSample& m) {
  const MetricJet gj = assemble_metric_jet(m);
  MetricMatrix out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out.g(i, j) = gj[i][j].v;
  const double scale = out.g.cwiseAbs().maxCoeff();
  const double det = out.g.determinant();
  if (!(std::abs(det) > 1e-14 * std::pow(scale, 4)))
    throw DegenerateMetricError("metric is singular (det = " + fmt(det) + ")");
  out.inverse = out.g.inverse();
  return out;
}

double EikonalResidual::max() const { return std::max({grad_s, grad_sbar, conjugacy}); }

EikonalResidual verify_eikonal(const DoubleNullChart& chart, const ChartPoint& p) {
  const MetricSample m = chart.eval(p);
  m.validate();
  const MetricMatrix mm = assemble_metric(m);
  EikonalResidual r;
  r.grad_s = std::abs(mm.inverse(0, 0));
  r.grad_sbar = std::abs(mm.inverse(1, 1));
  // L' = 2 grad s, Lbar' = 2 grad sbar
  r.conjugacy = std::abs(4.0 * mm.inverse(0, 1) - 2.0 / m.omega2());
  return r;
}

std::vector<ChartPoint> sample_points(const DoubleNullChart& chart, int n_null, int n_angle,
                                      double margin) {
  const auto& r = chart.rectangle();
  const auto& t = chart.topology();
  auto axis = [&](double lo, double hi, int n, bool periodic) {
    std::vector<double> v;
    if (periodic) {
      for (int k = 0; k < n; ++k) v.push_back(lo + (hi - lo) * (k + 0.5) / n);
      return v;
    }
    const double pad = margin * (hi - lo);
    lo += pad;
    hi -= pad;
    for (int k = 0; k < n; ++k) v.push_back(n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * k / (n - 1));
    return v;
  };
  const auto s = axis(r.s_min, r.s_max, n_null, false);
  const auto sb = axis(r.sbar_min, r.sbar_max, n_null, false);
  const bool torus = t.kind == TopologyKind::torus;
  const auto a1 = torus ? axis(0.0, t.period[0], n_angle, true) : axis(t.th1_min, t.th1_max, n_angle, false);
  const auto a2 = axis(0.0, t.period[1], n_angle, true);
  std::vector<ChartPoint> pts;
  pts.reserve(s.size() * sb.size() * a1.size() * a2.size());
  for (double x0 : s)
    for (double x1 : sb)
      for (double x2 : a1)
        for (double x3 : a2) pts.push_back({x0, x1, x2, x3});
  return pts;
}

}  // namespace nulltube
