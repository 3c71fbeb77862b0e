#include "nulltube/random.hpp"

#include <cmath>

namespace nulltube {

double TrigPoly::operator()(double th1, double th2) const {
  double v = constant;
  for (const Term& t : terms) {
    const double ph = t.k1 * th1 + t.k2 * th2;
    v += t.a * std::cos(ph) + t.b * std::sin(ph);
  }
  return v;
}

TrigPoly TrigPoly::random(Rng& rng, int degree, double amplitude, double constant) {
  TrigPoly p;
  p.constant = constant;
  double total = 0.0;
  // half-plane of wave vectors; (0, 0) is the constant
  for (int k1 = 0; k1 <= degree; ++k1)
    for (int k2 = -degree; k2 <= degree; ++k2) {
      if (k1 == 0 && k2 <= 0) continue;
      const double decay = 1.0 / (1.0 + k1 * k1 + k2 * k2);
      Term t{k1, k2, rng.uniform(-1.0, 1.0) * decay, rng.uniform(-1.0, 1.0) * decay};
      total += std::abs(t.a) + std::abs(t.b);
      p.terms.push_back(t);
    }
  if (total > 0.0)
    for (Term& t : p.terms) {
      t.a *= amplitude / total;
      t.b *= amplitude / total;
    }
  return p;
}

}  // namespace nulltube
