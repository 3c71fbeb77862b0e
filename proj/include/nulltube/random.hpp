#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace nulltube {

/// mt19937_64 with a fixed double conversion so streams are identical across
/// standard libraries (std::uniform_real_distribution is not portable).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// sum of a cos(k.theta) + b sin(k.theta) over integer wave vectors with
/// |k1|, |k2| <= degree, plus a constant.
struct TrigPoly {
  struct Term {
    int k1, k2;
    double a, b;
  };
  double constant = 0.0;
  std::vector<Term> terms;

  double operator()(double th1, double th2) const;

  /// Random coefficients scaled so that sum |a| + |b| equals `amplitude`
  /// (hence |p - constant| <= amplitude everywhere).
  static TrigPoly random(Rng& rng, int degree, double amplitude, double constant = 0.0);
};

}  // namespace nulltube
