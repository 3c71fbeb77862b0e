#pragma once

// Forward-mode automatic differentiation scalars.
//
//  Jet2    value, gradient and Hessian with respect to the four chart
//          coordinates (s, sbar, th1, th2). Analytic charts are written once as
//          templates and evaluated on Jet2 to obtain exact partials up to
//          total order 2.
//  Dual<N> value and first derivatives along N directions.

#include <array>
#include <cmath>

namespace nulltube {

struct Jet2 {
  static constexpr int n = 4;

  double v = 0.0;
  std::array<double, n> d{};
  std::array<std::array<double, n>, n> dd{};

  Jet2() = default;
  Jet2(double value) : v(value) {}  // NOLINT: implicit constants are the point

  static Jet2 variable(double value, int index) {
    Jet2 j(value);
    j.d[index] = 1.0;
    return j;
  }

  /// f(this) given f, f', f'' at the value.
  Jet2 chain(double f0, double f1, double f2) const {
    Jet2 r(f0);
    for (int i = 0; i < n; ++i) {
      r.d[i] = f1 * d[i];
      for (int j = 0; j < n; ++j) r.dd[i][j] = f1 * dd[i][j] + f2 * d[i] * d[j];
    }
    return r;
  }

  Jet2& operator+=(const Jet2& o) {
    v += o.v;
    for (int i = 0; i < n; ++i) {
      d[i] += o.d[i];
      for (int j = 0; j < n; ++j) dd[i][j] += o.dd[i][j];
    }
    return *this;
  }
  Jet2& operator-=(const Jet2& o) {
    v -= o.v;
    for (int i = 0; i < n; ++i) {
      d[i] -= o.d[i];
      for (int j = 0; j < n; ++j) dd[i][j] -= o.dd[i][j];
    }
    return *this;
  }
  Jet2& operator*=(double c) {
    v *= c;
    for (int i = 0; i < n; ++i) {
      d[i] *= c;
      for (int j = 0; j < n; ++j) dd[i][j] *= c;
    }
    return *this;
  }
};

inline Jet2 operator-(Jet2 a) {
  a *= -1.0;
  return a;
}
inline Jet2 operator+(Jet2 a, const Jet2& b) { return a += b; }
inline Jet2 operator-(Jet2 a, const Jet2& b) { return a -= b; }
inline Jet2 operator+(Jet2 a, double c) {
  a.v += c;
  return a;
}
inline Jet2 operator+(double c, Jet2 a) { return a + c; }
inline Jet2 operator-(Jet2 a, double c) {
  a.v -= c;
  return a;
}
inline Jet2 operator-(double c, const Jet2& a) { return -a + c; }
inline Jet2 operator*(Jet2 a, double c) { return a *= c; }
inline Jet2 operator*(double c, Jet2 a) { return a *= c; }

inline Jet2 operator*(const Jet2& a, const Jet2& b) {
  Jet2 r(a.v * b.v);
  for (int i = 0; i < Jet2::n; ++i) {
    r.d[i] = a.v * b.d[i] + b.v * a.d[i];
    for (int j = 0; j < Jet2::n; ++j) {
      r.dd[i][j] = a.v * b.dd[i][j] + b.v * a.dd[i][j] + a.d[i] * b.d[j] +
                   a.d[j] * b.d[i];
    }
  }
  return r;
}

inline Jet2 reciprocal(const Jet2& a) {
  const double inv = 1.0 / a.v;
  return a.chain(inv, -inv * inv, 2.0 * inv * inv * inv);
}
inline Jet2 operator/(const Jet2& a, const Jet2& b) { return a * reciprocal(b); }
inline Jet2 operator/(Jet2 a, double c) { return a *= 1.0 / c; }
inline Jet2 operator/(double c, const Jet2& a) { return reciprocal(a) * c; }

inline Jet2 sin(const Jet2& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return a.chain(s, c, -s);
}
inline Jet2 cos(const Jet2& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return a.chain(c, -s, -c);
}
inline Jet2 exp(const Jet2& a) {
  const double e = std::exp(a.v);
  return a.chain(e, e, e);
}
inline Jet2 log(const Jet2& a) { return a.chain(std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v)); }
inline Jet2 sqrt(const Jet2& a) {
  const double r = std::sqrt(a.v);
  return a.chain(r, 0.5 / r, -0.25 / (r * a.v));
}

/// Principal branch of the Lambert W function.
Jet2 lambert_w0(const Jet2& a);
double lambert_w0(double x);

template <int N>
struct Dual {
  double v = 0.0;
  std::array<double, N> d{};

  Dual() = default;
  Dual(double value) : v(value) {}  // NOLINT
  Dual(double value, const std::array<double, N>& deriv) : v(value), d(deriv) {}

  Dual& operator+=(const Dual& o) {
    v += o.v;
    for (int i = 0; i < N; ++i) d[i] += o.d[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (int i = 0; i < N; ++i) d[i] -= o.d[i];
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    for (int i = 0; i < N; ++i) d[i] = d[i] * o.v + v * o.d[i];
    v *= o.v;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    const double inv = 1.0 / o.v;
    for (int i = 0; i < N; ++i) d[i] = (d[i] - v * inv * o.d[i]) * inv;
    v *= inv;
    return *this;
  }
};

template <int N>
Dual<N> operator-(Dual<N> a) {
  a.v = -a.v;
  for (auto& x : a.d) x = -x;
  return a;
}
template <int N>
Dual<N> operator+(Dual<N> a, const Dual<N>& b) { return a += b; }
template <int N>
Dual<N> operator-(Dual<N> a, const Dual<N>& b) { return a -= b; }
template <int N>
Dual<N> operator*(Dual<N> a, const Dual<N>& b) { return a *= b; }
template <int N>
Dual<N> operator/(Dual<N> a, const Dual<N>& b) { return a /= b; }
template <int N>
Dual<N> operator+(Dual<N> a, double c) { return a += Dual<N>(c); }
template <int N>
Dual<N> operator+(double c, Dual<N> a) { return a += Dual<N>(c); }
template <int N>
Dual<N> operator-(Dual<N> a, double c) { return a -= Dual<N>(c); }
template <int N>
Dual<N> operator-(double c, const Dual<N>& a) { return Dual<N>(c) - a; }
template <int N>
Dual<N> operator*(Dual<N> a, double c) {
  a.v *= c;
  for (auto& x : a.d) x *= c;
  return a;
}
template <int N>
Dual<N> operator*(double c, Dual<N> a) { return a * c; }
template <int N>
Dual<N> operator/(Dual<N> a, double c) { return a * (1.0 / c); }
template <int N>
Dual<N> operator/(double c, const Dual<N>& a) { return Dual<N>(c) / a; }

template <int N>
Dual<N> sqrt(const Dual<N>& a) {
  Dual<N> r(std::sqrt(a.v));
  const double k = 0.5 / r.v;
  for (int i = 0; i < N; ++i) r.d[i] = k * a.d[i];
  return r;
}

inline double value_of(double x) { return x; }
inline double value_of(const Jet2& x) { return x.v; }
template <int N>
double value_of(const Dual<N>& x) { return x.v; }

}  // namespace nulltube
