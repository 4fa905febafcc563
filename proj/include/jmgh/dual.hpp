#pragma once

#include <array>
#include <cmath>
#include <cstring>

namespace jmgh {

// Forward-mode dual number with a runtime tangent dimension (fixed capacity).
// Used to push gradients through the joint-likelihood code; per-subject terms
// only touch the shared parameters plus that subject's two random effects, so
// a small capacity suffices for all supported model structures.
struct Dual {
  static constexpr int kMaxTangent = 32;

  double v = 0.0;
  int n = 0;
  std::array<double, kMaxTangent> d;

  Dual() = default;
  explicit Dual(double value, int tangent_dim = 0) : v(value), n(tangent_dim) {
    for (int i = 0; i < n; ++i) d[i] = 0.0;
  }
  static Dual seeded(double value, int tangent_dim, int index) {
    Dual x(value, tangent_dim);
    x.d[index] = 1.0;
    return x;
  }

  Dual(const Dual& o) : v(o.v), n(o.n) {
    for (int i = 0; i < n; ++i) d[i] = o.d[i];
  }
  Dual& operator=(const Dual& o) {
    v = o.v;
    n = o.n;
    for (int i = 0; i < n; ++i) d[i] = o.d[i];
    return *this;
  }

  Dual& operator+=(const Dual& o) {
    align(o);
    v += o.v;
    for (int i = 0; i < o.n; ++i) d[i] += o.d[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    align(o);
    v -= o.v;
    for (int i = 0; i < o.n; ++i) d[i] -= o.d[i];
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    align(o);
    for (int i = 0; i < n; ++i) d[i] = d[i] * o.v + v * (i < o.n ? o.d[i] : 0.0);
    v *= o.v;
    return *this;
  }
  Dual& operator+=(double c) {
    v += c;
    return *this;
  }
  Dual& operator-=(double c) {
    v -= c;
    return *this;
  }
  Dual& operator*=(double c) {
    v *= c;
    for (int i = 0; i < n; ++i) d[i] *= c;
    return *this;
  }

 private:
  // Constants enter expressions with n == 0; widen to the partner's tangent.
  void align(const Dual& o) {
    if (o.n > n) {
      for (int i = n; i < o.n; ++i) d[i] = 0.0;
      n = o.n;
    }
  }
};

inline double value(double x) { return x; }
inline double value(const Dual& x) { return x.v; }

inline Dual operator-(const Dual& a) {
  Dual r(a);
  r.v = -r.v;
  for (int i = 0; i < r.n; ++i) r.d[i] = -r.d[i];
  return r;
}
inline Dual operator+(Dual a, const Dual& b) { return a += b; }
inline Dual operator-(Dual a, const Dual& b) { return a -= b; }
inline Dual operator*(Dual a, const Dual& b) { return a *= b; }
inline Dual operator+(Dual a, double c) { return a += c; }
inline Dual operator+(double c, Dual a) { return a += c; }
inline Dual operator-(Dual a, double c) { return a -= c; }
inline Dual operator-(double c, const Dual& a) { return -a + c; }
inline Dual operator*(Dual a, double c) { return a *= c; }
inline Dual operator*(double c, Dual a) { return a *= c; }

inline Dual inv(const Dual& a) {
  Dual r(a);
  const double iv = 1.0 / a.v;
  r.v = iv;
  const double s = -iv * iv;
  for (int i = 0; i < r.n; ++i) r.d[i] *= s;
  return r;
}
inline Dual operator/(const Dual& a, const Dual& b) { return a * inv(b); }
inline Dual operator/(Dual a, double c) { return a *= (1.0 / c); }
inline Dual operator/(double c, const Dual& b) { return inv(b) * c; }

inline bool operator<(const Dual& a, const Dual& b) { return a.v < b.v; }
inline bool operator<(const Dual& a, double b) { return a.v < b; }
inline bool operator<(double a, const Dual& b) { return a < b.v; }
inline bool operator>(const Dual& a, const Dual& b) { return a.v > b.v; }
inline bool operator>(const Dual& a, double b) { return a.v > b; }
inline bool operator>(double a, const Dual& b) { return a > b.v; }

// Chain rule helper: f(a) with known derivative fp at a.v.
inline Dual unary(const Dual& a, double fv, double fp) {
  Dual r(a);
  r.v = fv;
  for (int i = 0; i < r.n; ++i) r.d[i] *= fp;
  return r;
}

inline Dual exp(const Dual& a) {
  const double e = std::exp(a.v);
  return unary(a, e, e);
}
inline Dual log(const Dual& a) { return unary(a, std::log(a.v), 1.0 / a.v); }
inline Dual log1p(const Dual& a) { return unary(a, std::log1p(a.v), 1.0 / (1.0 + a.v)); }
inline Dual expm1(const Dual& a) {
  const double e = std::expm1(a.v);
  return unary(a, e, e + 1.0);
}
inline Dual sqrt(const Dual& a) {
  const double s = std::sqrt(a.v);
  return unary(a, s, 0.5 / s);
}
inline Dual pow(const Dual& a, double p) {
  return unary(a, std::pow(a.v, p), p * std::pow(a.v, p - 1.0));
}
inline Dual pow(const Dual& a, const Dual& b) { return exp(b * log(a)); }
inline Dual pow(double a, const Dual& b) {
  const double f = std::pow(a, b.v);
  return unary(b, f, f * std::log(a));
}
inline Dual tanh(const Dual& a) {
  const double t = std::tanh(a.v);
  return unary(a, t, 1.0 - t * t);
}
inline Dual atan(const Dual& a) { return unary(a, std::atan(a.v), 1.0 / (1.0 + a.v * a.v)); }
inline Dual erfc(const Dual& a) {
  constexpr double two_over_sqrt_pi = 1.1283791670955126;
  return unary(a, std::erfc(a.v), -two_over_sqrt_pi * std::exp(-a.v * a.v));
}
inline Dual fabs(const Dual& a) { return a.v < 0.0 ? -a : a; }

}  // namespace jmgh
