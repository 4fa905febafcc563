#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "jmgh/dual.hpp"

namespace jmgh {

inline constexpr double kLogTwoPi = 1.8378770664093453;
inline constexpr double kLogSqrtTwoPi = 0.9189385332046727;

inline double digamma(double x) {
  // Recurrence up to x >= 6, then the asymptotic expansion.
  double r = 0.0;
  while (x < 6.0) {
    r -= 1.0 / x;
    x += 1.0;
  }
  const double f = 1.0 / (x * x);
  return r + std::log(x) - 0.5 / x -
         f * (1.0 / 12.0 - f * (1.0 / 120.0 - f * (1.0 / 252.0 - f * (1.0 / 240.0 - f / 132.0))));
}

inline double lgamma(double x) { return std::lgamma(x); }
inline Dual lgamma(const Dual& a) { return unary(a, std::lgamma(a.v), digamma(a.v)); }

// log erfc(x), stable for large positive arguments where erfc underflows.
template <class S>
S log_erfc(const S& x) {
  using std::log;
  using std::erfc;
  if (value(x) < 20.0) return log(erfc(x));
  // erfc(x) ~ e^{-x^2}/(x sqrt(pi)) (1 - 1/(2x^2) + 3/(4x^4) - 15/(8x^6))
  const S x2 = x * x;
  const S inv2 = 1.0 / x2;
  const S series = 1.0 - 0.5 * inv2 * (1.0 - 1.5 * inv2 * (1.0 - 2.5 * inv2));
  constexpr double half_log_pi = 0.5723649429247001;
  return -x2 - log(x) - half_log_pi + log(series);
}

template <class S>
S norm_log_pdf(const S& z) {
  return -0.5 * z * z - kLogSqrtTwoPi;
}

template <class S>
S norm_cdf(const S& z) {
  using std::erfc;
  constexpr double inv_sqrt2 = 0.7071067811865476;
  return 0.5 * erfc(-inv_sqrt2 * z);
}

// log Phi(z) and log(1 - Phi(z)).
template <class S>
S norm_log_cdf(const S& z) {
  constexpr double inv_sqrt2 = 0.7071067811865476;
  constexpr double log_half = -0.6931471805599453;
  return log_half + log_erfc(-inv_sqrt2 * z);
}
template <class S>
S norm_log_sf(const S& z) {
  constexpr double inv_sqrt2 = 0.7071067811865476;
  constexpr double log_half = -0.6931471805599453;
  return log_half + log_erfc(inv_sqrt2 * z);
}

// Inverse standard normal CDF (Acklam's rational approximation + one Newton
// polish step); double precision only.
inline double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("norm_quantile: p outside (0,1)");
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                             1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                             6.680131188771972e+01,  -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                             -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                             3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Newton polish on Phi(x) - p.
  const double e = norm_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

// Regularized lower incomplete gamma P(a, x): series for x < a + 1,
// continued fraction for the complement otherwise. The log-complement form
// stays finite where Q(a,x) underflows.
namespace detail {

inline double inv_or_recip(double x) { return 1.0 / x; }
inline Dual inv_or_recip(const Dual& x) { return inv(x); }

template <class S>
S gamma_p_series_factor(const S& a, const S& x) {
  // Returns series such that P = exp(-x + a log x - lgamma(a)) * series / a.
  using std::exp;
  using std::log;
  S ap = a;
  S sum = 1.0 / a;
  S del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del = del * (x / ap);
    sum += del;
    if (std::fabs(value(del)) < std::fabs(value(sum)) * 1e-17) break;
  }
  return sum;
}

template <class S>
S gamma_q_cf_factor(const S& a, const S& x) {
  // Modified Lentz continued fraction; Q = exp(-x + a log x - lgamma(a)) * cf.
  const double tiny = 1e-300;
  S b = x + 1.0 - a;
  S c = b * 0.0 + 1.0 / tiny;
  S dd = inv_or_recip(b);
  S h = dd;
  for (int i = 1; i <= 500; ++i) {
    const S an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    dd = an * dd + b;
    if (std::fabs(value(dd)) < tiny) dd = dd * 0.0 + tiny;
    c = b + an / c;
    if (std::fabs(value(c)) < tiny) c = c * 0.0 + tiny;
    dd = inv_or_recip(dd);
    const S delta = dd * c;
    h = h * delta;
    if (std::fabs(value(delta) - 1.0) < 1e-17) break;
  }
  return h;
}

}  // namespace detail

template <class S>
S gamma_p(const S& a, const S& x) {
  using std::exp;
  using std::log;
  if (value(a) <= 0.0) throw std::domain_error("gamma_p: a must be positive");
  if (value(x) < 0.0) throw std::domain_error("gamma_p: x must be nonnegative");
  if (value(x) == 0.0) return x * 0.0 + a * 0.0;
  const S pre = -x + a * log(x) - lgamma(a);
  if (value(x) < value(a) + 1.0) {
    return exp(pre) * detail::gamma_p_series_factor(a, x);
  }
  return 1.0 - exp(pre) * detail::gamma_q_cf_factor(a, x);
}

template <class S>
S gamma_q(const S& a, const S& x) {
  using std::exp;
  using std::log;
  if (value(a) <= 0.0) throw std::domain_error("gamma_q: a must be positive");
  if (value(x) < 0.0) throw std::domain_error("gamma_q: x must be nonnegative");
  if (value(x) == 0.0) return 1.0 + x * 0.0 + a * 0.0;
  // Evaluate the small branch directly so the tail keeps full relative
  // precision instead of cancelling against 1.
  const S pre = -x + a * log(x) - lgamma(a);
  if (value(x) < value(a) + 1.0) return 1.0 - exp(pre) * detail::gamma_p_series_factor(a, x);
  return exp(pre) * detail::gamma_q_cf_factor(a, x);
}

// log Q(a, x); avoids underflow for large x (survival tail of Gamma/GG).
template <class S>
S log_gamma_q(const S& a, const S& x) {
  using std::exp;
  using std::log;
  using std::log1p;
  if (value(a) <= 0.0) throw std::domain_error("log_gamma_q: a must be positive");
  if (value(x) < 0.0) throw std::domain_error("log_gamma_q: x must be nonnegative");
  if (value(x) == 0.0) return x * 0.0 + a * 0.0;
  const S pre = -x + a * log(x) - lgamma(a);
  if (value(x) < value(a) + 1.0) {
    const S p = exp(pre) * detail::gamma_p_series_factor(a, x);
    // P < 1 here by construction of the split.
    return log1p(-p);
  }
  return pre + log(detail::gamma_q_cf_factor(a, x));
}

// Gauss-Hermite nodes/weights (physicists' convention: weight e^{-x^2}).
struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline GaussHermite gauss_hermite(int n) {
  if (n < 1) throw std::domain_error("gauss_hermite: n >= 1 required");
  GaussHermite gh;
  gh.nodes.resize(n);
  gh.weights.resize(n);
  const double pim4 = 0.7511255444649425;  // pi^{-1/4}
  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    else if (i == 1)
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * gh.nodes[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * gh.nodes[1];
    else
      z = 2.0 * z - gh.nodes[i - 2];
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::fabs(z - z1) < 3e-15) break;
    }
    gh.nodes[i] = z;
    gh.nodes[n - 1 - i] = -z;
    gh.weights[i] = 2.0 / (pp * pp);
    gh.weights[n - 1 - i] = gh.weights[i];
  }
  // Ascending order.
  std::reverse(gh.nodes.begin(), gh.nodes.end());
  std::reverse(gh.weights.begin(), gh.weights.end());
  return gh;
}

}  // namespace jmgh
