#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "jmgh/special.hpp"

namespace jmgh {

enum class OutcomeFamily { Gaussian, BernoulliLogit };

// Scalar polynomial time basis: P(t) = t^degree (degree 1 == identity).
struct PolyBasis {
  int degree = 1;
};

template <class S>
S poly_eval(const PolyBasis& p, double t) {
  if (p.degree == 1) return S(t);
  return S(std::pow(t, p.degree));
}

// Linear predictor of the mixed model:
//   bt0 + s'beta + (xt'gamma) P1(t) + b0 + (bt1 + b1) P2(t)
template <class S>
S linear_predictor(const S& bt0, const S& bt1, const std::vector<S>& beta,
                   const std::vector<double>& s, const std::vector<S>& gamma,
                   const std::vector<double>& xt, const S& b0, const S& b1, const PolyBasis& p1,
                   const PolyBasis& p2, double t) {
  if (beta.size() != s.size() || gamma.size() != xt.size())
    throw std::invalid_argument("linear_predictor: design/coefficient dimension mismatch");
  S eta = bt0 + b0 + (bt1 + b1) * poly_eval<S>(p2, t);
  for (size_t k = 0; k < s.size(); ++k) eta += beta[k] * s[k];
  if (!xt.empty()) {
    S td = gamma[0] * xt[0];
    for (size_t k = 1; k < xt.size(); ++k) td += gamma[k] * xt[k];
    eta += td * poly_eval<S>(p1, t);
  }
  return eta;
}

// Per-observation log density. Gaussian: identity link, variance sigma2.
// Bernoulli: logit link, y in {0,1}.
template <class S>
S log_density_obs(OutcomeFamily family, const S& eta, const S& sigma2, double y) {
  using std::log;
  using std::log1p;
  using std::exp;
  switch (family) {
    case OutcomeFamily::Gaussian: {
      const S r = y - eta;
      return -0.5 * (kLogTwoPi + log(sigma2)) - 0.5 * r * r / sigma2;
    }
    case OutcomeFamily::BernoulliLogit: {
      if (y != 0.0 && y != 1.0)
        throw std::domain_error("bernoulli outcome must be 0 or 1");
      // y*eta - log(1+e^eta), computed on the stable side
      if (value(eta) > 0.0) return (y - 1.0) * eta - log1p(exp(-eta));
      return y * eta - log1p(exp(eta));
    }
  }
  throw std::logic_error("unreachable");
}

// Bivariate normal log density of (b0, b1) with covariance built from
// (sigma1^2, sigma2^2, rho).
template <class S>
S log_density_re(const S& b0, const S& b1, const S& sigma1sq, const S& sigma2sq, const S& rho) {
  using std::log;
  using std::sqrt;
  if (value(sigma1sq) <= 0.0 || value(sigma2sq) <= 0.0 || std::fabs(value(rho)) >= 1.0)
    throw std::domain_error("log_density_re: covariance not positive definite");
  const S omr2 = 1.0 - rho * rho;
  const S z0 = b0 * b0 / sigma1sq;
  const S z1 = b1 * b1 / sigma2sq;
  const S cross = 2.0 * rho * b0 * b1 / sqrt(sigma1sq * sigma2sq);
  return -kLogTwoPi - 0.5 * (log(sigma1sq) + log(sigma2sq) + log(omr2)) -
         0.5 * (z0 - cross + z1) / omr2;
}

}  // namespace jmgh
