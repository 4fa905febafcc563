#pragma once

#include <cmath>
#include <stdexcept>

#include "jmgh/special.hpp"

namespace jmgh {

// Hyperparameters of the prior specification. Defaults follow the weakly
// informative choices documented in the README; all overridable via config.
struct PriorConfig {
  double phi_sq_fixed = 100.0;   // N(0, phi^2) for intercept/slope/gamma/raw beta,lambda/kappa/mu
  double phi_sq_alpha = 100.0;   // N(0, phi^2) for association parameters
  double s_eta = 2.5;            // half-Cauchy scale, baseline scale-type parameters
  double s_nu = 2.5;             // half-Cauchy scale, baseline shape-type parameters
  double invgamma_a = 0.01;      // Inv-Gamma(a, b) for sigma^2, sigma1^2, sigma2^2
  double invgamma_b = 0.01;
  double beta_a0 = 1.0;          // Beta(a0, b0) on (rho + 1)/2
  double beta_b0 = 1.0;
  double delta_shape = 1.83;     // Gamma(shape, rate) for the PGW/GG parameter delta
  double delta_rate = 0.65;      //   (shape-rate convention; prior mean 1.83/0.65)
  double eta_sq_lambda = 1.0;    // fixed dispersion in the lambda g-prior
  double g_beta = -1.0;          // g factors; negative means use n/q at build time
  double g_lambda = -1.0;

  void validate() const {
    if (phi_sq_fixed <= 0 || phi_sq_alpha <= 0 || s_eta <= 0 || s_nu <= 0 || invgamma_a <= 0 ||
        invgamma_b <= 0 || beta_a0 <= 0 || beta_b0 <= 0 || delta_shape <= 0 || delta_rate <= 0 ||
        eta_sq_lambda <= 0)
      throw std::invalid_argument("prior config: scales and variances must be positive");
  }
};

template <class S>
S log_normal_density(const S& x, double variance) {
  return -0.5 * (kLogTwoPi + std::log(variance)) - 0.5 * x * x / variance;
}

template <class S>
S log_half_cauchy(const S& x, double s) {
  using std::log;
  if (value(x) < 0.0) throw std::domain_error("half-Cauchy support is [0, inf)");
  return std::log(2.0 / (M_PI * s)) - log(1.0 + (x / s) * (x / s));
}

template <class S>
S log_inv_gamma(const S& x, double a, double b) {
  using std::log;
  if (value(x) <= 0.0) throw std::domain_error("inverse-gamma support is (0, inf)");
  return a * std::log(b) - std::lgamma(a) - (a + 1.0) * log(x) - b / x;
}

template <class S>
S log_gamma_density(const S& x, double shape, double rate) {
  using std::log;
  if (value(x) <= 0.0) throw std::domain_error("gamma support is (0, inf)");
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * log(x) - rate * x;
}

template <class S>
S log_beta_density(const S& x, double a, double b) {
  using std::log;
  using std::log1p;
  if (!(value(x) > 0.0 && value(x) < 1.0)) throw std::domain_error("beta support is (0,1)");
  const double lognc = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
  return lognc + (a - 1.0) * log(x) + (b - 1.0) * log1p(-x);
}

// Elementwise unconstraining bijection used by the sampler.
enum class TransformKind { Identity, LogPositive, AtanhCorr };

inline double to_unconstrained(TransformKind k, double x) {
  switch (k) {
    case TransformKind::Identity:
      return x;
    case TransformKind::LogPositive:
      if (x <= 0.0) throw std::domain_error("transform: value must be positive");
      return std::log(x);
    case TransformKind::AtanhCorr:
      if (!(std::fabs(x) < 1.0)) throw std::domain_error("transform: |rho| < 1 required");
      return std::atanh(x);
  }
  throw std::logic_error("unreachable");
}

// Constrained value plus the running log|Jacobian| of u -> x.
template <class S>
S from_unconstrained(TransformKind k, const S& u, S& log_jacobian) {
  using std::exp;
  using std::log;
  using std::tanh;
  switch (k) {
    case TransformKind::Identity:
      return u;
    case TransformKind::LogPositive:
      log_jacobian += u;
      return exp(u);
    case TransformKind::AtanhCorr: {
      const S x = tanh(u);
      log_jacobian += log(1.0 - x * x);
      return x;
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace jmgh
