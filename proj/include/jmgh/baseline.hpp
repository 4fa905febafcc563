#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "jmgh/special.hpp"

namespace jmgh {

enum class Family { LogNormal, Gamma, PGW, GenGamma };

inline const char* family_name(Family f) {
  switch (f) {
    case Family::LogNormal: return "lognormal";
    case Family::Gamma: return "gamma";
    case Family::PGW: return "pgw";
    case Family::GenGamma: return "gengamma";
  }
  return "?";
}

inline Family family_from_string(const std::string& s) {
  if (s == "lognormal") return Family::LogNormal;
  if (s == "gamma") return Family::Gamma;
  if (s == "pgw") return Family::PGW;
  if (s == "gengamma") return Family::GenGamma;
  throw std::invalid_argument("unknown baseline family: " + s);
}

inline int family_nparams(Family f) {
  return (f == Family::LogNormal || f == Family::Gamma) ? 2 : 3;
}

// Baseline parameter vector. Conventions:
//   LogNormal : (mu, eta)        mu in R, scale eta > 0
//   Gamma     : (nu, zeta)       shape nu > 0, rate zeta > 0
//   PGW       : (eta, nu, delta) scale, shape, power; all > 0
//   GenGamma  : (eta, nu, delta) scale, shape, shape; all > 0
template <class S>
struct BaselineParams {
  Family family = Family::LogNormal;
  std::array<S, 3> p{};

  const S& operator[](int i) const { return p[static_cast<size_t>(i)]; }
  S& operator[](int i) { return p[static_cast<size_t>(i)]; }
};

using BaselineHazard = BaselineParams<double>;

inline void check_params(const BaselineHazard& b) {
  const int np = family_nparams(b.family);
  for (int i = 0; i < np; ++i) {
    const bool positivity_free = (b.family == Family::LogNormal && i == 0);
    if (!std::isfinite(b.p[static_cast<size_t>(i)]))
      throw std::domain_error("baseline parameter not finite");
    if (!positivity_free && b.p[static_cast<size_t>(i)] <= 0.0)
      throw std::domain_error("baseline parameter must be positive");
  }
}

// log S0(t); H0(t) = -log S0(t).
template <class S>
S baseline_log_surv(const BaselineParams<S>& b, const S& t) {
  using std::log;
  using std::pow;
  switch (b.family) {
    case Family::LogNormal: {
      const S z = (log(t) - b[0]) / b[1];
      return norm_log_sf(z);
    }
    case Family::Gamma:
      return log_gamma_q(b[0], b[1] * t);
    case Family::PGW: {
      // S0 = exp{1 - [1 + (t/eta)^nu]^{1/delta}}
      const S u = pow(t / b[0], b[1]);
      return 1.0 - pow(1.0 + u, 1.0 / b[2]);
    }
    case Family::GenGamma:
      return log_gamma_q(b[2], pow(t / b[0], b[1]));
  }
  throw std::logic_error("unreachable");
}

template <class S>
S baseline_cum_hazard(const BaselineParams<S>& b, const S& t) {
  if (value(t) < 0.0) throw std::domain_error("cum_hazard0: t must be nonnegative");
  if (value(t) == 0.0) return t * 0.0;
  return -baseline_log_surv(b, t);
}

template <class S>
S baseline_log_pdf(const BaselineParams<S>& b, const S& t) {
  using std::log;
  using std::pow;
  using std::log1p;
  using std::lgamma;
  if (value(t) <= 0.0) throw std::domain_error("log_pdf0: t must be positive");
  switch (b.family) {
    case Family::LogNormal: {
      const S z = (log(t) - b[0]) / b[1];
      return norm_log_pdf(z) - log(t) - log(b[1]);
    }
    case Family::Gamma:
      return b[0] * log(b[1]) + (b[0] - 1.0) * log(t) - b[1] * t - lgamma(b[0]);
    case Family::PGW: {
      // f0 = h0 * S0 with h0 = (nu/(delta eta)) (t/eta)^{nu-1} (1+(t/eta)^nu)^{1/delta - 1}
      const S u = pow(t / b[0], b[1]);
      const S log_h = log(b[1]) - log(b[2]) - log(b[0]) + (b[1] - 1.0) * (log(t) - log(b[0])) +
                      (1.0 / b[2] - 1.0) * log1p(u);
      return log_h + (1.0 - pow(1.0 + u, 1.0 / b[2]));
    }
    case Family::GenGamma: {
      // f0 = nu t^{nu delta - 1} exp{-(t/eta)^nu} / (eta^{nu delta} Gamma(delta))
      const S nd = b[1] * b[2];
      return log(b[1]) + (nd - 1.0) * log(t) - pow(t / b[0], b[1]) - nd * log(b[0]) - lgamma(b[2]);
    }
  }
  throw std::logic_error("unreachable");
}

template <class S>
S baseline_log_hazard(const BaselineParams<S>& b, const S& t) {
  using std::log;
  using std::pow;
  using std::log1p;
  if (value(t) <= 0.0) throw std::domain_error("hazard0: t must be positive");
  switch (b.family) {
    case Family::PGW: {
      const S u = pow(t / b[0], b[1]);
      return log(b[1]) - log(b[2]) - log(b[0]) + (b[1] - 1.0) * (log(t) - log(b[0])) +
             (1.0 / b[2] - 1.0) * log1p(u);
    }
    default:
      return baseline_log_pdf(b, t) - baseline_log_surv(b, t);
  }
}

template <class S>
S baseline_hazard(const BaselineParams<S>& b, const S& t) {
  using std::exp;
  return exp(baseline_log_hazard(b, t));
}

template <class S>
S baseline_surv(const BaselineParams<S>& b, const S& t) {
  using std::exp;
  return exp(baseline_log_surv(b, t));
}

// Convenience double overloads named after role.
double hazard0(const BaselineHazard& b, double t);
double cum_hazard0(const BaselineHazard& b, double t);
double log_pdf0(const BaselineHazard& b, double t);
double surv0(const BaselineHazard& b, double t);
double cdf0(const BaselineHazard& b, double t);

// t with F0(t) = u; closed form for LogNormal and PGW, bracketed bisection
// with Newton polish on H0(t) = -log(1-u) for Gamma and GenGamma.
double quantile0(const BaselineHazard& b, double u);

}  // namespace jmgh
