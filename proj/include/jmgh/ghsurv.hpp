#pragma once

#include "jmgh/baseline.hpp"
#include "jmgh/data.hpp"

namespace jmgh {

// Linear predictors of the general hazard structure, computed once and shared
// between the hazard and the cumulative hazard so the two stay consistent:
//   time_scale   = w'kappa + alpha1 (xt'gamma + b1)      (argument of h0)
//   hazard_scale = wt'kappat + s'lambda + alpha0 b0      (multiplier of h0)
template <class S>
struct GHLinear {
  S time_scale;
  S hazard_scale;
};

// h(t) = h0(t e^{A}) e^{B} with A = time_scale, B = hazard_scale.
template <class S>
S gh_log_hazard(const BaselineParams<S>& b, const GHLinear<S>& lin, const S& t) {
  using std::exp;
  return baseline_log_hazard(b, t * exp(lin.time_scale)) + lin.hazard_scale;
}

template <class S>
S gh_hazard(const BaselineParams<S>& b, const GHLinear<S>& lin, const S& t) {
  using std::exp;
  return exp(gh_log_hazard(b, lin, t));
}

// H(t) = H0(t e^{A}) e^{B - A}; closed form, no quadrature.
template <class S>
S gh_cum_hazard(const BaselineParams<S>& b, const GHLinear<S>& lin, const S& t) {
  using std::exp;
  if (value(t) == 0.0) return t * 0.0;
  return baseline_cum_hazard(b, t * exp(lin.time_scale)) * exp(lin.hazard_scale - lin.time_scale);
}

template <class S>
S gh_log_surv(const BaselineParams<S>& b, const GHLinear<S>& lin, const S& t) {
  return -gh_cum_hazard(b, lin, t);
}

// Censoring-aware log contribution of one time-to-event record (single risk).
template <class S>
S gh_log_event_contrib(const BaselineParams<S>& b, const GHLinear<S>& lin,
                       const EventRecord& rec) {
  using std::log;
  using std::expm1;
  switch (rec.status) {
    case CensorStatus::Exact: {
      const S t(rec.time);
      return gh_log_hazard(b, lin, t) - gh_cum_hazard(b, lin, t);
    }
    case CensorStatus::Right:
      return -gh_cum_hazard<S>(b, lin, S(rec.time));
    case CensorStatus::Left: {
      // log(1 - S) = log(-expm1(-H))
      const S H = gh_cum_hazard<S>(b, lin, S(rec.time));
      return log(-expm1(-H));
    }
    case CensorStatus::Interval: {
      if (!(rec.time > 0.0 && rec.time_right > rec.time))
        throw std::domain_error("interval record requires 0 < t_L < t_R");
      const S HL = gh_cum_hazard<S>(b, lin, S(rec.time));
      const S HR = gh_cum_hazard<S>(b, lin, S(rec.time_right));
      if (!(value(HR) > value(HL)))
        throw std::runtime_error("interval contribution: S(t_L) <= S(t_R) numerically");
      // log(S_L - S_R) = log S_L + log(-expm1(log S_R - log S_L))
      return -HL + log(-expm1(HL - HR));
    }
  }
  throw std::logic_error("unreachable");
}

// Cause-specific competing-risks contribution: event of cause k contributes
// log h_k(t) - sum_j H_j(t); right-censoring contributes -sum_j H_j(t).
template <class S>
S cr_log_event_contrib(const std::vector<BaselineParams<S>>& bases,
                       const std::vector<GHLinear<S>>& lins, const EventRecord& rec) {
  if (bases.size() != lins.size() || bases.empty())
    throw std::invalid_argument("cr contribution: one baseline + linear pair per cause");
  if (rec.status != CensorStatus::Exact && rec.status != CensorStatus::Right)
    throw std::domain_error("competing risks support exact and right-censored records only");
  S out = -gh_cum_hazard<S>(bases[0], lins[0], S(rec.time));
  for (size_t k = 1; k < bases.size(); ++k)
    out -= gh_cum_hazard<S>(bases[k], lins[k], S(rec.time));
  if (rec.status == CensorStatus::Exact) {
    if (rec.cause < 0 || rec.cause >= static_cast<int>(bases.size()))
      throw std::domain_error("unknown cause label index");
    out += gh_log_hazard<S>(bases[static_cast<size_t>(rec.cause)],
                            lins[static_cast<size_t>(rec.cause)], S(rec.time));
  }
  return out;
}

}  // namespace jmgh
