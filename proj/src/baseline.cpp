#include "jmgh/baseline.hpp"

#include <cmath>

namespace jmgh {

double hazard0(const BaselineHazard& b, double t) {
  check_params(b);
  return baseline_hazard(b, t);
}

double cum_hazard0(const BaselineHazard& b, double t) {
  check_params(b);
  return baseline_cum_hazard(b, t);
}

double log_pdf0(const BaselineHazard& b, double t) {
  check_params(b);
  return baseline_log_pdf(b, t);
}

double surv0(const BaselineHazard& b, double t) {
  check_params(b);
  if (t <= 0.0) return 1.0;
  return std::exp(baseline_log_surv(b, t));
}

double cdf0(const BaselineHazard& b, double t) {
  check_params(b);
  if (t <= 0.0) return 0.0;
  return -std::expm1(baseline_log_surv(b, t));
}

namespace {

// Solve H0(t) = target by doubling bracket + bisection, then Newton polish.
double invert_cum_hazard(const BaselineHazard& b, double target) {
  double lo = 0.0, hi = 1.0;
  int guard = 0;
  while (baseline_cum_hazard(b, hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 2000) throw std::runtime_error("quantile0: bracket expansion failed");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (baseline_cum_hazard(b, mid) < target)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-13 * hi) break;
  }
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 50; ++it) {
    const double f = baseline_cum_hazard(b, t) - target;
    const double h = baseline_hazard(b, t);
    const double step = f / h;
    double tn = t - step;
    if (tn <= lo || tn >= hi) tn = 0.5 * (lo + hi);
    if (std::fabs(tn - t) <= 1e-14 * t) {
      t = tn;
      break;
    }
    t = tn;
  }
  const double resid = baseline_cum_hazard(b, t) - target;
  if (std::fabs(resid) > 1e-8 * std::max(1.0, target))
    throw std::runtime_error("quantile0: inversion did not converge, residual " +
                             std::to_string(resid));
  return t;
}

}  // namespace

double quantile0(const BaselineHazard& b, double u) {
  check_params(b);
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("quantile0: u outside (0,1)");
  switch (b.family) {
    case Family::LogNormal:
      return std::exp(b[0] + b[1] * norm_quantile(u));
    case Family::PGW: {
      // H0(t) = (1 + (t/eta)^nu)^{1/delta} - 1 = -log(1-u)
      const double target = 1.0 - std::log1p(-u);  // (1 - log(1-u))
      return b[0] * std::pow(std::pow(target, b[2]) - 1.0, 1.0 / b[1]);
    }
    case Family::Gamma:
    case Family::GenGamma:
      return invert_cum_hazard(b, -std::log1p(-u));
  }
  throw std::logic_error("unreachable");
}

}  // namespace jmgh
