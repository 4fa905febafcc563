#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include "jmgh/model.hpp"
#include "jmgh/simulate.hpp"

namespace testutil {

// Adaptive Simpson quadrature (independent of the library's math).
inline double simpson(const std::function<double(double)>& f, double a, double b, double fa,
                      double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double fa, double fm, double fb, double whole, double tol,
                                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(f, a, m, fa, flm, fm);
  const double right = simpson(f, m, b, fm, frm, fb);
  if (depth <= 0) return left + right;
  if (std::fabs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double adaptive_quad(const std::function<double(double)>& f, double a, double b,
                            double tol = 1e-12, int depth = 60) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, simpson(f, a, b, fa, fm, fb), tol, depth);
}

// Integral of a hazard over (0, t] via the substitution u = exp(s), which
// removes the integrable power singularity at 0. The mass below exp(s_lo)
// must be negligible at the requested tolerance.
inline double quad_hazard(const std::function<double(double)>& h, double t, double tol,
                          double s_lo = -110.0) {
  const auto g = [&](double s) {
    const double u = std::exp(s);
    return h(u) * u;
  };
  return adaptive_quad(g, s_lo, std::log(t), tol, 45);
}

// One-sample Kolmogorov-Smirnov test against a cdf; returns the asymptotic
// p-value (Kolmogorov distribution tail sum).
inline double ks_pvalue(std::vector<double> x, const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double F = cdf(x[i]);
    d = std::max(d, std::fabs(F - static_cast<double>(i) / n));
    d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - F));
  }
  const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
  double p = 0.0;
  for (int j = 1; j <= 100; ++j)
    p += 2.0 * (j % 2 == 1 ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lambda * lambda);
  return std::clamp(p, 0.0, 1.0);
}

// Small analogue of the shipped scenario-1 generating model, for fast
// posterior/gradient tests.
inline jmgh::JointModel scenario1_model(int n, uint64_t seed = 11,
                                        double admin_censoring = 4.0) {
  jmgh::ScenarioConfig cfg = jmgh::scenario_config(1);
  cfg.n = n;
  cfg.seed = seed;
  cfg.admin_censoring = admin_censoring;
  jmgh::JointDataset data = jmgh::simulate_dataset(cfg);
  return jmgh::build_model(cfg.long_spec, cfg.fit_surv, jmgh::PriorConfig{}, std::move(data));
}

// Random interior point of the flat unconstrained space: truth plus noise on
// the shared block, standard-normal-ish random effects.
inline Eigen::VectorXd random_interior_point(const jmgh::JointModel& m, std::mt19937_64& rng,
                                             double shared_sd = 0.15, double z_sd = 0.7) {
  std::normal_distribution<double> nd;
  const jmgh::ScenarioConfig cfg = jmgh::scenario_config(1);
  Eigen::VectorXd flat(m.layout.total_dim(m.n()));
  const Eigen::VectorXd base = jmgh::truth_shared_unconstrained(m, cfg.truth);
  for (int k = 0; k < m.layout.shared_dim; ++k) flat[k] = base[k] + shared_sd * nd(rng);
  for (int k = m.layout.shared_dim; k < flat.size(); ++k) flat[k] = z_sd * nd(rng);
  return flat;
}

}  // namespace testutil
