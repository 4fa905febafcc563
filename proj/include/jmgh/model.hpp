#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "jmgh/baseline.hpp"
#include "jmgh/bspline.hpp"
#include "jmgh/data.hpp"
#include "jmgh/ghsurv.hpp"
#include "jmgh/longitudinal.hpp"
#include "jmgh/priors.hpp"

namespace jmgh {

enum class Expansion { Raw, BSpline };

struct CovariateSpec {
  std::string name;
  Expansion expansion = Expansion::Raw;
  int degree = 3;
  int interior_knots = 2;
  std::vector<double> knots;  // filled at model build (or carried from config)
};

struct LongitudinalSpec {
  OutcomeFamily outcome = OutcomeFamily::Gaussian;
  std::vector<CovariateSpec> covariates;    // s_i blocks, coefficients beta
  std::vector<std::string> time_dependent;  // xt columns, coefficients gamma
  PolyBasis p1, p2;
};

struct SurvivalSpec {
  std::string cause = "event";
  Family baseline = Family::LogNormal;
  std::vector<std::string> time_scale;          // w columns, coefficients kappa
  std::vector<std::string> hazard_scale_plain;  // wt columns, coefficients kappa-tilde
  std::vector<CovariateSpec> hazard_scale;      // s_i blocks, coefficients lambda
  bool share_intercept = true;                  // alpha0 present
  bool share_slope = true;                      // alpha1 present
  bool fix_pgw_power = false;                   // PGW with delta pinned at 1 (Weibull)
};

struct SubjectDesign {
  std::vector<double> s_long;
  std::vector<double> xt;
  struct CauseDesign {
    std::vector<double> w, wt, s;
  };
  std::vector<CauseDesign> causes;
};

// Flat unconstrained layout: [shared coordinates..., z_1 (2), ..., z_n (2)].
struct ParameterLayout {
  int idx_bt0 = -1, idx_bt1 = -1;
  int beta_offset = -1, beta_dim = 0;
  int gamma_offset = -1, gamma_dim = 0;
  int idx_sigma2 = -1;  // gaussian dispersion; absent for bernoulli
  int idx_s1sq = -1, idx_s2sq = -1, idx_rho = -1;
  struct CauseBlock {
    int theta_offset = -1, theta_dim = 0;
    int kappa_offset = -1, kappa_dim = 0;
    int kappat_offset = -1, kappat_dim = 0;
    int lambda_offset = -1, lambda_dim = 0;
    int idx_alpha0 = -1, idx_alpha1 = -1;
  };
  std::vector<CauseBlock> causes;
  int shared_dim = 0;
  std::vector<std::string> names;            // one per shared coordinate
  std::vector<TransformKind> transforms;     // one per shared coordinate

  int total_dim(int n_subjects) const { return shared_dim + 2 * n_subjects; }
  int re_index(int subject, int comp) const { return shared_dim + 2 * subject + comp; }
};

// Spline coefficient block subject to a g-prior N(0, g (S'S)^{-1} disp).
struct SplineBlock {
  bool in_lambda = false;  // false: beta block, true: lambda block of `cause`
  int cause = 0;
  int offset = 0;  // within beta / lambda vector
  int dim = 0;
  Eigen::MatrixXd gram;  // S'S
  double logdet_gram = 0.0;
};

struct JointModel {
  LongitudinalSpec long_spec;
  std::vector<SurvivalSpec> surv;
  PriorConfig priors;
  JointDataset data;

  std::vector<SubjectDesign> design;
  ParameterLayout layout;
  std::vector<SplineBlock> spline_blocks;
  std::vector<char> beta_raw;                // true: weakly informative normal prior
  std::vector<std::vector<char>> lambda_raw; // per cause
  std::vector<std::string> warnings;
  double g_beta = 1.0, g_lambda = 1.0;
  std::vector<int> subject_order;  // indices sorted by subject id (summation order)

  int n() const { return data.n(); }
};

// Builds designs, knots, layout and g-prior blocks; validates the dataset
// against the specs and records non-fatal warnings on the model.
JointModel build_model(LongitudinalSpec long_spec, std::vector<SurvivalSpec> surv_specs,
                       PriorConfig priors, JointDataset data);

// Constrained parameter view reconstructed from the shared slice of the flat
// unconstrained vector; log_jacobian carries the transform correction.
template <class S>
struct ParamsView {
  S bt0, bt1;
  std::vector<S> beta, gamma;
  S sigma2;
  S s1sq, s2sq, rho;
  S l11, l21, l22;  // Cholesky factor of the random-effects covariance
  struct Cause {
    BaselineParams<S> theta;
    std::vector<S> kappa, kappat, lambda;
    S alpha0, alpha1;
    bool has_alpha0 = false, has_alpha1 = false;
  };
  std::vector<Cause> causes;
  S log_jacobian;
};

template <class S>
ParamsView<S> unpack_params(const JointModel& m, const S* u) {
  using std::sqrt;
  const ParameterLayout& L = m.layout;
  ParamsView<S> pv;
  pv.log_jacobian = u[0] * 0.0;
  auto get = [&](int idx) {
    return from_unconstrained(L.transforms[static_cast<size_t>(idx)], u[idx], pv.log_jacobian);
  };
  pv.bt0 = get(L.idx_bt0);
  pv.bt1 = get(L.idx_bt1);
  pv.beta.reserve(static_cast<size_t>(L.beta_dim));
  for (int k = 0; k < L.beta_dim; ++k) pv.beta.push_back(get(L.beta_offset + k));
  pv.gamma.reserve(static_cast<size_t>(L.gamma_dim));
  for (int k = 0; k < L.gamma_dim; ++k) pv.gamma.push_back(get(L.gamma_offset + k));
  pv.sigma2 = L.idx_sigma2 >= 0 ? get(L.idx_sigma2) : S(1.0);
  pv.s1sq = get(L.idx_s1sq);
  pv.s2sq = get(L.idx_s2sq);
  pv.rho = get(L.idx_rho);
  pv.l11 = sqrt(pv.s1sq);
  const S s2 = sqrt(pv.s2sq);
  pv.l21 = s2 * pv.rho;
  pv.l22 = s2 * sqrt(1.0 - pv.rho * pv.rho);
  pv.causes.resize(m.surv.size());
  for (size_t c = 0; c < m.surv.size(); ++c) {
    const auto& cb = L.causes[c];
    auto& pc = pv.causes[c];
    pc.theta.family = m.surv[c].baseline;
    for (int k = 0; k < cb.theta_dim; ++k) pc.theta[k] = get(cb.theta_offset + k);
    if (m.surv[c].baseline == Family::PGW && m.surv[c].fix_pgw_power) pc.theta[2] = S(1.0);
    for (int k = 0; k < cb.kappa_dim; ++k) pc.kappa.push_back(get(cb.kappa_offset + k));
    for (int k = 0; k < cb.kappat_dim; ++k) pc.kappat.push_back(get(cb.kappat_offset + k));
    for (int k = 0; k < cb.lambda_dim; ++k) pc.lambda.push_back(get(cb.lambda_offset + k));
    pc.has_alpha0 = cb.idx_alpha0 >= 0;
    pc.has_alpha1 = cb.idx_alpha1 >= 0;
    pc.alpha0 = pc.has_alpha0 ? get(cb.idx_alpha0) : S(0.0);
    pc.alpha1 = pc.has_alpha1 ? get(cb.idx_alpha1) : S(0.0);
  }
  return pv;
}

// Constrained values of the shared coordinates (for reporting).
std::vector<double> constrain_shared(const JointModel& m, const double* u);

// Inverse: unconstrained shared coordinates from constrained values in
// layout order.
std::vector<double> unconstrain_shared(const JointModel& m, const std::vector<double>& x);

// GH linear predictors for one subject/cause given a parameter view.
template <class S>
GHLinear<S> gh_linear(const JointModel& m, int subject, int cause, const ParamsView<S>& pv,
                      const S& b0, const S& b1) {
  const auto& d = m.design[static_cast<size_t>(subject)];
  const auto& cd = d.causes[static_cast<size_t>(cause)];
  const auto& pc = pv.causes[static_cast<size_t>(cause)];
  GHLinear<S> lin{pv.bt0 * 0.0, pv.bt0 * 0.0};
  for (size_t k = 0; k < cd.w.size(); ++k) lin.time_scale += pc.kappa[k] * cd.w[k];
  if (pc.has_alpha1) {
    S td = pv.bt0 * 0.0;
    for (size_t k = 0; k < d.xt.size(); ++k) td += pv.gamma[k] * d.xt[k];
    lin.time_scale += pc.alpha1 * (td + b1);
  }
  for (size_t k = 0; k < cd.wt.size(); ++k) lin.hazard_scale += pc.kappat[k] * cd.wt[k];
  for (size_t k = 0; k < cd.s.size(); ++k) lin.hazard_scale += pc.lambda[k] * cd.s[k];
  if (pc.has_alpha0) lin.hazard_scale += pc.alpha0 * b0;
  return lin;
}

// Data log-likelihood of one subject at random effects (b0, b1): longitudinal
// observation terms plus the censoring-aware survival contribution. The
// random-effects density is not included here.
template <class S>
S subject_data_loglik(const JointModel& m, int subject, const ParamsView<S>& pv, const S& b0,
                      const S& b1) {
  const auto& sub = m.data.subjects[static_cast<size_t>(subject)];
  const auto& d = m.design[static_cast<size_t>(subject)];
  S ll = pv.bt0 * 0.0;
  for (size_t j = 0; j < sub.obs_times.size(); ++j) {
    const S eta = linear_predictor(pv.bt0, pv.bt1, pv.beta, d.s_long, pv.gamma, d.xt, b0, b1,
                                   m.long_spec.p1, m.long_spec.p2, sub.obs_times[j]);
    ll += log_density_obs(m.long_spec.outcome, eta, pv.sigma2, sub.obs_values[j]);
  }
  if (m.surv.size() == 1) {
    const GHLinear<S> lin = gh_linear(m, subject, 0, pv, b0, b1);
    ll += gh_log_event_contrib(pv.causes[0].theta, lin, sub.event);
  } else {
    std::vector<BaselineParams<S>> bases;
    std::vector<GHLinear<S>> lins;
    bases.reserve(m.surv.size());
    lins.reserve(m.surv.size());
    for (size_t c = 0; c < m.surv.size(); ++c) {
      bases.push_back(pv.causes[c].theta);
      lins.push_back(gh_linear(m, subject, static_cast<int>(c), pv, b0, b1));
    }
    ll += cr_log_event_contrib(bases, lins, sub.event);
  }
  return ll;
}

}  // namespace jmgh
