#include "jmgh/model.hpp"

#include <algorithm>
#include <set>

namespace jmgh {

namespace {

double covariate_value(const Subject& s, const std::string& name) {
  auto it = s.covariates.find(name);
  if (it == s.covariates.end())
    throw validation_error("subject " + s.id + ": missing covariate '" + name + "'");
  return it->second;
}

// Expand one covariate list into per-subject design rows, fitting B-spline
// knots from the data when the spec does not carry them yet.
std::vector<std::vector<double>> expand_covariates(std::vector<CovariateSpec>& covs,
                                                   const JointDataset& data) {
  const size_t n = data.subjects.size();
  std::vector<std::vector<double>> rows(n);
  for (auto& cov : covs) {
    std::vector<double> values;
    values.reserve(n);
    for (const auto& s : data.subjects) values.push_back(covariate_value(s, cov.name));
    if (cov.expansion == Expansion::Raw) {
      for (size_t i = 0; i < n; ++i) rows[i].push_back(values[i]);
      continue;
    }
    if (cov.degree < 1) throw validation_error("spline degree >= 1 required for " + cov.name);
    if (cov.knots.empty()) cov.knots = bspline_knots(values, cov.degree, cov.interior_knots);
    for (size_t i = 0; i < n; ++i) {
      const auto basis = bspline_basis(values[i], cov.degree, cov.knots);
      rows[i].insert(rows[i].end(), basis.begin(), basis.end());
    }
  }
  return rows;
}

// Per-covariate block sizes after expansion.
std::vector<int> block_dims(const std::vector<CovariateSpec>& covs) {
  std::vector<int> dims;
  for (const auto& cov : covs)
    dims.push_back(cov.expansion == Expansion::Raw ? 1 : bspline_count(cov.degree, cov.knots));
  return dims;
}

void add_spline_blocks(JointModel& m, const std::vector<CovariateSpec>& covs,
                       const std::vector<std::vector<double>>& rows, bool in_lambda, int cause,
                       std::vector<char>& raw_mask) {
  const auto dims = block_dims(covs);
  int offset = 0;
  for (size_t c = 0; c < covs.size(); ++c) {
    const int dim = dims[c];
    const bool is_spline = covs[c].expansion == Expansion::BSpline;
    for (int k = 0; k < dim; ++k) raw_mask.push_back(is_spline ? 0 : 1);
    if (is_spline) {
      Eigen::MatrixXd S(rows.size(), dim);
      for (size_t i = 0; i < rows.size(); ++i)
        for (int k = 0; k < dim; ++k) S(static_cast<Eigen::Index>(i), k) = rows[i][static_cast<size_t>(offset + k)];
      SplineBlock blk;
      blk.in_lambda = in_lambda;
      blk.cause = cause;
      blk.offset = offset;
      blk.dim = dim;
      blk.gram = S.transpose() * S;
      Eigen::LLT<Eigen::MatrixXd> llt(blk.gram);
      if (llt.info() != Eigen::Success)
        throw std::runtime_error("g-prior: rank-deficient spline design for covariate '" +
                                 covs[c].name + "'");
      blk.logdet_gram = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
      m.spline_blocks.push_back(std::move(blk));
    }
    offset += dim;
  }
}

}  // namespace

const char* censor_status_name(CensorStatus s) {
  switch (s) {
    case CensorStatus::Exact: return "exact";
    case CensorStatus::Right: return "right";
    case CensorStatus::Left: return "left";
    case CensorStatus::Interval: return "interval";
  }
  return "?";
}

CensorStatus censor_status_from_string(const std::string& s) {
  if (s == "exact") return CensorStatus::Exact;
  if (s == "right") return CensorStatus::Right;
  if (s == "left") return CensorStatus::Left;
  if (s == "interval") return CensorStatus::Interval;
  throw validation_error("unknown censoring status: '" + s + "'");
}

void JointDataset::validate() const {
  std::set<std::string> seen;
  for (const auto& s : subjects) {
    if (!seen.insert(s.id).second) throw validation_error("duplicate subject_id: " + s.id);
    if (s.obs_times.size() != s.obs_values.size())
      throw validation_error("subject " + s.id + ": longitudinal times/values mismatch");
    const double horizon =
        s.event.status == CensorStatus::Interval ? s.event.time_right : s.event.time;
    for (double t : s.obs_times)
      if (t < 0.0 || t > horizon)
        throw validation_error("subject " + s.id + ": longitudinal time outside [0, event time]");
    if (s.event.status == CensorStatus::Interval) {
      if (!(s.event.time > 0.0 && s.event.time_right > s.event.time))
        throw validation_error("subject " + s.id + ": interval record requires 0 < t_L < t_R");
    } else if (!(s.event.time > 0.0)) {
      throw validation_error("subject " + s.id + ": event time must be positive");
    }
    if (s.event.cause < 0 || s.event.cause >= std::max<int>(1, static_cast<int>(cause_labels.size())))
      throw validation_error("subject " + s.id + ": cause index out of range");
  }
}

JointModel build_model(LongitudinalSpec long_spec, std::vector<SurvivalSpec> surv_specs,
                       PriorConfig priors, JointDataset data) {
  if (surv_specs.empty()) throw validation_error("at least one survival spec required");
  priors.validate();
  data.validate();

  JointModel m;
  m.priors = priors;

  const auto s_rows = expand_covariates(long_spec.covariates, data);

  // Survival designs per cause.
  std::vector<std::vector<std::vector<double>>> surv_rows(surv_specs.size());
  for (size_t c = 0; c < surv_specs.size(); ++c)
    surv_rows[c] = expand_covariates(surv_specs[c].hazard_scale, data);

  m.long_spec = std::move(long_spec);
  m.surv = std::move(surv_specs);
  m.data = std::move(data);

  const int n = m.n();
  m.design.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto& d = m.design[static_cast<size_t>(i)];
    const auto& sub = m.data.subjects[static_cast<size_t>(i)];
    d.s_long = s_rows[static_cast<size_t>(i)];
    for (const auto& name : m.long_spec.time_dependent) d.xt.push_back(covariate_value(sub, name));
    d.causes.resize(m.surv.size());
    for (size_t c = 0; c < m.surv.size(); ++c) {
      auto& cd = d.causes[c];
      for (const auto& name : m.surv[c].time_scale) cd.w.push_back(covariate_value(sub, name));
      for (const auto& name : m.surv[c].hazard_scale_plain)
        cd.wt.push_back(covariate_value(sub, name));
      cd.s = surv_rows[c][static_cast<size_t>(i)];
    }
  }

  // x-tilde must be a subset of the longitudinal covariate columns.
  for (const auto& name : m.long_spec.time_dependent) {
    const bool found = std::any_of(m.long_spec.covariates.begin(), m.long_spec.covariates.end(),
                                   [&](const CovariateSpec& c) { return c.name == name; });
    if (!found)
      throw validation_error("time-dependent covariate '" + name +
                             "' is not among the longitudinal covariates");
  }

  // Layout.
  ParameterLayout& L = m.layout;
  auto push = [&L](const std::string& name, TransformKind t) {
    L.names.push_back(name);
    L.transforms.push_back(t);
    return static_cast<int>(L.names.size()) - 1;
  };
  L.idx_bt0 = push("beta_t0", TransformKind::Identity);
  L.idx_bt1 = push("beta_t1", TransformKind::Identity);
  L.beta_offset = static_cast<int>(L.names.size());
  {
    const auto dims = block_dims(m.long_spec.covariates);
    for (size_t c = 0; c < m.long_spec.covariates.size(); ++c)
      for (int k = 0; k < dims[c]; ++k)
        push("beta_" + m.long_spec.covariates[c].name + (dims[c] > 1 ? "_" + std::to_string(k + 1) : ""),
             TransformKind::Identity);
    L.beta_dim = static_cast<int>(L.names.size()) - L.beta_offset;
  }
  L.gamma_offset = static_cast<int>(L.names.size());
  for (const auto& name : m.long_spec.time_dependent) push("gamma_" + name, TransformKind::Identity);
  L.gamma_dim = static_cast<int>(L.names.size()) - L.gamma_offset;
  if (m.long_spec.outcome == OutcomeFamily::Gaussian)
    L.idx_sigma2 = push("sigma2", TransformKind::LogPositive);
  L.idx_s1sq = push("sigma1sq", TransformKind::LogPositive);
  L.idx_s2sq = push("sigma2sq", TransformKind::LogPositive);
  L.idx_rho = push("rho", TransformKind::AtanhCorr);

  static const char* kThetaNames[4][3] = {{"mu", "eta", ""},
                                          {"nu", "zeta", ""},
                                          {"eta", "nu", "delta"},
                                          {"eta", "nu", "delta"}};
  for (size_t c = 0; c < m.surv.size(); ++c) {
    const auto& spec = m.surv[c];
    const std::string tag = m.surv.size() > 1 ? "_" + spec.cause : "";
    ParameterLayout::CauseBlock cb;
    cb.theta_offset = static_cast<int>(L.names.size());
    int theta_dim = family_nparams(spec.baseline);
    if (spec.baseline == Family::PGW && spec.fix_pgw_power) theta_dim = 2;
    for (int k = 0; k < theta_dim; ++k) {
      const char* pname = kThetaNames[static_cast<int>(spec.baseline)][k];
      const bool free_sign = spec.baseline == Family::LogNormal && k == 0;
      push(std::string(pname) + tag, free_sign ? TransformKind::Identity : TransformKind::LogPositive);
    }
    cb.theta_dim = theta_dim;
    cb.kappa_offset = static_cast<int>(L.names.size());
    for (const auto& name : spec.time_scale) push("kappa_" + name + tag, TransformKind::Identity);
    cb.kappa_dim = static_cast<int>(L.names.size()) - cb.kappa_offset;
    cb.kappat_offset = static_cast<int>(L.names.size());
    for (const auto& name : spec.hazard_scale_plain)
      push("kappat_" + name + tag, TransformKind::Identity);
    cb.kappat_dim = static_cast<int>(L.names.size()) - cb.kappat_offset;
    cb.lambda_offset = static_cast<int>(L.names.size());
    {
      const auto dims = block_dims(spec.hazard_scale);
      for (size_t j = 0; j < spec.hazard_scale.size(); ++j)
        for (int k = 0; k < dims[j]; ++k)
          push("lambda_" + spec.hazard_scale[j].name +
                   (dims[j] > 1 ? "_" + std::to_string(k + 1) : "") + tag,
               TransformKind::Identity);
      cb.lambda_dim = static_cast<int>(L.names.size()) - cb.lambda_offset;
    }
    if (spec.share_intercept) cb.idx_alpha0 = push("alpha0" + tag, TransformKind::Identity);
    if (spec.share_slope) cb.idx_alpha1 = push("alpha1" + tag, TransformKind::Identity);
    L.causes.push_back(cb);

    // Weibull identifiability guard: time-scale and hazard-scale effects
    // both present cannot be distinguished under a Weibull baseline.
    const bool time_scale_effects = !spec.time_scale.empty() || spec.share_slope;
    const bool hazard_scale_effects =
        !spec.hazard_scale_plain.empty() || !spec.hazard_scale.empty() || spec.share_intercept;
    if (spec.baseline == Family::PGW && spec.fix_pgw_power && time_scale_effects &&
        hazard_scale_effects)
      m.warnings.push_back("cause '" + spec.cause +
                           "': Weibull baseline (PGW with power fixed at 1) with both time-scale "
                           "and hazard-scale effects is non-identifiable");
  }
  L.shared_dim = static_cast<int>(L.names.size());

  // g-prior blocks. g defaults to n/q with q the spline degree, unless
  // overridden in the prior config.
  int degree = 0;
  for (const auto& c : m.long_spec.covariates)
    if (c.expansion == Expansion::BSpline) degree = std::max(degree, c.degree);
  for (const auto& s : m.surv)
    for (const auto& c : s.hazard_scale)
      if (c.expansion == Expansion::BSpline) degree = std::max(degree, c.degree);
  const double g_default = degree > 0 ? static_cast<double>(n) / degree : 1.0;
  m.g_beta = m.priors.g_beta > 0 ? m.priors.g_beta : g_default;
  m.g_lambda = m.priors.g_lambda > 0 ? m.priors.g_lambda : g_default;

  add_spline_blocks(m, m.long_spec.covariates, s_rows, false, 0, m.beta_raw);
  m.lambda_raw.resize(m.surv.size());
  for (size_t c = 0; c < m.surv.size(); ++c)
    add_spline_blocks(m, m.surv[c].hazard_scale, surv_rows[c], true, static_cast<int>(c),
                      m.lambda_raw[c]);

  // Canonical summation order: sorted by subject id, so the log posterior is
  // invariant to storage order.
  m.subject_order.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) m.subject_order[static_cast<size_t>(i)] = i;
  std::sort(m.subject_order.begin(), m.subject_order.end(), [&](int a, int b) {
    return m.data.subjects[static_cast<size_t>(a)].id < m.data.subjects[static_cast<size_t>(b)].id;
  });

  if (L.shared_dim + 2 > Dual::kMaxTangent)
    throw std::runtime_error("model has too many shared parameters for the gradient tangent (" +
                             std::to_string(L.shared_dim) + " + 2 > " +
                             std::to_string(Dual::kMaxTangent) + ")");
  return m;
}

std::vector<double> constrain_shared(const JointModel& m, const double* u) {
  const auto& L = m.layout;
  std::vector<double> x(static_cast<size_t>(L.shared_dim));
  double lj = 0.0;
  for (int k = 0; k < L.shared_dim; ++k)
    x[static_cast<size_t>(k)] = from_unconstrained(L.transforms[static_cast<size_t>(k)], u[k], lj);
  return x;
}

std::vector<double> unconstrain_shared(const JointModel& m, const std::vector<double>& x) {
  const auto& L = m.layout;
  if (static_cast<int>(x.size()) != L.shared_dim)
    throw std::invalid_argument("unconstrain_shared: dimension mismatch");
  std::vector<double> u(x.size());
  for (int k = 0; k < L.shared_dim; ++k)
    u[static_cast<size_t>(k)] =
        to_unconstrained(L.transforms[static_cast<size_t>(k)], x[static_cast<size_t>(k)]);
  return u;
}

}  // namespace jmgh
