#include "jmgh/simulate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>

#include "jmgh/special.hpp"

namespace jmgh {

namespace {

std::mt19937_64 subject_rng(uint64_t seed, int subject, uint32_t stream) {
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                    static_cast<uint32_t>(subject), stream};
  return std::mt19937_64(seq);
}

// Covariate generators: "age" follows a three-component uniform mixture
// (25% on 30-65, 35% on 65-75, 40% on 75-85), reported standardized as
// (age - 70) / 10; every other name is Bernoulli(1/2).
double draw_covariate(const std::string& name, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  if (name == "age") {
    const double w = unif(rng);
    double age;
    if (w < 0.25)
      age = 30.0 + 35.0 * unif(rng);
    else if (w < 0.60)
      age = 65.0 + 10.0 * unif(rng);
    else
      age = 75.0 + 10.0 * unif(rng);
    return (age - 70.0) / 10.0;
  }
  return unif(rng) < 0.5 ? 1.0 : 0.0;
}

std::vector<std::string> covariate_names(const ScenarioConfig& cfg) {
  std::vector<std::string> names;
  auto add = [&](const std::string& n) {
    if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
  };
  for (const auto& c : cfg.long_spec.covariates) add(c.name);
  for (const auto& n : cfg.long_spec.time_dependent) add(n);
  auto add_surv = [&](const std::vector<SurvivalSpec>& specs) {
    for (const auto& s : specs) {
      for (const auto& n : s.time_scale) add(n);
      for (const auto& n : s.hazard_scale_plain) add(n);
      for (const auto& c : s.hazard_scale) add(c.name);
    }
  };
  add_surv(cfg.surv);
  add_surv(cfg.fit_surv);
  return names;
}

struct Latent {
  double event_time;  // latent event time (minimum over causes)
  int cause;
  double rand_censor;  // random censoring time (inf when disabled)
  double b0, b1;
};

struct SimCore {
  JointModel model;  // built from the generating specs on the covariate skeleton
  ParamsView<double> pv;
  std::vector<Latent> latent;
};

SimCore simulate_latent(const ScenarioConfig& cfg, int n) {
  if (n <= 0) throw validation_error("simulate: subject count must be positive");
  if (cfg.surv.empty()) throw validation_error("simulate: no survival specification");

  const auto names = covariate_names(cfg);
  JointDataset data;
  for (const auto& s : cfg.surv) data.cause_labels.push_back(s.cause);
  data.subjects.resize(static_cast<size_t>(n));
  const int width = static_cast<int>(std::to_string(n).size());
  for (int i = 0; i < n; ++i) {
    auto& sub = data.subjects[static_cast<size_t>(i)];
    std::ostringstream id;
    id << "S";
    for (int d = static_cast<int>(std::to_string(i + 1).size()); d < width; ++d) id << '0';
    id << (i + 1);
    sub.id = id.str();
    auto rng = subject_rng(cfg.seed, i, 0);
    for (const auto& name : names) sub.covariates[name] = draw_covariate(name, rng);
    sub.event = EventRecord{1.0, 0.0, CensorStatus::Exact, 0};  // placeholder
  }

  // Spline covariates must carry their knots in the scenario spec: there is
  // no fitted dataset to place them from yet.
  for (const auto& c : cfg.long_spec.covariates)
    if (c.expansion == Expansion::BSpline && c.knots.empty())
      throw validation_error("simulate: spline covariate '" + c.name +
                             "' needs preset knots in the scenario");
  for (const auto& s : cfg.surv)
    for (const auto& c : s.hazard_scale)
      if (c.expansion == Expansion::BSpline && c.knots.empty())
        throw validation_error("simulate: spline covariate '" + c.name +
                               "' needs preset knots in the scenario");

  SimCore core{build_model(cfg.long_spec, cfg.surv, PriorConfig{}, std::move(data)),
               ParamsView<double>{},
               {}};
  const Eigen::VectorXd u = truth_shared_unconstrained(core.model, cfg.truth);
  core.pv = unpack_params(core.model, u.data());

  core.latent.resize(static_cast<size_t>(n));
  std::normal_distribution<double> norm(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const size_t ncause = cfg.surv.size();
  for (int i = 0; i < n; ++i) {
    auto rng = subject_rng(cfg.seed, i, 1);
    auto& lat = core.latent[static_cast<size_t>(i)];
    const double z0 = norm(rng), z1 = norm(rng);
    lat.b0 = core.pv.l11 * z0;
    lat.b1 = core.pv.l21 * z0 + core.pv.l22 * z1;
    lat.event_time = std::numeric_limits<double>::infinity();
    lat.cause = 0;
    for (size_t c = 0; c < ncause; ++c) {
      const double u_ev = std::clamp(unif(rng), 1e-12, 1.0 - 1e-12);
      const auto lin =
          gh_linear(core.model, i, static_cast<int>(c), core.pv, lat.b0, lat.b1);
      const double A = std::exp(lin.time_scale);
      const double B = std::exp(lin.hazard_scale - lin.time_scale);
      const double t = simulate_event_time(core.pv.causes[c].theta, A, B, u_ev);
      if (t < lat.event_time) {
        lat.event_time = t;
        lat.cause = static_cast<int>(c);
      }
    }
    lat.rand_censor = std::numeric_limits<double>::infinity();
    if (cfg.random_censoring_rate > 0.0) {
      std::exponential_distribution<double> ed(cfg.random_censoring_rate);
      lat.rand_censor = ed(rng);
    }
  }
  return core;
}

std::vector<double> visit_times(const VisitSchedule& vs, double horizon, std::mt19937_64& rng) {
  std::vector<double> times;
  std::exponential_distribution<double> gap(vs.rate);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double t = 0.0;
  while (t <= horizon && times.size() < 1000) {
    times.push_back(t);
    switch (vs.kind) {
      case VisitSchedule::Kind::Equidistant:
        t += vs.delta;
        break;
      case VisitSchedule::Kind::ExponentialGap:
        t += gap(rng);
        break;
      case VisitSchedule::Kind::Mixed:
        t += unif(rng) < 0.5 ? vs.delta : gap(rng);
        break;
    }
  }
  return times;
}

}  // namespace

double simulate_event_time(const BaselineHazard& b, double A, double B, double u) {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("simulate_event_time: u outside (0,1)");
  if (!(A > 0.0) || !(B > 0.0))
    throw std::domain_error("simulate_event_time: scale factors must be positive");
  // S(t) = exp{-H0(tA) B}: equate to 1-u and invert the baseline cdf.
  const double p = -std::expm1(std::log1p(-u) / B);
  return quantile0(b, p) / A;
}

Eigen::VectorXd truth_shared_unconstrained(const JointModel& m,
                                           const std::map<std::string, double>& truth) {
  std::vector<double> x(static_cast<size_t>(m.layout.shared_dim));
  std::string missing;
  for (int k = 0; k < m.layout.shared_dim; ++k) {
    const auto it = truth.find(m.layout.names[static_cast<size_t>(k)]);
    if (it == truth.end()) {
      missing += (missing.empty() ? "" : ", ") + m.layout.names[static_cast<size_t>(k)];
      continue;
    }
    x[static_cast<size_t>(k)] = it->second;
  }
  if (!missing.empty())
    throw validation_error("scenario truth is missing parameter(s): " + missing);
  const auto u = unconstrain_shared(m, x);
  return Eigen::Map<const Eigen::VectorXd>(u.data(), static_cast<long>(u.size()));
}

JointDataset simulate_dataset(const ScenarioConfig& cfg) {
  SimCore core = simulate_latent(cfg, cfg.n);
  JointDataset data = std::move(core.model.data);
  std::normal_distribution<double> norm(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double sd = cfg.long_spec.outcome == OutcomeFamily::Gaussian
                        ? std::sqrt(core.pv.sigma2)
                        : 0.0;
  for (int i = 0; i < cfg.n; ++i) {
    auto& sub = data.subjects[static_cast<size_t>(i)];
    const auto& lat = core.latent[static_cast<size_t>(i)];
    const double censor = std::min(cfg.admin_censoring, lat.rand_censor);
    if (censor < lat.event_time) {
      sub.event = EventRecord{censor, 0.0, CensorStatus::Right, lat.cause};
    } else {
      sub.event = EventRecord{lat.event_time, 0.0, CensorStatus::Exact, lat.cause};
    }

    auto rng = subject_rng(cfg.seed, i, 2);
    const auto& d = core.model.design[static_cast<size_t>(i)];
    for (double t : visit_times(cfg.visits, sub.event.time, rng)) {
      const double eta = linear_predictor(core.pv.bt0, core.pv.bt1, core.pv.beta, d.s_long,
                                          core.pv.gamma, d.xt, lat.b0, lat.b1,
                                          cfg.long_spec.p1, cfg.long_spec.p2, t);
      double y;
      if (cfg.long_spec.outcome == OutcomeFamily::Gaussian) {
        y = eta + sd * norm(rng);
      } else {
        y = unif(rng) < 1.0 / (1.0 + std::exp(-eta)) ? 1.0 : 0.0;
      }
      sub.obs_times.push_back(t);
      sub.obs_values.push_back(y);
    }
  }
  data.validate();
  return data;
}

double calibrate_censoring(const ScenarioConfig& cfg, double target_rate, int probe_n) {
  if (!(target_rate > 0.0 && target_rate < 1.0))
    throw validation_error("calibrate_censoring: target rate must lie in (0,1)");
  ScenarioConfig probe = cfg;
  probe.admin_censoring = std::numeric_limits<double>::infinity();
  const SimCore core = simulate_latent(probe, probe_n);

  auto censored_at = [&](double c) {
    int k = 0;
    for (const auto& lat : core.latent)
      if (std::min(c, lat.rand_censor) < lat.event_time) ++k;
    return static_cast<double>(k) / static_cast<double>(probe_n);
  };
  const double floor_rate = censored_at(std::numeric_limits<double>::infinity());
  if (target_rate < floor_rate - 1e-6)
    throw std::runtime_error("calibrate_censoring: random censoring alone exceeds the target");

  double hi = 1.0;
  while (censored_at(hi) > target_rate && hi < 1e12) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-10 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (censored_at(mid) > target_rate ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

ScenarioConfig scenario_config(int scenario) {
  ScenarioConfig cfg;
  cfg.n = 500;
  cfg.seed = 1;
  cfg.visits.kind = VisitSchedule::Kind::Equidistant;
  cfg.visits.delta = 0.4;

  auto raw = [](const std::string& name) {
    CovariateSpec c;
    c.name = name;
    return c;
  };

  // Base joint model shared by scenarios 0-2: gaussian outcome on sex and
  // standardized age, single risk, hazard-scale effects of sex/age plus a
  // plain comorbidity effect, both association terms active.
  cfg.long_spec.outcome = OutcomeFamily::Gaussian;
  cfg.long_spec.covariates = {raw("sex"), raw("age")};
  SurvivalSpec sv;
  sv.cause = "event";
  sv.hazard_scale_plain = {"comorb"};
  sv.hazard_scale = {raw("sex"), raw("age")};
  cfg.truth = {{"beta_t0", 1.0},   {"beta_t1", 0.5},  {"beta_sex", 0.5}, {"beta_age", -0.3},
               {"sigma2", 0.25},   {"sigma1sq", 0.5}, {"sigma2sq", 0.2}, {"rho", 0.3},
               {"kappat_comorb", 0.5}, {"lambda_sex", 0.4}, {"lambda_age", 0.25},
               {"alpha0", 0.4},    {"alpha1", 0.5}};

  switch (scenario) {
    case 0:
    case 1: {
      cfg.name = scenario == 0 ? "scenario0" : "scenario1";
      sv.baseline = Family::LogNormal;
      cfg.truth["mu"] = 0.6;
      cfg.truth["eta"] = 0.9;
      cfg.surv = {sv};
      cfg.fit_surv = {sv};
      if (scenario == 0) cfg.fit_surv[0].share_slope = false;  // misspecified fit
      cfg.admin_censoring = 4.0;
      break;
    }
    case 2: {
      cfg.name = "scenario2";
      cfg.long_spec.time_dependent = {"age"};
      cfg.truth["gamma_age"] = 0.2;
      sv.baseline = Family::PGW;
      cfg.truth["eta"] = 2.0;
      cfg.truth["nu"] = 1.5;
      cfg.truth["delta"] = 1.2;
      cfg.surv = {sv};
      cfg.fit_surv = {sv};
      cfg.admin_censoring = 5.0;
      break;
    }
    case 3: {
      cfg.name = "scenario3";
      // Nonlinear age effect via a cubic spline on the standardized scale;
      // knots are preset to cover the age-mixture support.
      CovariateSpec age_sp = raw("age");
      age_sp.expansion = Expansion::BSpline;
      age_sp.degree = 3;
      age_sp.interior_knots = 2;
      age_sp.knots = {-4.0, -4.0, -4.0, -4.0, 0.0, 0.8, 1.5, 1.5, 1.5, 1.5};
      cfg.long_spec.covariates = {raw("sex"), age_sp};
      sv.hazard_scale = {raw("sex"), age_sp};
      sv.baseline = Family::PGW;
      cfg.truth.erase("beta_age");
      cfg.truth.erase("lambda_age");
      const double beta_age[6] = {-0.8, -0.45, -0.2, 0.05, 0.35, 0.6};
      const double lambda_age[6] = {-0.5, -0.25, -0.05, 0.15, 0.4, 0.65};
      for (int k = 0; k < 6; ++k) {
        cfg.truth["beta_age_" + std::to_string(k + 1)] = beta_age[k];
        cfg.truth["lambda_age_" + std::to_string(k + 1)] = lambda_age[k];
      }
      cfg.truth["eta"] = 2.0;
      cfg.truth["nu"] = 1.5;
      cfg.truth["delta"] = 1.2;
      cfg.surv = {sv};
      cfg.fit_surv = {sv};
      cfg.admin_censoring = 5.0;
      break;
    }
    default:
      throw validation_error("unknown scenario " + std::to_string(scenario) +
                             " (expected 0-3)");
  }
  return cfg;
}

}  // namespace jmgh
