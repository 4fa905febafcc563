#include "jmgh/config.hpp"

#include <fstream>

#include "json.hpp"

namespace jmgh {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok) throw validation_error("config: unknown key '" + it.key() + "' in " + where);
  }
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw validation_error("config " + path + ": " + e.what());
  }
  return j;
}

CovariateSpec parse_covariate(const json& j, const std::string& where) {
  CovariateSpec c;
  if (j.is_string()) {
    c.name = j.get<std::string>();
    return c;
  }
  if (!j.is_object()) throw validation_error("config: covariate entry in " + where +
                                             " must be a name or an object");
  reject_unknown(j, {"name", "expansion", "degree", "interior_knots", "knots"}, where);
  c.name = j.at("name").get<std::string>();
  if (j.contains("expansion")) {
    const auto e = j["expansion"].get<std::string>();
    if (e == "raw")
      c.expansion = Expansion::Raw;
    else if (e == "bspline")
      c.expansion = Expansion::BSpline;
    else
      throw validation_error("config: unknown expansion '" + e + "' in " + where);
  }
  if (j.contains("degree")) c.degree = j["degree"].get<int>();
  if (j.contains("interior_knots")) c.interior_knots = j["interior_knots"].get<int>();
  if (j.contains("knots")) c.knots = j["knots"].get<std::vector<double>>();
  return c;
}

json covariate_json(const CovariateSpec& c) {
  if (c.expansion == Expansion::Raw) return json(c.name);
  json j{{"name", c.name}, {"expansion", "bspline"}, {"degree", c.degree},
         {"interior_knots", c.interior_knots}};
  if (!c.knots.empty()) j["knots"] = c.knots;
  return j;
}

template <class T>
void maybe(const json& j, const char* key, T& field) {
  if (j.contains(key)) field = j[key].get<T>();
}

}  // namespace

ModelConfig read_model_config(const std::string& path) {
  const json j = load_json(path);
  reject_unknown(j, {"longitudinal", "survival", "priors", "sampler"}, "top level");
  ModelConfig cfg;

  const json& lj = j.at("longitudinal");
  reject_unknown(lj, {"outcome", "covariates", "time_dependent", "p1_degree", "p2_degree"},
                 "longitudinal");
  const auto outcome = lj.at("outcome").get<std::string>();
  if (outcome == "gaussian")
    cfg.long_spec.outcome = OutcomeFamily::Gaussian;
  else if (outcome == "bernoulli")
    cfg.long_spec.outcome = OutcomeFamily::BernoulliLogit;
  else
    throw validation_error("config: unknown outcome family '" + outcome + "'");
  if (lj.contains("covariates"))
    for (const auto& cj : lj["covariates"])
      cfg.long_spec.covariates.push_back(parse_covariate(cj, "longitudinal.covariates"));
  if (lj.contains("time_dependent"))
    cfg.long_spec.time_dependent = lj["time_dependent"].get<std::vector<std::string>>();
  maybe(lj, "p1_degree", cfg.long_spec.p1.degree);
  maybe(lj, "p2_degree", cfg.long_spec.p2.degree);

  for (const auto& sj : j.at("survival")) {
    reject_unknown(sj,
                   {"cause", "baseline", "time_scale", "hazard_scale_plain", "hazard_scale",
                    "share_intercept", "share_slope", "fix_pgw_power"},
                   "survival");
    SurvivalSpec s;
    maybe(sj, "cause", s.cause);
    s.baseline = family_from_string(sj.at("baseline").get<std::string>());
    if (sj.contains("time_scale"))
      s.time_scale = sj["time_scale"].get<std::vector<std::string>>();
    if (sj.contains("hazard_scale_plain"))
      s.hazard_scale_plain = sj["hazard_scale_plain"].get<std::vector<std::string>>();
    if (sj.contains("hazard_scale"))
      for (const auto& cj : sj["hazard_scale"])
        s.hazard_scale.push_back(parse_covariate(cj, "survival.hazard_scale"));
    maybe(sj, "share_intercept", s.share_intercept);
    maybe(sj, "share_slope", s.share_slope);
    maybe(sj, "fix_pgw_power", s.fix_pgw_power);
    cfg.surv.push_back(std::move(s));
  }
  if (cfg.surv.empty()) throw validation_error("config: 'survival' must list at least one cause");

  if (j.contains("priors")) {
    const json& pj = j["priors"];
    reject_unknown(pj,
                   {"phi_sq_fixed", "phi_sq_alpha", "s_eta", "s_nu", "invgamma_a", "invgamma_b",
                    "beta_a0", "beta_b0", "delta_shape", "delta_rate", "eta_sq_lambda", "g_beta",
                    "g_lambda"},
                   "priors");
    maybe(pj, "phi_sq_fixed", cfg.priors.phi_sq_fixed);
    maybe(pj, "phi_sq_alpha", cfg.priors.phi_sq_alpha);
    maybe(pj, "s_eta", cfg.priors.s_eta);
    maybe(pj, "s_nu", cfg.priors.s_nu);
    maybe(pj, "invgamma_a", cfg.priors.invgamma_a);
    maybe(pj, "invgamma_b", cfg.priors.invgamma_b);
    maybe(pj, "beta_a0", cfg.priors.beta_a0);
    maybe(pj, "beta_b0", cfg.priors.beta_b0);
    maybe(pj, "delta_shape", cfg.priors.delta_shape);
    maybe(pj, "delta_rate", cfg.priors.delta_rate);
    maybe(pj, "eta_sq_lambda", cfg.priors.eta_sq_lambda);
    maybe(pj, "g_beta", cfg.priors.g_beta);
    maybe(pj, "g_lambda", cfg.priors.g_lambda);
  }

  if (j.contains("sampler")) {
    const json& sj = j["sampler"];
    reject_unknown(sj,
                   {"iterations", "burn_in", "thin", "chains", "target_accept", "max_leapfrog",
                    "trajectory_length", "seed"},
                   "sampler");
    maybe(sj, "iterations", cfg.sampler.iterations);
    maybe(sj, "burn_in", cfg.sampler.burn_in);
    maybe(sj, "thin", cfg.sampler.thin);
    maybe(sj, "chains", cfg.sampler.chains);
    maybe(sj, "target_accept", cfg.sampler.target_accept);
    maybe(sj, "max_leapfrog", cfg.sampler.max_leapfrog);
    maybe(sj, "trajectory_length", cfg.sampler.trajectory_length);
    maybe(sj, "seed", cfg.sampler.seed);
  }

  try {
    cfg.priors.validate();
    cfg.sampler.validate();
  } catch (const std::invalid_argument& e) {
    throw validation_error(std::string("config: ") + e.what());
  }
  return cfg;
}

void write_model_config(const ModelConfig& cfg, const std::string& path) {
  json lj;
  lj["outcome"] = cfg.long_spec.outcome == OutcomeFamily::Gaussian ? "gaussian" : "bernoulli";
  lj["covariates"] = json::array();
  for (const auto& c : cfg.long_spec.covariates) lj["covariates"].push_back(covariate_json(c));
  if (!cfg.long_spec.time_dependent.empty()) lj["time_dependent"] = cfg.long_spec.time_dependent;
  lj["p1_degree"] = cfg.long_spec.p1.degree;
  lj["p2_degree"] = cfg.long_spec.p2.degree;

  json sv = json::array();
  for (const auto& s : cfg.surv) {
    json sj{{"cause", s.cause}, {"baseline", family_name(s.baseline)}};
    if (!s.time_scale.empty()) sj["time_scale"] = s.time_scale;
    if (!s.hazard_scale_plain.empty()) sj["hazard_scale_plain"] = s.hazard_scale_plain;
    if (!s.hazard_scale.empty()) {
      sj["hazard_scale"] = json::array();
      for (const auto& c : s.hazard_scale) sj["hazard_scale"].push_back(covariate_json(c));
    }
    sj["share_intercept"] = s.share_intercept;
    sj["share_slope"] = s.share_slope;
    if (s.fix_pgw_power) sj["fix_pgw_power"] = true;
    sv.push_back(std::move(sj));
  }

  json pj{{"phi_sq_fixed", cfg.priors.phi_sq_fixed},
          {"phi_sq_alpha", cfg.priors.phi_sq_alpha},
          {"s_eta", cfg.priors.s_eta},
          {"s_nu", cfg.priors.s_nu},
          {"invgamma_a", cfg.priors.invgamma_a},
          {"invgamma_b", cfg.priors.invgamma_b},
          {"beta_a0", cfg.priors.beta_a0},
          {"beta_b0", cfg.priors.beta_b0},
          {"delta_shape", cfg.priors.delta_shape},
          {"delta_rate", cfg.priors.delta_rate},
          {"eta_sq_lambda", cfg.priors.eta_sq_lambda},
          {"g_beta", cfg.priors.g_beta},
          {"g_lambda", cfg.priors.g_lambda}};

  json smj{{"iterations", cfg.sampler.iterations},
           {"burn_in", cfg.sampler.burn_in},
           {"thin", cfg.sampler.thin},
           {"chains", cfg.sampler.chains},
           {"target_accept", cfg.sampler.target_accept},
           {"max_leapfrog", cfg.sampler.max_leapfrog},
           {"trajectory_length", cfg.sampler.trajectory_length},
           {"seed", cfg.sampler.seed}};

  const json j{{"longitudinal", lj}, {"survival", sv}, {"priors", pj}, {"sampler", smj}};
  std::ofstream out(path);
  if (!out) throw validation_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

RunInfo read_run_info(const std::string& path) {
  const json j = load_json(path);
  reject_unknown(j,
                 {"config", "longitudinal", "survival", "data_hash", "label", "chains", "seed"},
                 "run info");
  RunInfo info;
  info.config_path = j.at("config").get<std::string>();
  info.longitudinal_path = j.at("longitudinal").get<std::string>();
  info.survival_path = j.at("survival").get<std::string>();
  info.data_hash = j.at("data_hash").get<std::string>();
  maybe(j, "label", info.label);
  info.chains = j.at("chains").get<int>();
  info.seed = j.at("seed").get<uint64_t>();
  return info;
}

void write_run_info(const RunInfo& info, const std::string& path) {
  const json j{{"config", info.config_path},     {"longitudinal", info.longitudinal_path},
               {"survival", info.survival_path}, {"data_hash", info.data_hash},
               {"label", info.label},            {"chains", info.chains},
               {"seed", info.seed}};
  std::ofstream out(path);
  if (!out) throw validation_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace jmgh
