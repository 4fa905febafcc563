#include "doctest.h"

#include <cstdio>
#include <fstream>

#include "helpers.hpp"
#include "jmgh/config.hpp"
#include "jmgh/data.hpp"

using namespace jmgh;

namespace {

struct TempFiles {
  std::vector<std::string> paths;
  ~TempFiles() {
    for (const auto& p : paths) std::remove(p.c_str());
  }
  std::string add(const std::string& p) {
    paths.push_back(p);
    return p;
  }
};

}  // namespace

TEST_CASE("dataset CSV round-trip") {
  ScenarioConfig cfg = scenario_config(1);
  cfg.n = 15;
  cfg.seed = 2;
  const JointDataset data = simulate_dataset(cfg);

  TempFiles tmp;
  const auto& lp = tmp.add("rt_long.csv");
  const auto& sp = tmp.add("rt_surv.csv");
  write_dataset_csv(data, lp, sp);
  const JointDataset back = read_dataset_csv(lp, sp);
  REQUIRE(back.n() == data.n());
  for (int i = 0; i < data.n(); ++i) {
    const auto& a = data.subjects[static_cast<size_t>(i)];
    const auto& b = back.subjects[static_cast<size_t>(i)];
    CHECK(a.id == b.id);
    CHECK(a.event.time == b.event.time);
    CHECK(a.event.status == b.event.status);
    CHECK(a.covariates == b.covariates);
    CHECK(a.obs_times == b.obs_times);
    CHECK(a.obs_values == b.obs_values);
  }

  SUBCASE("hash changes with content") {
    const std::string h1 = dataset_hash(lp, sp);
    std::ofstream(lp, std::ios::app) << "S01,9.9,1.0\n";
    CHECK(dataset_hash(lp, sp) != h1);
  }
}

TEST_CASE("censor status parsing") {
  CHECK(censor_status_from_string("exact") == CensorStatus::Exact);
  CHECK(censor_status_from_string("right") == CensorStatus::Right);
  CHECK(censor_status_from_string("left") == CensorStatus::Left);
  CHECK(censor_status_from_string("interval") == CensorStatus::Interval);
  CHECK_THROWS_AS(censor_status_from_string("banana"), validation_error);
}

TEST_CASE("malformed survival tables are rejected") {
  TempFiles tmp;
  const auto& lp = tmp.add("bad_long.csv");
  const auto& sp = tmp.add("bad_surv.csv");
  std::ofstream(lp) << "subject_id,time,outcome\nS1,0.0,1.2\n";
  std::ofstream(sp) << "subject_id,time,status,cause,sex\nS1,-2.0,exact,event,1\n";
  CHECK_THROWS_AS(read_dataset_csv(lp, sp), validation_error);
}

TEST_CASE("model config JSON round-trip and unknown-key rejection") {
  TempFiles tmp;
  const auto& path = tmp.add("cfg_rt.json");

  ModelConfig cfg;
  cfg.long_spec.outcome = OutcomeFamily::Gaussian;
  CovariateSpec age;
  age.name = "age";
  age.expansion = Expansion::BSpline;
  age.degree = 3;
  age.interior_knots = 2;
  cfg.long_spec.covariates = {CovariateSpec{"sex", Expansion::Raw, 3, 2, {}}, age};
  cfg.long_spec.time_dependent = {"age"};
  SurvivalSpec sv;
  sv.baseline = Family::PGW;
  sv.hazard_scale_plain = {"comorb"};
  sv.hazard_scale = {CovariateSpec{"sex", Expansion::Raw, 3, 2, {}}};
  cfg.surv = {sv};
  cfg.priors.s_eta = 1.75;
  cfg.sampler.iterations = 1234;

  write_model_config(cfg, path);
  const ModelConfig back = read_model_config(path);
  CHECK(back.long_spec.outcome == cfg.long_spec.outcome);
  REQUIRE(back.long_spec.covariates.size() == 2);
  CHECK(back.long_spec.covariates[1].expansion == Expansion::BSpline);
  CHECK(back.long_spec.time_dependent == cfg.long_spec.time_dependent);
  CHECK(back.surv[0].baseline == Family::PGW);
  CHECK(back.surv[0].hazard_scale_plain == sv.hazard_scale_plain);
  CHECK(back.priors.s_eta == 1.75);
  CHECK(back.sampler.iterations == 1234);

  SUBCASE("unknown keys are rejected") {
    const auto& bad = tmp.add("cfg_bad.json");
    std::ofstream(bad) << R"({"longitudinal":{"outcome":"gaussian"},"survival":)"
                       << R"([{"baseline":"lognormal"}],"sampler":{"iteratons":100}})";
    CHECK_THROWS_AS(read_model_config(bad), validation_error);
  }
  SUBCASE("bad family is rejected") {
    const auto& bad = tmp.add("cfg_bad2.json");
    std::ofstream(bad) << R"({"longitudinal":{"outcome":"gaussian"},"survival":)"
                       << R"([{"baseline":"weibullish"}]})";
    CHECK_THROWS(read_model_config(bad));
  }
}
