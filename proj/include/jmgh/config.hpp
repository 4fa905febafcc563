#pragma once

#include <string>

#include "jmgh/model.hpp"
#include "jmgh/sampler.hpp"

namespace jmgh {

// Full model configuration as read from / written to JSON. Unknown keys are
// rejected to catch typos early.
struct ModelConfig {
  LongitudinalSpec long_spec;
  std::vector<SurvivalSpec> surv;
  PriorConfig priors;
  SamplerConfig sampler;
};

ModelConfig read_model_config(const std::string& path);
void write_model_config(const ModelConfig& cfg, const std::string& path);

// Fit provenance written next to the chains, consumed by compare/predict.
struct RunInfo {
  std::string config_path;
  std::string longitudinal_path;
  std::string survival_path;
  std::string data_hash;
  std::string label;
  int chains = 0;
  uint64_t seed = 0;
};

RunInfo read_run_info(const std::string& path);
void write_run_info(const RunInfo& info, const std::string& path);

}  // namespace jmgh
