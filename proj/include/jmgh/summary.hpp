#pragma once

#include <string>
#include <vector>

#include "jmgh/model.hpp"
#include "jmgh/sampler.hpp"

namespace jmgh {

struct SummaryRow {
  std::string name;
  double mean = 0.0, median = 0.0, q025 = 0.0, q975 = 0.0;
  double p_gt0 = 0.0;  // posterior probability of a positive value
};

// Type-7 sample quantile (copies the input).
double quantile_type7(std::vector<double> v, double p);

// Posterior summary of the shared (constrained) parameters, pooling all
// chains' retained draws.
std::vector<SummaryRow> summarize_posterior(const JointModel& m,
                                            const std::vector<PosteriorChain>& chains);

void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows);

}  // namespace jmgh
