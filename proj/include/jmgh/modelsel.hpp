#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "jmgh/model.hpp"

namespace jmgh {

struct BridgeResult {
  double log_marginal = 0.0;
  double se = 0.0;  // approximate Monte Carlo standard error (log scale)
  int iterations = 0;
  bool converged = false;
  bool proposal_inflated = false;  // diagonal added to a non-PD moment matrix
};

// Bridge-sampling estimate of the log marginal likelihood from posterior
// draws (rows) in the unconstrained parameterization. The Gaussian proposal
// is moment matched to the second half of the draws; the first half enters
// the bridge iteration.
BridgeResult log_marginal_bridge(const std::function<double(const Eigen::VectorXd&)>& log_post,
                                 const Eigen::MatrixXd& draws, uint64_t seed,
                                 int n_proposal = 0);

// Convenience overload over the model's unnormalized log posterior (full
// flat vector including random-effect coordinates).
BridgeResult log_marginal_bridge(const JointModel& m, const Eigen::MatrixXd& draws,
                                 uint64_t seed, int n_proposal = 0);

// Posterior model probabilities from log marginal likelihoods and prior
// model probabilities (uniform when `prior` is empty).
std::vector<double> posterior_model_probs(const std::vector<double>& log_marginal,
                                          std::vector<double> prior = {});

// log10 Bayes factor of model a over model b.
double log10_bayes_factor(double log_marginal_a, double log_marginal_b);

}  // namespace jmgh
