#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "jmgh/model.hpp"

namespace jmgh {

struct SamplerConfig {
  int iterations = 2000;
  int burn_in = 1000;
  int thin = 5;
  int chains = 2;
  double target_accept = 0.8;
  int max_leapfrog = 64;
  double trajectory_length = 1.5;
  uint64_t seed = 1;

  void validate() const {
    if (iterations <= 0 || burn_in < 0 || thin < 1 || chains < 1)
      throw std::invalid_argument("sampler config: invalid iteration settings");
    if (burn_in >= iterations)
      throw std::invalid_argument("sampler config: burn-in must be smaller than iterations");
    if (!(target_accept > 0.0 && target_accept < 1.0))
      throw std::invalid_argument("sampler config: target acceptance in (0,1)");
    if (max_leapfrog < 1) throw std::invalid_argument("sampler config: max leapfrog >= 1");
  }

  int retained() const { return (iterations - burn_in) / thin; }
};

// Generic differentiable target for the sampler (the joint model wraps into
// one of these; analytic test targets plug in directly).
struct HmcTarget {
  int dim = 0;
  // Returns log density; fills grad when non-null.
  std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)> logp_grad;
};

struct PosteriorChain {
  Eigen::MatrixXd draws;            // retained iterations x dim (unconstrained)
  std::vector<std::string> names;   // flat coordinate names
  uint64_t seed = 0;
  int chain_index = 0;
  double accept_rate = 0.0;
  int divergences = 0;
  double step_size = 0.0;           // adapted value
  Eigen::VectorXd inv_mass;         // adapted diagonal inverse mass
};

struct ChainDiagnostics {
  std::vector<std::string> names;
  Eigen::VectorXd split_rhat;
  Eigen::VectorXd ess;
  Eigen::VectorXd mcse;
  std::vector<std::string> flags;  // degenerate-parameter notes
};

std::vector<PosteriorChain> run_hmc(const HmcTarget& target, const SamplerConfig& cfg,
                                    const std::vector<std::string>& names,
                                    const Eigen::MatrixXd* inits = nullptr);

// Joint-model front end: builds the target, draws tempered initial values,
// names the coordinates, and maps nothing back (draws stay unconstrained;
// use constrain_shared for reporting).
std::vector<PosteriorChain> run_hmc(const JointModel& m, const SamplerConfig& cfg);

HmcTarget make_posterior_target(const JointModel& m);

// Runs `steps` leapfrog steps in place (exposed for integrator checks);
// returns false if the trajectory hit a non-finite gradient.
bool leapfrog_path(const HmcTarget& target, Eigen::VectorXd& q, Eigen::VectorXd& p,
                   const Eigen::VectorXd& inv_mass, double eps, int steps);

// Split-Rhat and ESS (autocorrelation sum truncated at the first negative
// pair) over >= 2 chains, or one chain split in halves.
ChainDiagnostics diagnostics(const std::vector<PosteriorChain>& chains);

void write_chain_csv(const PosteriorChain& chain, const std::string& path);
PosteriorChain read_chain_csv(const std::string& path);
void write_diagnostics(const ChainDiagnostics& d, const std::string& path);

}  // namespace jmgh
