#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "jmgh/baseline.hpp"

namespace jmgh {

// Pointwise posterior-predictive curve on a time grid: `center` is the
// predictive value (a ratio of predictive means for hazards), the remaining
// columns are pointwise quantiles of the per-draw curves.
struct CurveSummary {
  std::vector<double> t;
  std::vector<double> center, median, lo, hi;  // lo/hi: 2.5% / 97.5%
};

struct BaselinePredictive {
  CurveSummary hazard;    // f0 predictive mean over S0 predictive mean
  CurveSummary survival;  // predictive mean of S0
};

// theta_draws: one row per posterior draw, columns in baseline parameter
// order (constrained scale).
BaselinePredictive predictive_baseline(const Eigen::MatrixXd& theta_draws, Family family,
                                       const std::vector<double>& t_grid);

struct CompetingRisksPredictive {
  CurveSummary survival;                // overall event-free probability
  std::vector<CurveSummary> hazard;     // cause-specific predictive hazards
  std::vector<CurveSummary> cif;        // cumulative incidence (trapezoid)
};

// Aligned per-cause draws (same row = same posterior draw).
CompetingRisksPredictive cr_predictive(const std::vector<Eigen::MatrixXd>& theta_draws,
                                       const std::vector<Family>& families,
                                       const std::vector<double>& t_grid);

// Long-format persistence: columns t,curve,statistic,value (curve carries the
// cause label where applicable).
void write_curves_csv(const std::string& path, const std::vector<std::string>& labels,
                      const std::vector<const CurveSummary*>& curves);

}  // namespace jmgh
