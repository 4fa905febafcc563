#include "doctest.h"

#include <random>

#include "jmgh/predict.hpp"

using namespace jmgh;

namespace {

std::vector<double> grid_of(double t_max, int steps) {
  std::vector<double> g;
  for (int k = 1; k <= steps; ++k)
    g.push_back(t_max * static_cast<double>(k) / static_cast<double>(steps));
  return g;
}

Eigen::MatrixXd random_theta(Family f, int n_draws, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.6, 1.6);
  Eigen::MatrixXd out(n_draws, family_nparams(f));
  for (int i = 0; i < n_draws; ++i)
    for (int k = 0; k < family_nparams(f); ++k)
      out(i, k) = (f == Family::LogNormal && k == 0) ? unif(rng) - 1.0 : unif(rng);
  return out;
}

}  // namespace

TEST_CASE("degenerate chain reproduces the plug-in curves") {
  BaselineHazard b;
  b.family = Family::PGW;
  b[0] = 1.5;
  b[1] = 1.2;
  b[2] = 0.8;
  Eigen::MatrixXd theta(3, 3);  // all rows identical
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) theta(i, k) = b[k];

  const auto grid = grid_of(4.0, 37);
  const auto pred = predictive_baseline(theta, Family::PGW, grid);
  for (size_t j = 0; j < grid.size(); ++j) {
    CHECK(pred.hazard.center[j] == doctest::Approx(hazard0(b, grid[j])).epsilon(1e-12));
    CHECK(pred.hazard.lo[j] == doctest::Approx(hazard0(b, grid[j])).epsilon(1e-12));
    CHECK(pred.survival.center[j] == doctest::Approx(surv0(b, grid[j])).epsilon(1e-12));
  }
}

TEST_CASE("single-cause CIF complements the predictive survival") {
  const auto grid = grid_of(12.0, 600);  // dense, far into the tail
  const auto theta = std::vector<Eigen::MatrixXd>{random_theta(Family::Gamma, 50, 4)};
  const auto cr = cr_predictive(theta, {Family::Gamma}, grid);
  for (size_t j = 0; j < grid.size(); ++j) {
    CHECK(std::fabs(cr.cif[0].center[j] - (1.0 - cr.survival.center[j])) <= 2e-3);
  }
}

TEST_CASE("competing-risks total probability identity") {
  const auto grid = grid_of(15.0, 900);
  const std::vector<Eigen::MatrixXd> theta{random_theta(Family::Gamma, 40, 7),
                                           random_theta(Family::PGW, 40, 8)};
  const auto cr = cr_predictive(theta, {Family::Gamma, Family::PGW}, grid);
  const size_t last = grid.size() - 1;
  const double total =
      cr.cif[0].center[last] + cr.cif[1].center[last] + cr.survival.center[last];
  CHECK(std::fabs(total - 1.0) <= 1e-3);

  // The same identity holds pointwise up to the left-open first cell.
  for (size_t j = 0; j < grid.size(); ++j) {
    const double at_j = cr.cif[0].center[j] + cr.cif[1].center[j] + cr.survival.center[j];
    CHECK(std::fabs(at_j - 1.0) <= 2e-3);
  }

  // Predictive mean assembly: per-cause hazard center times survival center
  // integrates (trapezoid) back to the CIF center.
  double acc = 0.0;
  for (size_t j = 1; j < grid.size(); ++j) {
    const double dt = grid[j] - grid[j - 1];
    acc += 0.5 * dt *
           (cr.hazard[0].center[j] * cr.survival.center[j] +
            cr.hazard[0].center[j - 1] * cr.survival.center[j - 1]);
    CHECK(std::fabs(acc - (cr.cif[0].center[j] - cr.cif[0].center[0])) <= 1e-9);
  }
}
