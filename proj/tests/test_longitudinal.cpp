#include "doctest.h"

#include "jmgh/longitudinal.hpp"
#include "jmgh/special.hpp"

using namespace jmgh;

TEST_CASE("gaussian observation density integrates to 1") {
  const double eta = 0.7, sigma2 = 0.4;
  const auto gh = gauss_hermite(40);
  double total = 0.0;
  for (size_t k = 0; k < gh.nodes.size(); ++k) {
    // y = eta + sqrt(2 sigma2) x lets the Gauss-Hermite weight absorb the kernel
    const double y = eta + std::sqrt(2.0 * sigma2) * gh.nodes[k];
    total += gh.weights[k] *
             std::exp(log_density_obs(OutcomeFamily::Gaussian, eta, sigma2, y) +
                      gh.nodes[k] * gh.nodes[k]) *
             std::sqrt(2.0 * sigma2);
  }
  CHECK(std::fabs(total - 1.0) <= 1e-8);
}

TEST_CASE("linear predictor is affine in every coefficient") {
  const std::vector<double> s{1.0, -0.4}, xt{0.8};
  const PolyBasis p1{1}, p2{2};
  const double t = 1.3;
  auto eval = [&](double bt0, double bt1, std::vector<double> beta, std::vector<double> gamma,
                  double b0, double b1) {
    return linear_predictor(bt0, bt1, beta, s, gamma, xt, b0, b1, p1, p2, t);
  };
  const double base = eval(0.2, 0.5, {0.3, -0.1}, {0.6}, 0.1, -0.2);
  const double h = 1.0;  // affine: unit step recovers the design value exactly
  CHECK(eval(0.2 + h, 0.5, {0.3, -0.1}, {0.6}, 0.1, -0.2) - base == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eval(0.2, 0.5 + h, {0.3, -0.1}, {0.6}, 0.1, -0.2) - base ==
        doctest::Approx(t * t).epsilon(1e-12));
  CHECK(eval(0.2, 0.5, {0.3 + h, -0.1}, {0.6}, 0.1, -0.2) - base ==
        doctest::Approx(s[0]).epsilon(1e-12));
  CHECK(eval(0.2, 0.5, {0.3, -0.1 + h}, {0.6}, 0.1, -0.2) - base ==
        doctest::Approx(s[1]).epsilon(1e-12));
  CHECK(eval(0.2, 0.5, {0.3, -0.1}, {0.6 + h}, 0.1, -0.2) - base ==
        doctest::Approx(xt[0] * t).epsilon(1e-12));
  CHECK(eval(0.2, 0.5, {0.3, -0.1}, {0.6}, 0.1 + h, -0.2) - base ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eval(0.2, 0.5, {0.3, -0.1}, {0.6}, 0.1, -0.2 + h) - base ==
        doctest::Approx(t * t).epsilon(1e-12));
}

TEST_CASE("bernoulli-logit log density is stable at extreme linear predictors") {
  for (double eta : {-500.0, -30.0, 0.0, 30.0, 500.0}) {
    const double l1 = log_density_obs(OutcomeFamily::BernoulliLogit, eta, 1.0, 1.0);
    const double l0 = log_density_obs(OutcomeFamily::BernoulliLogit, eta, 1.0, 0.0);
    CHECK(std::isfinite(l1));
    CHECK(std::isfinite(l0));
    CHECK(l1 <= 0.0);
    CHECK(l0 <= 0.0);
  }
  CHECK_THROWS_AS(log_density_obs(OutcomeFamily::BernoulliLogit, 0.0, 1.0, 0.5),
                  std::domain_error);
}

TEST_CASE("random-effects density matches the direct bivariate normal") {
  const double s1 = 0.5, s2 = 0.2, rho = 0.3;
  const double b0 = 0.4, b1 = -0.3;
  const double det = s1 * s2 * (1.0 - rho * rho);
  const double q = (b0 * b0 / s1 - 2.0 * rho * b0 * b1 / std::sqrt(s1 * s2) + b1 * b1 / s2) /
                   (1.0 - rho * rho);
  const double direct = -std::log(2.0 * M_PI) - 0.5 * std::log(det) - 0.5 * q;
  CHECK(log_density_re(b0, b1, s1, s2, rho) == doctest::Approx(direct).epsilon(1e-12));
  CHECK_THROWS_AS(log_density_re(b0, b1, -1.0, s2, rho), std::domain_error);
}
