#include "doctest.h"

#include <numeric>
#include <random>

#include "jmgh/bspline.hpp"
#include "jmgh/data.hpp"

using namespace jmgh;

TEST_CASE("B-spline basis: partition of unity inside the span") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> values;
  for (int i = 0; i < 40; ++i) values.push_back(-1.0 + 5.0 * unif(rng));
  for (int degree : {1, 2, 3}) {
    for (int interior : {0, 1, 2, 4}) {
      const auto knots = bspline_knots(values, degree, interior);
      CHECK(static_cast<int>(knots.size()) == 2 * (degree + 1) + interior);
      const int q = bspline_count(degree, knots);
      for (double x : values) {
        const auto basis = bspline_basis(x, degree, knots);
        REQUIRE(static_cast<int>(basis.size()) == q);
        double s = std::accumulate(basis.begin(), basis.end(), 0.0);
        CHECK(std::fabs(s - 1.0) <= 1e-12);
        for (double v : basis) CHECK(v >= -1e-14);
      }
    }
  }
}

TEST_CASE("B-spline basis: boundary knots and domain errors") {
  const std::vector<double> values{0.0, 0.25, 0.5, 0.75, 1.0};
  const auto knots = bspline_knots(values, 3, 2);
  CHECK(knots.front() == 0.0);
  CHECK(knots.back() == 1.0);
  CHECK_NOTHROW(bspline_basis(0.0, 3, knots));
  CHECK_NOTHROW(bspline_basis(1.0, 3, knots));
  CHECK_THROWS_AS(bspline_basis(-0.1, 3, knots), std::domain_error);
  CHECK_THROWS_AS(bspline_basis(1.1, 3, knots), std::domain_error);
}

TEST_CASE("B-spline interior knots sit at quantiles") {
  std::vector<double> values;
  for (int i = 0; i < 101; ++i) values.push_back(static_cast<double>(i) / 100.0);
  const auto knots = bspline_knots(values, 3, 1);
  // One interior knot at the median of the data.
  CHECK(knots[4] == doctest::Approx(0.5).epsilon(1e-12));
}
