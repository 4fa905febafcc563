#pragma once

#include <vector>

namespace jmgh {

// B-spline basis by the Cox-de Boor recursion on an open (clamped) knot
// vector. Returns all basis values at x; they are nonnegative and sum to 1.
std::vector<double> bspline_basis(double x, int degree, const std::vector<double>& knots);

// Clamped knot vector: boundary knots repeated degree+1 times, interior
// knots at the empirical quantiles of the supplied values.
std::vector<double> bspline_knots(const std::vector<double>& values, int degree,
                                  int interior_knots);

// Number of basis functions implied by a knot vector.
int bspline_count(int degree, const std::vector<double>& knots);

}  // namespace jmgh
