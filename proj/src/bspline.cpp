#include "jmgh/bspline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace jmgh {

int bspline_count(int degree, const std::vector<double>& knots) {
  return static_cast<int>(knots.size()) - degree - 1;
}

std::vector<double> bspline_basis(double x, int degree, const std::vector<double>& knots) {
  if (degree < 1) throw std::domain_error("bspline_basis: degree >= 1 required");
  const int m = static_cast<int>(knots.size());
  const int nbasis = m - degree - 1;
  if (nbasis < 1) throw std::domain_error("bspline_basis: knot vector too short");
  const double lo = knots.front(), hi = knots.back();
  if (x < lo || x > hi) throw std::domain_error("bspline_basis: x outside knot span");

  // Index of the knot interval containing x; clamp the right boundary so the
  // last basis function evaluates to 1 at x == hi.
  int span = degree;
  while (span < nbasis - 1 && x >= knots[static_cast<size_t>(span + 1)]) ++span;

  // de Boor triangular scheme for the nonzero functions N_{span-degree..span}.
  std::vector<double> local(static_cast<size_t>(degree) + 1, 0.0);
  std::vector<double> left(static_cast<size_t>(degree) + 1), right(static_cast<size_t>(degree) + 1);
  local[0] = 1.0;
  for (int j = 1; j <= degree; ++j) {
    left[static_cast<size_t>(j)] = x - knots[static_cast<size_t>(span + 1 - j)];
    right[static_cast<size_t>(j)] = knots[static_cast<size_t>(span + j)] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double denom = right[static_cast<size_t>(r + 1)] + left[static_cast<size_t>(j - r)];
      const double temp = denom > 0.0 ? local[static_cast<size_t>(r)] / denom : 0.0;
      local[static_cast<size_t>(r)] = saved + right[static_cast<size_t>(r + 1)] * temp;
      saved = left[static_cast<size_t>(j - r)] * temp;
    }
    local[static_cast<size_t>(j)] = saved;
  }

  std::vector<double> out(static_cast<size_t>(nbasis), 0.0);
  for (int r = 0; r <= degree; ++r) {
    const int idx = span - degree + r;
    if (idx >= 0 && idx < nbasis) out[static_cast<size_t>(idx)] = local[static_cast<size_t>(r)];
  }
  return out;
}

std::vector<double> bspline_knots(const std::vector<double>& values, int degree,
                                  int interior_knots) {
  if (values.empty()) throw std::invalid_argument("bspline_knots: no values");
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front(), hi = sorted.back();
  if (!(hi > lo)) throw std::invalid_argument("bspline_knots: degenerate covariate range");

  std::vector<double> knots;
  for (int i = 0; i <= degree; ++i) knots.push_back(lo);
  for (int k = 1; k <= interior_knots; ++k) {
    const double p = static_cast<double>(k) / (interior_knots + 1);
    // Type-7 empirical quantile.
    const double h = p * (static_cast<double>(sorted.size()) - 1.0);
    const size_t i0 = static_cast<size_t>(std::floor(h));
    const size_t i1 = std::min(i0 + 1, sorted.size() - 1);
    double q = sorted[i0] + (h - std::floor(h)) * (sorted[i1] - sorted[i0]);
    // Keep the knot vector strictly increasing in the interior.
    if (!knots.empty() && q <= knots.back()) q = std::nextafter(knots.back(), hi);
    knots.push_back(q);
  }
  for (int i = 0; i <= degree; ++i) knots.push_back(hi);
  return knots;
}

}  // namespace jmgh
