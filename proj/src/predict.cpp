#include "jmgh/predict.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "jmgh/data.hpp"

namespace jmgh {

namespace {

// Type-7 quantile of a scratch vector (reordered in place).
double quantile7(std::vector<double>& v, double p) {
  const double h = p * (static_cast<double>(v.size()) - 1.0);
  const size_t lo = static_cast<size_t>(std::floor(h));
  const size_t hi = std::min(lo + 1, v.size() - 1);
  std::nth_element(v.begin(), v.begin() + static_cast<long>(lo), v.end());
  const double a = v[lo];
  std::nth_element(v.begin(), v.begin() + static_cast<long>(hi), v.end());
  return a + (h - static_cast<double>(lo)) * (v[hi] - a);
}

// Summarize a draws-by-grid matrix of curves. `center` is supplied
// separately because predictive hazards are ratios of means, not means.
CurveSummary summarize_curves(const std::vector<double>& t_grid, const Eigen::MatrixXd& curves,
                              const Eigen::VectorXd& center) {
  CurveSummary cs;
  cs.t = t_grid;
  const long nt = curves.cols();
  std::vector<double> col(static_cast<size_t>(curves.rows()));
  for (long j = 0; j < nt; ++j) {
    for (long d = 0; d < curves.rows(); ++d) col[static_cast<size_t>(d)] = curves(d, j);
    cs.center.push_back(center[j]);
    cs.median.push_back(quantile7(col, 0.5));
    cs.lo.push_back(quantile7(col, 0.025));
    cs.hi.push_back(quantile7(col, 0.975));
  }
  return cs;
}

BaselineHazard row_params(const Eigen::MatrixXd& draws, Family family, long d) {
  BaselineHazard b;
  b.family = family;
  for (long k = 0; k < draws.cols(); ++k) b[static_cast<int>(k)] = draws(d, k);
  if (family == Family::PGW && draws.cols() == 2) b[2] = 1.0;
  return b;
}

}  // namespace

BaselinePredictive predictive_baseline(const Eigen::MatrixXd& theta_draws, Family family,
                                       const std::vector<double>& t_grid) {
  const long nd = theta_draws.rows();
  const long nt = static_cast<long>(t_grid.size());
  if (nd < 2 || nt < 1) throw std::invalid_argument("predictive_baseline: empty input");

  Eigen::MatrixXd haz(nd, nt), surv(nd, nt), dens(nd, nt);
  for (long d = 0; d < nd; ++d) {
    const BaselineHazard b = row_params(theta_draws, family, d);
    check_params(b);
    for (long j = 0; j < nt; ++j) {
      const double t = t_grid[static_cast<size_t>(j)];
      const double s = surv0(b, t);
      surv(d, j) = s;
      haz(d, j) = hazard0(b, t);
      dens(d, j) = haz(d, j) * s;
    }
  }
  const Eigen::VectorXd mean_surv = surv.colwise().mean();
  const Eigen::VectorXd mean_dens = dens.colwise().mean();
  BaselinePredictive out;
  out.hazard = summarize_curves(t_grid, haz,
                                (mean_dens.array() / mean_surv.array()).matrix());
  out.survival = summarize_curves(t_grid, surv, mean_surv);
  return out;
}

CompetingRisksPredictive cr_predictive(const std::vector<Eigen::MatrixXd>& theta_draws,
                                       const std::vector<Family>& families,
                                       const std::vector<double>& t_grid) {
  const size_t nc = theta_draws.size();
  if (nc == 0 || families.size() != nc)
    throw std::invalid_argument("cr_predictive: cause count mismatch");
  const long nd = theta_draws[0].rows();
  const long nt = static_cast<long>(t_grid.size());
  for (const auto& m : theta_draws)
    if (m.rows() != nd) throw std::invalid_argument("cr_predictive: draws not aligned");

  // Per draw: overall survival is the product of cause-specific baseline
  // survivals; subdensities f_k = h_k * S_all; CIFs by trapezoid.
  Eigen::MatrixXd s_all = Eigen::MatrixXd::Ones(nd, nt);
  std::vector<Eigen::MatrixXd> haz(nc, Eigen::MatrixXd(nd, nt));
  Eigen::MatrixXd cum(nd, static_cast<long>(nc));  // H_k at the first grid point
  for (size_t c = 0; c < nc; ++c) {
    for (long d = 0; d < nd; ++d) {
      const BaselineHazard b = row_params(theta_draws[c], families[c], d);
      check_params(b);
      cum(d, static_cast<long>(c)) = cum_hazard0(b, t_grid[0]);
      for (long j = 0; j < nt; ++j) {
        const double t = t_grid[static_cast<size_t>(j)];
        haz[c](d, j) = hazard0(b, t);
        s_all(d, j) *= surv0(b, t);
      }
    }
  }

  CompetingRisksPredictive out;
  out.survival = summarize_curves(t_grid, s_all, s_all.colwise().mean());
  const Eigen::VectorXd mean_s = s_all.colwise().mean();
  for (size_t c = 0; c < nc; ++c) {
    const Eigen::MatrixXd sub = haz[c].cwiseProduct(s_all);
    const Eigen::VectorXd mean_sub = sub.colwise().mean();
    out.hazard.push_back(summarize_curves(
        t_grid, haz[c], (mean_sub.array() / mean_s.array()).matrix()));

    // First cell taken in closed form: the event mass on (0, t_1] is
    // 1 - S_all(t_1), attributed to causes in proportion to their
    // cumulative hazards (exact under locally constant hazard ratios).
    Eigen::MatrixXd cif = Eigen::MatrixXd::Zero(nd, nt);
    for (long d = 0; d < nd; ++d) {
      const double total_h = cum.row(d).sum();
      cif(d, 0) = total_h > 0.0
                      ? (1.0 - s_all(d, 0)) * cum(d, static_cast<long>(c)) / total_h
                      : 0.0;
    }
    for (long j = 1; j < nt; ++j) {
      const double dt = t_grid[static_cast<size_t>(j)] - t_grid[static_cast<size_t>(j - 1)];
      cif.col(j) = cif.col(j - 1) + 0.5 * dt * (sub.col(j) + sub.col(j - 1));
    }
    Eigen::VectorXd cif_center = Eigen::VectorXd::Zero(nt);
    cif_center[0] = cif.col(0).mean();
    for (long j = 1; j < nt; ++j) {
      const double dt = t_grid[static_cast<size_t>(j)] - t_grid[static_cast<size_t>(j - 1)];
      cif_center[j] = cif_center[j - 1] + 0.5 * dt * (mean_sub[j] + mean_sub[j - 1]);
    }
    out.cif.push_back(summarize_curves(t_grid, cif, cif_center));
  }
  return out;
}

void write_curves_csv(const std::string& path, const std::vector<std::string>& labels,
                      const std::vector<const CurveSummary*>& curves) {
  if (labels.size() != curves.size())
    throw std::invalid_argument("write_curves_csv: label/curve mismatch");
  std::ofstream out(path);
  if (!out) throw validation_error("cannot write " + path);
  out << "t,curve,statistic,value\n";
  out.precision(12);
  for (size_t c = 0; c < curves.size(); ++c) {
    const CurveSummary& cs = *curves[c];
    for (size_t j = 0; j < cs.t.size(); ++j) {
      out << cs.t[j] << ',' << labels[c] << ",center," << cs.center[j] << '\n'
          << cs.t[j] << ',' << labels[c] << ",median," << cs.median[j] << '\n'
          << cs.t[j] << ',' << labels[c] << ",q025," << cs.lo[j] << '\n'
          << cs.t[j] << ',' << labels[c] << ",q975," << cs.hi[j] << '\n';
    }
  }
}

}  // namespace jmgh
