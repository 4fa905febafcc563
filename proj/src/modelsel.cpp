#include "jmgh/modelsel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "jmgh/posterior.hpp"
#include "jmgh/special.hpp"

namespace jmgh {

namespace {

double log_mvn(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
               const Eigen::MatrixXd& chol_lower, double logdet) {
  const Eigen::VectorXd z =
      chol_lower.triangularView<Eigen::Lower>().solve(x - mean);
  return -0.5 * static_cast<double>(x.size()) * kLogTwoPi - 0.5 * logdet -
         0.5 * z.squaredNorm();
}

}  // namespace

BridgeResult log_marginal_bridge(const std::function<double(const Eigen::VectorXd&)>& log_post,
                                 const Eigen::MatrixXd& draws, uint64_t seed, int n_proposal) {
  const long n = draws.rows();
  const long dim = draws.cols();
  if (n < 8 || dim < 1)
    throw std::invalid_argument("log_marginal_bridge: need at least 8 draws");

  BridgeResult res;

  // Proposal moments from the second half; bridge sample from the first.
  const long n_fit = n / 2;
  const Eigen::MatrixXd fit = draws.bottomRows(n_fit);
  const Eigen::MatrixXd post = draws.topRows(n - n_fit);
  const Eigen::VectorXd mean = fit.colwise().mean();
  Eigen::MatrixXd cov;
  if (n_fit < dim + 2) {
    // Too few draws for a full-rank moment matrix: keep the variances only.
    res.proposal_inflated = true;
    cov = ((fit.rowwise() - mean.transpose()).array().square().colwise().sum() /
           static_cast<double>(n_fit - 1))
              .matrix()
              .asDiagonal();
  } else {
    cov = (fit.rowwise() - mean.transpose()).transpose() *
          (fit.rowwise() - mean.transpose()) / static_cast<double>(n_fit - 1);
  }

  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  double jitter = 1e-10 * (cov.trace() / static_cast<double>(dim) + 1.0);
  while (llt.info() != Eigen::Success) {
    res.proposal_inflated = true;
    cov.diagonal().array() += jitter;
    jitter *= 10.0;
    if (jitter > 1e6) throw std::runtime_error("log_marginal_bridge: degenerate posterior cov");
    llt.compute(cov);
  }
  const Eigen::MatrixXd L = llt.matrixL();
  const double logdet = 2.0 * L.diagonal().array().log().sum();

  const long n1 = post.rows();
  const long n2 = n_proposal > 0 ? n_proposal : n1;
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::normal_distribution<double> nd(0.0, 1.0);

  // l1: posterior draws, l2: proposal draws, both log(post/proposal).
  std::vector<double> l1(static_cast<size_t>(n1)), l2;
  l2.reserve(static_cast<size_t>(n2));
  for (long i = 0; i < n1; ++i) {
    const Eigen::VectorXd x = post.row(i);
    l1[static_cast<size_t>(i)] = log_post(x) - log_mvn(x, mean, L, logdet);
  }
  for (long j = 0; j < n2; ++j) {
    Eigen::VectorXd z(dim);
    for (long k = 0; k < dim; ++k) z[k] = nd(rng);
    const Eigen::VectorXd x = mean + L * z;
    const double lp = log_post(x);
    if (!std::isfinite(lp)) {
      l2.push_back(-std::numeric_limits<double>::infinity());
      continue;
    }
    l2.push_back(lp - log_mvn(x, mean, L, logdet));
  }

  // Iterative optimal-bridge estimator, stabilized around the median of l1.
  std::vector<double> sorted(l1);
  std::nth_element(sorted.begin(), sorted.begin() + n1 / 2, sorted.end());
  const double lstar = sorted[static_cast<size_t>(n1 / 2)];
  const double s1 = static_cast<double>(n1) / static_cast<double>(n1 + n2);
  const double s2 = static_cast<double>(n2) / static_cast<double>(n1 + n2);

  double r = 1.0;
  for (res.iterations = 1; res.iterations <= 1000; ++res.iterations) {
    double num = 0.0, den = 0.0;
    for (double l : l2) {
      const double e = std::exp(l - lstar);
      num += e / (s1 * e + s2 * r);
    }
    for (double l : l1) den += 1.0 / (s1 * std::exp(l - lstar) + s2 * r);
    num /= static_cast<double>(n2);
    den /= static_cast<double>(n1);
    const double r_new = num / den;
    if (!(r_new > 0.0) || !std::isfinite(r_new))
      throw std::runtime_error("log_marginal_bridge: iteration diverged");
    const bool done = std::fabs(r_new - r) <= 1e-10 * r;
    r = r_new;
    if (done) {
      res.converged = true;
      break;
    }
  }
  res.log_marginal = std::log(r) + lstar;

  // Delta-method standard error from the variances of the two bridge
  // integrand evaluations.
  auto var_over_meansq = [](const std::vector<double>& f) {
    double m = 0.0;
    for (double v : f) m += v;
    m /= static_cast<double>(f.size());
    double s = 0.0;
    for (double v : f) s += (v - m) * (v - m);
    s /= static_cast<double>(f.size() - 1);
    return s / (m * m * static_cast<double>(f.size()));
  };
  std::vector<double> f1, f2;
  f1.reserve(l1.size());
  f2.reserve(l2.size());
  for (double l : l1) f1.push_back(1.0 / (s1 * std::exp(l - lstar) + s2 * r));
  for (double l : l2) {
    const double e = std::exp(l - lstar);
    f2.push_back(e / (s1 * e + s2 * r));
  }
  res.se = std::sqrt(std::max(0.0, var_over_meansq(f1) + var_over_meansq(f2)));
  return res;
}

BridgeResult log_marginal_bridge(const JointModel& m, const Eigen::MatrixXd& draws,
                                 uint64_t seed, int n_proposal) {
  auto lp = [&m](const Eigen::VectorXd& u) {
    try {
      return log_posterior(m, u);
    } catch (const std::runtime_error&) {
      return -std::numeric_limits<double>::infinity();
    } catch (const std::domain_error&) {
      return -std::numeric_limits<double>::infinity();
    }
  };
  return log_marginal_bridge(lp, draws, seed, n_proposal);
}

std::vector<double> posterior_model_probs(const std::vector<double>& log_marginal,
                                          std::vector<double> prior) {
  const size_t k = log_marginal.size();
  if (k == 0) throw std::invalid_argument("posterior_model_probs: no models");
  if (prior.empty()) prior.assign(k, 1.0 / static_cast<double>(k));
  if (prior.size() != k)
    throw std::invalid_argument("posterior_model_probs: prior length mismatch");
  std::vector<double> lw(k);
  double mx = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < k; ++i) {
    if (!(prior[i] > 0.0))
      throw std::invalid_argument("posterior_model_probs: prior probabilities must be positive");
    lw[i] = log_marginal[i] + std::log(prior[i]);
    mx = std::max(mx, lw[i]);
  }
  double z = 0.0;
  for (size_t i = 0; i < k; ++i) z += std::exp(lw[i] - mx);
  std::vector<double> out(k);
  for (size_t i = 0; i < k; ++i) out[i] = std::exp(lw[i] - mx) / z;
  return out;
}

double log10_bayes_factor(double log_marginal_a, double log_marginal_b) {
  return (log_marginal_a - log_marginal_b) / std::log(10.0);
}

}  // namespace jmgh
