#include "jmgh/sampler.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "jmgh/posterior.hpp"

namespace jmgh {

namespace {

struct LeapfrogState {
  Eigen::VectorXd q, p, grad;
  double logp = 0.0;
};

double hamiltonian(const LeapfrogState& s, const Eigen::VectorXd& inv_mass) {
  return -s.logp + 0.5 * (s.p.array().square() * inv_mass.array()).sum();
}

// One leapfrog step; returns false on non-finite gradient.
bool leapfrog(const HmcTarget& target, LeapfrogState& s, double eps,
              const Eigen::VectorXd& inv_mass) {
  s.p += 0.5 * eps * s.grad;
  s.q.array() += eps * (s.p.array() * inv_mass.array());
  Eigen::VectorXd g(target.dim);
  const double lp = target.logp_grad(s.q, &g);
  if (!std::isfinite(lp) || !g.allFinite()) return false;
  s.logp = lp;
  s.grad = g;
  s.p += 0.5 * eps * s.grad;
  return true;
}

double find_reasonable_epsilon(const HmcTarget& target, const Eigen::VectorXd& q0,
                               const Eigen::VectorXd& inv_mass, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  double eps = 0.1;
  LeapfrogState s0;
  s0.q = q0;
  s0.p.resize(target.dim);
  for (int k = 0; k < target.dim; ++k) s0.p[k] = nd(rng) / std::sqrt(inv_mass[k]);
  s0.grad.resize(target.dim);
  s0.logp = target.logp_grad(s0.q, &s0.grad);
  const double h0 = hamiltonian(s0, inv_mass);
  auto accept_prob = [&](double e) {
    LeapfrogState s = s0;
    if (!leapfrog(target, s, e, inv_mass)) return 0.0;
    const double dh = h0 - hamiltonian(s, inv_mass);
    return std::exp(std::min(0.0, dh));
  };
  double a = accept_prob(eps);
  const double dir = a > 0.5 ? 1.0 : -1.0;
  for (int it = 0; it < 50; ++it) {
    eps *= std::pow(2.0, dir);
    a = accept_prob(eps);
    if ((dir > 0 && a <= 0.5) || (dir < 0 && a >= 0.5)) break;
    if (eps > 1e4 || eps < 1e-8) break;
  }
  return std::clamp(eps, 1e-8, 1e4);
}

}  // namespace

bool leapfrog_path(const HmcTarget& target, Eigen::VectorXd& q, Eigen::VectorXd& p,
                   const Eigen::VectorXd& inv_mass, double eps, int steps) {
  LeapfrogState s;
  s.q = q;
  s.p = p;
  s.grad.resize(target.dim);
  s.logp = target.logp_grad(s.q, &s.grad);
  for (int l = 0; l < steps; ++l)
    if (!leapfrog(target, s, eps, inv_mass)) return false;
  q = s.q;
  p = s.p;
  return true;
}

std::vector<PosteriorChain> run_hmc(const HmcTarget& target, const SamplerConfig& cfg,
                                    const std::vector<std::string>& names,
                                    const Eigen::MatrixXd* inits) {
  cfg.validate();
  if (static_cast<int>(names.size()) != target.dim)
    throw std::invalid_argument("run_hmc: name count does not match target dimension");
  std::vector<PosteriorChain> chains;
  const double divergence_energy = 1000.0;

  for (int c = 0; c < cfg.chains; ++c) {
    std::seed_seq sseq{cfg.seed, static_cast<uint64_t>(c) + 1};
    std::mt19937_64 rng(sseq);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud;

    LeapfrogState cur;
    if (inits) {
      cur.q = inits->row(c).transpose();
    } else {
      cur.q.resize(target.dim);
      for (int k = 0; k < target.dim; ++k) cur.q[k] = 0.1 * nd(rng);
    }
    cur.grad.resize(target.dim);
    cur.logp = target.logp_grad(cur.q, &cur.grad);
    if (!std::isfinite(cur.logp))
      throw std::runtime_error("run_hmc: initial point has non-finite log density");

    Eigen::VectorXd inv_mass = Eigen::VectorXd::Ones(target.dim);

    // Dual averaging state (standard schedule).
    double eps = find_reasonable_epsilon(target, cur.q, inv_mass, rng);
    double mu = std::log(10.0 * eps);
    double log_eps_bar = 0.0, h_bar = 0.0;
    const double da_gamma = 0.05, da_t0 = 10.0, da_kappa = 0.75;
    int da_count = 0;
    auto da_restart = [&]() {
      mu = std::log(10.0 * eps);
      log_eps_bar = 0.0;
      h_bar = 0.0;
      da_count = 0;
    };

    // Variance estimation window inside burn-in for the diagonal metric.
    const int win_lo = static_cast<int>(0.15 * cfg.burn_in);
    const int win_hi = static_cast<int>(0.8 * cfg.burn_in);
    Eigen::VectorXd wsum = Eigen::VectorXd::Zero(target.dim);
    Eigen::VectorXd wsum2 = Eigen::VectorXd::Zero(target.dim);
    int wn = 0;

    PosteriorChain chain;
    chain.names = names;
    chain.seed = cfg.seed;
    chain.chain_index = c;
    chain.draws.resize(cfg.retained(), target.dim);

    int retained = 0, accepted = 0, total = 0, divergences = 0;
    for (int it = 0; it < cfg.iterations; ++it) {
      LeapfrogState prop = cur;
      prop.p.resize(target.dim);
      for (int k = 0; k < target.dim; ++k) prop.p[k] = nd(rng) / std::sqrt(inv_mass[k]);
      const double h_start = hamiltonian(prop, inv_mass);

      const int base_steps =
          std::clamp(static_cast<int>(std::ceil(cfg.trajectory_length / eps)), 1, cfg.max_leapfrog);
      const int steps = std::max(1, static_cast<int>(std::floor(base_steps * (0.8 + 0.2 * ud(rng)))));

      bool ok = true;
      for (int l = 0; l < steps && ok; ++l) ok = leapfrog(target, prop, eps, inv_mass);
      double accept_p = 0.0;
      bool divergent = false;
      if (ok) {
        const double dh = h_start - hamiltonian(prop, inv_mass);
        if (dh < -divergence_energy) divergent = true;
        accept_p = std::isfinite(dh) ? std::exp(std::min(0.0, dh)) : 0.0;
      }
      if (divergent || !ok) {
        ++divergences;
        accept_p = 0.0;
      }
      ++total;
      if (accept_p > 0.0 && ud(rng) < accept_p) {
        cur.q = prop.q;
        cur.logp = prop.logp;
        cur.grad = prop.grad;
        ++accepted;
      }

      const bool warm = it < cfg.burn_in;
      if (warm) {
        // Dual averaging update.
        ++da_count;
        const double eta = 1.0 / (da_count + da_t0);
        h_bar = (1.0 - eta) * h_bar + eta * (cfg.target_accept - accept_p);
        const double log_eps = mu - std::sqrt(static_cast<double>(da_count)) / da_gamma * h_bar;
        const double x = std::pow(static_cast<double>(da_count), -da_kappa);
        log_eps_bar = x * log_eps + (1.0 - x) * log_eps_bar;
        eps = std::exp(log_eps);

        if (it >= win_lo && it < win_hi) {
          wsum += cur.q;
          wsum2 += cur.q.array().square().matrix();
          ++wn;
        }
        if (it == win_hi - 1 && wn > 10) {
          const Eigen::VectorXd mean = wsum / wn;
          Eigen::VectorXd var =
              (wsum2 / wn - mean.array().square().matrix()).cwiseMax(1e-10);
          // Light regularization toward unit scale.
          const double w = static_cast<double>(wn) / (wn + 5.0);
          inv_mass = (w * var.array() + (1.0 - w) * 1.0).matrix();
          eps = find_reasonable_epsilon(target, cur.q, inv_mass, rng);
          da_restart();
        }
        if (it == cfg.burn_in - 1) eps = std::exp(log_eps_bar);
      } else {
        const int post = it - cfg.burn_in;
        if ((post + 1) % cfg.thin == 0 && retained < cfg.retained()) {
          chain.draws.row(retained) = cur.q.transpose();
          ++retained;
        }
      }
    }
    chain.accept_rate = static_cast<double>(accepted) / total;
    chain.divergences = divergences;
    chain.step_size = eps;
    chain.inv_mass = inv_mass;
    chains.push_back(std::move(chain));
  }
  return chains;
}

HmcTarget make_posterior_target(const JointModel& m) {
  HmcTarget t;
  t.dim = m.layout.total_dim(m.n());
  t.logp_grad = [&m](const Eigen::VectorXd& q, Eigen::VectorXd* g) {
    try {
      if (g) return grad_log_posterior(m, q, *g);
      return log_posterior(m, q);
    } catch (const std::runtime_error&) {
      if (g) g->setZero(q.size());
      return -std::numeric_limits<double>::infinity();
    } catch (const std::domain_error&) {
      if (g) g->setZero(q.size());
      return -std::numeric_limits<double>::infinity();
    }
  };
  return t;
}

std::vector<PosteriorChain> run_hmc(const JointModel& m, const SamplerConfig& cfg) {
  const HmcTarget target = make_posterior_target(m);
  std::vector<std::string> names = m.layout.names;
  for (int i = 0; i < m.n(); ++i) {
    names.push_back("z0_" + m.data.subjects[static_cast<size_t>(i)].id);
    names.push_back("z1_" + m.data.subjects[static_cast<size_t>(i)].id);
  }

  // Tempered initial draws: weakly informative normal blocks with variance
  // divided by 10; positives start near unit scale; z near zero.
  Eigen::MatrixXd inits(cfg.chains, target.dim);
  for (int c = 0; c < cfg.chains; ++c) {
    std::seed_seq sseq{cfg.seed, static_cast<uint64_t>(c) + 1, static_cast<uint64_t>(0xA11CE)};
    std::mt19937_64 rng(sseq);
    std::normal_distribution<double> nd;
    for (int k = 0; k < m.layout.shared_dim; ++k) {
      switch (m.layout.transforms[static_cast<size_t>(k)]) {
        case TransformKind::Identity:
          inits(c, k) = nd(rng) * std::sqrt(m.priors.phi_sq_fixed / 10.0) * 0.1;
          break;
        case TransformKind::LogPositive:
          inits(c, k) = 0.3 * nd(rng);
          break;
        case TransformKind::AtanhCorr:
          inits(c, k) = 0.1 * nd(rng);
          break;
      }
    }
    for (int k = m.layout.shared_dim; k < target.dim; ++k) inits(c, k) = 0.1 * nd(rng);
  }
  return run_hmc(target, cfg, names, &inits);
}

ChainDiagnostics diagnostics(const std::vector<PosteriorChain>& chains) {
  if (chains.empty()) throw std::invalid_argument("diagnostics: no chains");
  const Eigen::Index dim = chains[0].draws.cols();
  const Eigen::Index n_full = chains[0].draws.rows();
  for (const auto& c : chains)
    if (c.draws.rows() != n_full || c.draws.cols() != dim)
      throw std::invalid_argument("diagnostics: chains must share shape");
  if (n_full < 10) throw std::invalid_argument("diagnostics: need at least 10 retained draws");

  // Split each chain in halves.
  const Eigen::Index half = n_full / 2;
  std::vector<Eigen::MatrixXd> splits;
  for (const auto& c : chains) {
    splits.push_back(c.draws.topRows(half));
    splits.push_back(c.draws.middleRows(half, half));
  }
  const size_t m = splits.size();
  const double n = static_cast<double>(half);

  ChainDiagnostics d;
  d.names = chains[0].names;
  d.split_rhat.resize(dim);
  d.ess.resize(dim);
  d.mcse.resize(dim);

  for (Eigen::Index p = 0; p < dim; ++p) {
    std::vector<double> means(m), vars(m);
    for (size_t j = 0; j < m; ++j) {
      const auto col = splits[j].col(p);
      means[j] = col.mean();
      vars[j] = (col.array() - means[j]).square().sum() / (n - 1.0);
    }
    double mean_all = 0.0;
    for (double mu : means) mean_all += mu;
    mean_all /= static_cast<double>(m);
    double B = 0.0;
    for (double mu : means) B += (mu - mean_all) * (mu - mean_all);
    B *= n / (static_cast<double>(m) - 1.0);
    double W = 0.0;
    for (double v : vars) W += v;
    W /= static_cast<double>(m);

    const bool degenerate = W < 1e-300;
    if (degenerate) {
      d.split_rhat[p] = std::numeric_limits<double>::quiet_NaN();
      d.ess[p] = 0.0;
      d.mcse[p] = 0.0;
      d.flags.push_back("parameter '" + d.names[static_cast<size_t>(p)] +
                        "': zero within-chain variance (degenerate chain)");
      continue;
    }
    const double var_plus = (n - 1.0) / n * W + B / n;
    d.split_rhat[p] = std::sqrt(var_plus / W);

    // Combined autocorrelation estimate, truncated at the first negative
    // paired sum (Geyer initial positive sequence).
    const Eigen::Index max_lag = half - 1;
    std::vector<double> rho(static_cast<size_t>(max_lag), 0.0);
    for (Eigen::Index t = 0; t < max_lag; ++t) {
      double acov = 0.0;
      for (size_t j = 0; j < m; ++j) {
        const auto col = splits[j].col(p);
        double s = 0.0;
        for (Eigen::Index i = 0; i + t < half; ++i)
          s += (col[i] - means[j]) * (col[i + t] - means[j]);
        acov += s / n;
      }
      acov /= static_cast<double>(m);
      rho[static_cast<size_t>(t)] = 1.0 - (W - acov) / var_plus;
    }
    double tau = 1.0;
    for (Eigen::Index t = 1; t + 1 < max_lag; t += 2) {
      const double pair = rho[static_cast<size_t>(t)] + rho[static_cast<size_t>(t + 1)];
      if (pair < 0.0) break;
      tau += 2.0 * pair;
    }
    const double total_n = static_cast<double>(m) * n;
    d.ess[p] = std::max(1.0, total_n / tau);
    d.mcse[p] = std::sqrt(var_plus / d.ess[p]);
  }
  return d;
}

void write_chain_csv(const PosteriorChain& chain, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw validation_error("cannot write file: " + path);
  out.precision(17);
  for (size_t k = 0; k < chain.names.size(); ++k) out << (k ? "," : "") << chain.names[k];
  out << "\r\n";
  for (Eigen::Index r = 0; r < chain.draws.rows(); ++r) {
    for (Eigen::Index c = 0; c < chain.draws.cols(); ++c)
      out << (c ? "," : "") << chain.draws(r, c);
    out << "\r\n";
  }
}

PosteriorChain read_chain_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot open file: " + path);
  PosteriorChain chain;
  std::string line;
  if (!std::getline(in, line)) throw validation_error("empty chain file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::stringstream hs(line);
  std::string tok;
  while (std::getline(hs, tok, ',')) chain.names.push_back(tok);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    while (std::getline(ls, tok, ',')) row.push_back(std::stod(tok));
    if (row.size() != chain.names.size())
      throw validation_error("chain file row width mismatch: " + path);
    rows.push_back(std::move(row));
  }
  chain.draws.resize(static_cast<Eigen::Index>(rows.size()),
                     static_cast<Eigen::Index>(chain.names.size()));
  for (size_t r = 0; r < rows.size(); ++r)
    for (size_t c = 0; c < rows[r].size(); ++c)
      chain.draws(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return chain;
}

void write_diagnostics(const ChainDiagnostics& d, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw validation_error("cannot write file: " + path);
  out.precision(6);
  out << "parameter,split_rhat,ess,mcse\r\n";
  for (size_t k = 0; k < d.names.size(); ++k)
    out << d.names[k] << ',' << d.split_rhat[static_cast<Eigen::Index>(k)] << ','
        << d.ess[static_cast<Eigen::Index>(k)] << ',' << d.mcse[static_cast<Eigen::Index>(k)]
        << "\r\n";
  for (const auto& f : d.flags) out << "# " << f << "\r\n";
}

}  // namespace jmgh
