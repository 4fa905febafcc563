#include "jmgh/summary.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace jmgh {

double quantile_type7(std::vector<double> v, double p) {
  if (v.empty()) throw std::invalid_argument("quantile_type7: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile_type7: p outside [0,1]");
  std::sort(v.begin(), v.end());
  const double h = p * (static_cast<double>(v.size()) - 1.0);
  const size_t lo = static_cast<size_t>(std::floor(h));
  const size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::vector<SummaryRow> summarize_posterior(const JointModel& m,
                                            const std::vector<PosteriorChain>& chains) {
  if (chains.empty()) throw std::invalid_argument("summarize_posterior: no chains");
  const int sd = m.layout.shared_dim;
  long total = 0;
  for (const auto& c : chains) total += c.draws.rows();
  if (total < 1) throw std::invalid_argument("summarize_posterior: no retained draws");

  // Constrain each retained draw's shared slice, then summarize columns.
  std::vector<std::vector<double>> cols(static_cast<size_t>(sd));
  for (auto& c : cols) c.reserve(static_cast<size_t>(total));
  std::vector<double> u(static_cast<size_t>(sd));
  for (const auto& chain : chains) {
    for (long i = 0; i < chain.draws.rows(); ++i) {
      for (int k = 0; k < sd; ++k) u[static_cast<size_t>(k)] = chain.draws(i, k);
      const auto x = constrain_shared(m, u.data());
      for (int k = 0; k < sd; ++k) cols[static_cast<size_t>(k)].push_back(x[static_cast<size_t>(k)]);
    }
  }

  std::vector<SummaryRow> rows;
  rows.reserve(static_cast<size_t>(sd));
  for (int k = 0; k < sd; ++k) {
    const auto& v = cols[static_cast<size_t>(k)];
    SummaryRow r;
    r.name = m.layout.names[static_cast<size_t>(k)];
    double s = 0.0;
    long npos = 0;
    for (double x : v) {
      s += x;
      if (x > 0.0) ++npos;
    }
    r.mean = s / static_cast<double>(v.size());
    r.median = quantile_type7(v, 0.5);
    r.q025 = quantile_type7(v, 0.025);
    r.q975 = quantile_type7(v, 0.975);
    r.p_gt0 = static_cast<double>(npos) / static_cast<double>(v.size());
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows) {
  std::ofstream out(path);
  if (!out) throw validation_error("cannot write " + path);
  out << "parameter,mean,median,q025,q975,p_gt0\n";
  out.precision(12);
  for (const auto& r : rows)
    out << r.name << ',' << r.mean << ',' << r.median << ',' << r.q025 << ',' << r.q975 << ','
        << r.p_gt0 << '\n';
}

}  // namespace jmgh
