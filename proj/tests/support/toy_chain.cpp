#include "toy_chain.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "cchain/sampler.hpp"

namespace toy {

namespace {

struct Ring {
  std::size_t levels;
  std::size_t encode(const std::size_t (&s)[3]) const { return (s[0] * levels + s[1]) * levels + s[2]; }
  void decode(std::size_t idx, std::size_t (&s)[3]) const {
    s[2] = idx % levels;
    s[1] = (idx / levels) % levels;
    s[0] = idx / (levels * levels);
  }
  double value(std::size_t j) const { return static_cast<double>(j + 1) / static_cast<double>(levels); }
};

}  // namespace

BalanceReport metropolis_balance(const cchain::ModelParams& params, std::size_t levels) {
  const Ring ring{levels};
  const std::size_t states = levels * levels * levels;
  std::vector<double> pi(states);
  double total = 0.0;
  for (std::size_t idx = 0; idx < states; ++idx) {
    std::size_t s[3];
    ring.decode(idx, s);
    double log_w = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double a = ring.value(s[i]);
      const double b = ring.value(s[(i + 1) % 3]);
      log_w += -params.beta / a - params.gamma / (a + b);
    }
    pi[idx] = std::exp(log_w);
    total += pi[idx];
  }
  for (auto& p : pi) p /= total;

  const double propose = 1.0 / static_cast<double>(levels);
  // P_site(a -> state with site set to level j)
  auto move = [&](std::size_t idx, std::size_t site, std::size_t j) {
    std::size_t s[3];
    ring.decode(idx, s);
    const double prev = ring.value(s[(site + 2) % 3]);
    const double next = ring.value(s[(site + 1) % 3]);
    const double current = ring.value(s[site]);
    if (j == s[site]) {
      double stay = 1.0;
      for (std::size_t k = 0; k < levels; ++k) {
        if (k == s[site]) continue;
        stay -= propose * cchain::metropolis_accept_probability(params, prev, next, current,
                                                                ring.value(k));
      }
      return stay;
    }
    return propose * cchain::metropolis_accept_probability(params, prev, next, current, ring.value(j));
  };

  BalanceReport report;
  report.states = states;
  std::vector<double> dist = pi;
  for (std::size_t site = 0; site < 3; ++site) {
    std::vector<double> next_dist(states, 0.0);
    for (std::size_t a = 0; a < states; ++a) {
      std::size_t s[3];
      ring.decode(a, s);
      double row = 0.0;
      for (std::size_t j = 0; j < levels; ++j) {
        std::size_t t[3] = {s[0], s[1], s[2]};
        t[site] = j;
        const std::size_t b = ring.encode(t);
        const double pab = move(a, site, j);
        const double pba = move(b, site, s[site]);
        row += pab;
        if (b != a) {
          report.detailed_balance_error =
              std::max(report.detailed_balance_error, std::abs(pi[a] * pab - pi[b] * pba) / pi[a]);
        }
        next_dist[b] += dist[a] * pab;
      }
      report.row_sum_error = std::max(report.row_sum_error, std::abs(row - 1.0));
    }
    dist = std::move(next_dist);
  }
  for (std::size_t b = 0; b < states; ++b) {
    report.stationarity_error = std::max(report.stationarity_error, std::abs(dist[b] - pi[b]) / pi[b]);
  }
  return report;
}

}  // namespace toy
