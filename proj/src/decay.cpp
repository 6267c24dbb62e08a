#include "cchain/decay.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cchain/errors.hpp"
#include "cchain/parallel.hpp"
#include "cchain/rng.hpp"
#include "cchain/stats.hpp"

namespace cchain {

namespace {

// Relative deviation of Tscaled^s from its leading rank-one part:
// Tscaled^s(a, b) = e_1(a) e_1(b) (1 + E_s(a, b)). Computed from the
// subleading modes directly so that tiny deviations keep full precision.
Eigen::MatrixXd relative_deviation(const TransferKernel& kernel, std::size_t s) {
  const Eigen::MatrixXd& modes = kernel.modes();
  const Eigen::VectorXd lead = modes.col(0);
  const auto m = modes.rows();
  if (s == 0) {
    Eigen::MatrixXd dev(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
      for (Eigen::Index b = 0; b < m; ++b) {
        dev(a, b) = kernel.reduced_kernel()(a, b) /
                        (kernel.leading_eigenvalue() * lead[a] * lead[b]) -
                    1.0;
      }
    }
    return dev;
  }
  const auto& rho = kernel.eigenvalue_ratios();
  Eigen::MatrixXd phi = lead.cwiseInverse().asDiagonal() * modes.rightCols(m - 1);
  Eigen::VectorXd scale(m - 1);
  for (Eigen::Index c = 1; c < m; ++c) {
    scale[c - 1] = std::pow(rho[c], static_cast<double>(s - 1));
  }
  return phi * scale.asDiagonal() * phi.transpose();
}

}  // namespace

DecayMeasurement measure_ratio(const TransferKernel& kernel, std::size_t n,
                               const IndexCluster& i_cluster, const IndexCluster& j_cluster) {
  if (i_cluster.ring != n || j_cluster.ring != n) {
    throw std::invalid_argument("cluster ring differs from chain length");
  }
  if (i_cluster.length + j_cluster.length >= n) {
    throw std::invalid_argument("clusters do not fit disjointly on the circle");
  }
  cluster_distance(i_cluster, j_cluster);  // throws on overlap
  const std::size_t p1 = i_cluster.length;
  const std::size_t p2 = j_cluster.length;
  const std::size_t gap_ij = forward_gap(i_cluster, j_cluster);
  const std::size_t gap_ji = n - p1 - p2 - gap_ij;

  // f_{I|J} / f_I = zhat * T(u2,u3) T(u4,u1) / (T(u2,u1) T(u4,u3)) in scaled
  // form; u1, u2 are the first and last I sites, u3, u4 the first and last J
  // sites.
  const Eigen::MatrixXd to_j = relative_deviation(kernel, gap_ij);
  const Eigen::MatrixXd from_j = relative_deviation(kernel, gap_ji);
  const Eigen::MatrixXd around_i = relative_deviation(kernel, n - p1);
  const Eigen::MatrixXd around_j = relative_deviation(kernel, n - p2);
  const double delta = scaled_partition_sum(kernel, n) - 1.0;

  const auto m = static_cast<Eigen::Index>(kernel.size());
  double sup = 0.0;
  for (Eigen::Index u1 = 0; u1 < m; ++u1) {
    for (Eigen::Index u2 = (p1 == 1 ? u1 : 0); u2 < (p1 == 1 ? u1 + 1 : m); ++u2) {
      const double c = around_i(u2, u1);
      for (Eigen::Index u3 = 0; u3 < m; ++u3) {
        for (Eigen::Index u4 = (p2 == 1 ? u3 : 0); u4 < (p2 == 1 ? u3 + 1 : m); ++u4) {
          const double a = to_j(u2, u3);
          const double b = from_j(u4, u1);
          const double d = around_j(u4, u3);
          const double numer = delta * (1.0 + a) * (1.0 + b) + a + b + a * b - c - d - c * d;
          const double value = std::abs(numer / ((1.0 + c) * (1.0 + d)));
          sup = std::max(sup, value);
        }
      }
    }
  }
  if (!std::isfinite(sup)) {
    throw std::runtime_error("non-finite density ratio; marginal vanished on the grid");
  }
  DecayMeasurement out;
  out.params = kernel.params();
  out.n = n;
  out.i_len = p1;
  out.j_len = p2;
  out.r = gap_ij;
  out.sup_ratio = sup;
  return out;
}

DecayMeasurement measure_ratio(const TransferKernel& kernel, std::size_t n, std::size_t i_len,
                               std::size_t j_len, std::size_t r) {
  if (i_len == 0 || j_len == 0 || i_len + j_len + r >= n) {
    throw std::invalid_argument("cannot place clusters of sizes " + std::to_string(i_len) + ", " +
                                std::to_string(j_len) + " with separation " + std::to_string(r) +
                                " on a circle of " + std::to_string(n) + " sites");
  }
  return measure_ratio(kernel, n, IndexCluster(0, i_len, n), IndexCluster(i_len + r, j_len, n));
}

std::vector<DecayMeasurement> measure_ratio_sweep(const TransferKernel& kernel, std::size_t n,
                                                  std::size_t i_len, std::size_t j_len,
                                                  std::size_t r_min, std::size_t r_max) {
  if (r_max < r_min) throw std::invalid_argument("r_max must be >= r_min");
  std::vector<DecayMeasurement> out(r_max - r_min + 1);
  parallel_for(out.size(), [&](std::size_t i) {
    out[i] = measure_ratio(kernel, n, i_len, j_len, r_min + i);
  });
  return out;
}

DecayFit fit_decay(std::span<const DecayMeasurement> measurements) {
  if (measurements.size() < 4) throw FitError("decay fit needs at least 4 measurements");
  const auto& first = measurements.front();
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& m : measurements) {
    if (m.n != first.n || m.i_len != first.i_len || m.j_len != first.j_len ||
        m.params.beta != first.params.beta || m.params.gamma != first.params.gamma) {
      throw FitError("decay fit mixes measurements with different settings");
    }
    if (m.params.gamma == 0.0) {
      throw FitError("gamma = 0: spacings are independent, use the independence check");
    }
    if (!(m.sup_ratio > 0.0)) {
      throw FitError("sup_ratio <= 0 cannot enter the log fit (independent regime)");
    }
    xs.push_back(static_cast<double>(m.r));
    ys.push_back(std::log(m.sup_ratio));
  }
  const LineFit line = fit_line(xs, ys);
  DecayFit fit;
  fit.alpha_hat = -line.slope;
  fit.c_hat = std::exp(line.intercept);
  auto [lo, hi] = std::minmax_element(measurements.begin(), measurements.end(),
                                      [](const auto& a, const auto& b) { return a.r < b.r; });
  fit.r_min = lo->r;
  fit.r_max = hi->r;
  fit.r_squared = line.r_squared;
  return fit;
}

double delta_function(const TransferKernel& kernel, int r, const std::array<double, 8>& z) {
  auto t = [&](std::size_t i, std::size_t j) { return t_power_at(kernel, r, z[i], z[j]); };
  return t(0, 1) * t(2, 3) * t(4, 5) * t(6, 7) - t(0, 3) * t(2, 1) * t(4, 7) * t(6, 5);
}

double delta_lhs_integral(const TransferKernel& kernel, int r, std::size_t axis_nodes) {
  if (r < 0) throw std::invalid_argument("Delta^r needs r >= 0");
  const QuadratureGrid reduced = gauss_legendre(axis_nodes);
  const std::size_t k = reduced.size();
  std::vector<double> tp(k * k);
  std::vector<double> h(k);
  for (std::size_t i = 0; i < k; ++i) {
    h[i] = reduced.weights[i] * std::exp(-0.5 * kernel.params().beta / reduced.nodes[i]);
    for (std::size_t j = 0; j < k; ++j) {
      tp[i * k + j] = t_power_at(kernel, r, reduced.nodes[i], reduced.nodes[j]);
    }
  }
  // Quadruples (z1..z4): weight, straight pairing T(z1,z2)T(z3,z4) and
  // crossed pairing T(z1,z4)T(z3,z2). The 8-point integrand couples two
  // quadruples.
  const std::size_t quads = k * k * k * k;
  std::vector<double> weight(quads);
  std::vector<double> straight(quads);
  std::vector<double> crossed(quads);
  for (std::size_t q = 0; q < quads; ++q) {
    const std::size_t i1 = q / (k * k * k);
    const std::size_t i2 = (q / (k * k)) % k;
    const std::size_t i3 = (q / k) % k;
    const std::size_t i4 = q % k;
    weight[q] = h[i1] * h[i2] * h[i3] * h[i4];
    straight[q] = tp[i1 * k + i2] * tp[i3 * k + i4];
    crossed[q] = tp[i1 * k + i4] * tp[i3 * k + i2];
  }
  std::vector<double> partial(quads);
  parallel_for(quads, [&](std::size_t q) {
    if (weight[q] == 0.0) {
      partial[q] = 0.0;
      return;
    }
    double acc = 0.0;
    const double s = straight[q];
    const double c = crossed[q];
    for (std::size_t q2 = 0; q2 < quads; ++q2) {
      acc += weight[q2] * std::abs(s * straight[q2] - c * crossed[q2]);
    }
    partial[q] = weight[q] * acc;
  });
  long double total = 0.0L;
  for (double p : partial) total += p;
  return static_cast<double>(total);
}

double delta_rhs_shape(const TransferKernel& kernel, int r) {
  const int s = r / 2;
  const Eigen::MatrixXd scaled = kernel.scaled_power(s);
  const auto& grid = kernel.grid();
  long double inner = 0.0L;
  for (std::size_t a = 0; a < grid.size(); ++a) {
    const double fa = grid.weights[a] * std::exp(-kernel.params().beta / grid.nodes[a]);
    for (std::size_t b = 0; b < grid.size(); ++b) {
      const double fb = grid.weights[b] * std::exp(-kernel.params().beta / grid.nodes[b]);
      inner += fa * fb * scaled(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    }
  }
  const double base = static_cast<double>(inner) *
                      std::exp((s + 1) * kernel.log_leading_eigenvalue());
  return std::pow(base, 8.0);
}

DeltaContraction delta_contraction_check(const TransferKernel& kernel, int r,
                                         std::size_t axis_nodes) {
  if (r < 1 || r > kMaxDeltaOrder) {
    throw std::invalid_argument("Delta^r check supports 1 <= r <= " +
                                std::to_string(kMaxDeltaOrder));
  }
  DeltaContraction out;
  out.r = r;
  for (int s = r; s >= 1; s -= 2) {
    const double lhs = delta_lhs_integral(kernel, s, axis_nodes);
    const double rhs = delta_rhs_shape(kernel, s);
    if (s == r) {
      out.lhs = lhs;
      out.rhs_shape = rhs;
    }
    out.ratio_sequence.push_back(lhs / rhs);
  }
  for (std::size_t i = 0; i + 1 < out.ratio_sequence.size(); ++i) {
    if (!(out.ratio_sequence[i] < out.ratio_sequence[i + 1])) {
      out.ratio_sequence_decreasing = false;
    }
  }
  return out;
}

std::array<double, 2> delta_lhs_monte_carlo(const TransferKernel& kernel, int r,
                                            std::size_t points, std::uint64_t seed) {
  if (points < 2) throw std::invalid_argument("Monte Carlo needs at least 2 points");
  Rng rng(seed);
  const double beta = kernel.params().beta;
  long double sum = 0.0L;
  long double sum_sq = 0.0L;
  std::array<double, 8> z{};
  for (std::size_t i = 0; i < points; ++i) {
    double log_weight = 0.0;
    for (auto& zi : z) {
      zi = rng.uniform_open_closed();
      log_weight -= 0.5 * beta / zi;
    }
    const double value = std::exp(log_weight) * std::abs(delta_function(kernel, r, z));
    sum += value;
    sum_sq += static_cast<long double>(value) * value;
  }
  const double count = static_cast<double>(points);
  const double mean = static_cast<double>(sum / count);
  const double var = static_cast<double>(sum_sq / count) - mean * mean;
  return {mean, std::sqrt(std::max(var, 0.0) / count)};
}

}  // namespace cchain
