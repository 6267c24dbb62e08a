#include "cchain/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "cchain/errors.hpp"

namespace cchain {

namespace {

double integer_power(double base, std::size_t exponent) {
  return std::pow(base, static_cast<double>(exponent));
}

}  // namespace

TransferKernel::TransferKernel(const ModelParams& params, QuadratureGrid grid)
    : params_(params), grid_(std::move(grid)) {
  const std::size_t m = grid_.size();
  if (m == 0) throw std::invalid_argument("empty quadrature grid");
  sqrt_reduced_weights_.resize(static_cast<Eigen::Index>(m));
  reduced_.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t a = 0; a < m; ++a) {
    const double x = grid_.nodes[a];
    sqrt_reduced_weights_[static_cast<Eigen::Index>(a)] =
        std::sqrt(grid_.weights[a]) * std::exp(log_edge_factor(x));
    for (std::size_t b = 0; b < m; ++b) {
      reduced_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          std::exp(-params_.gamma / (x + grid_.nodes[b]));
    }
  }
  sym_ = sqrt_reduced_weights_.asDiagonal() * reduced_ * sqrt_reduced_weights_.asDiagonal();
  // Exact symmetry before the eigensolve.
  sym_ = 0.5 * (sym_ + sym_.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym_);
  if (solver.info() != Eigen::Success) {
    throw SpectralGapError("eigendecomposition of the transfer kernel failed");
  }
  const Eigen::VectorXd& raw_values = solver.eigenvalues();
  const Eigen::MatrixXd& raw_vectors = solver.eigenvectors();
  std::vector<Eigen::Index> order(m);
  std::iota(order.begin(), order.end(), 0);
  // Largest algebraic eigenvalue is the Perron root; the rest by magnitude.
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return raw_values[i] > raw_values[j];
  });
  std::stable_sort(order.begin() + 1, order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return std::abs(raw_values[i]) > std::abs(raw_values[j]);
  });
  eigenvalues_.resize(static_cast<Eigen::Index>(m));
  eigenvectors_.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t c = 0; c < m; ++c) {
    const auto src = order[c];
    eigenvalues_[static_cast<Eigen::Index>(c)] = raw_values[src];
    Eigen::VectorXd v = raw_vectors.col(src);
    // Sign convention: the entry of largest magnitude is positive.
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0.0) v = -v;
    eigenvectors_.col(static_cast<Eigen::Index>(c)) = v;
  }
  const double lambda1 = eigenvalues_[0];
  if (!(lambda1 > 0.0)) {
    throw SpectralGapError("leading eigenvalue of the transfer kernel is not positive");
  }
  log_lambda1_ = std::log(lambda1);
  ratios_ = eigenvalues_ / lambda1;
  modes_ = reduced_ * sqrt_reduced_weights_.asDiagonal() * eigenvectors_ / lambda1;
}

Eigen::MatrixXd TransferKernel::matrix() const {
  const auto m = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd k(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      const double xa = grid_.nodes[static_cast<std::size_t>(a)];
      const double xb = grid_.nodes[static_cast<std::size_t>(b)];
      k(a, b) = std::exp(log_edge_factor(xa) + log_edge_factor(xb)) * reduced_(a, b);
    }
  }
  return k;
}

Eigen::VectorXd TransferKernel::modes_at(double x) const {
  const auto m = static_cast<Eigen::Index>(size());
  Eigen::RowVectorXd row(m);
  for (Eigen::Index e = 0; e < m; ++e) {
    row[e] = std::exp(-params_.gamma / (x + grid_.nodes[static_cast<std::size_t>(e)])) *
             sqrt_reduced_weights_[e];
  }
  return (row * eigenvectors_).transpose() / eigenvalues_[0];
}

Eigen::MatrixXd TransferKernel::scaled_power(int s) const {
  if (s < 0) throw std::invalid_argument("scaled_power needs s >= 0");
  if (s == 0) return reduced_ / eigenvalues_[0];
  Eigen::VectorXd scale(ratios_.size());
  for (Eigen::Index c = 0; c < ratios_.size(); ++c) {
    scale[c] = integer_power(ratios_[c], static_cast<std::size_t>(s - 1));
  }
  return modes_ * scale.asDiagonal() * modes_.transpose();
}

double TransferKernel::scaled_power_at(int s, double x, double y) const {
  if (s < 0) throw std::invalid_argument("scaled_power_at needs s >= 0");
  if (s == 0) return std::exp(-params_.gamma / (x + y)) / eigenvalues_[0];
  const Eigen::VectorXd ex = modes_at(x);
  const Eigen::VectorXd ey = modes_at(y);
  double total = 0.0;
  for (Eigen::Index c = 0; c < ratios_.size(); ++c) {
    total += ex[c] * ey[c] * integer_power(ratios_[c], static_cast<std::size_t>(s - 1));
  }
  return total;
}

double t_power(const TransferKernel& kernel, int r, std::size_t a, std::size_t b) {
  if (r < -1) throw std::invalid_argument("t_power needs r >= -1");
  if (r == -1) return 1.0;
  const double xa = kernel.grid().nodes.at(a);
  const double xb = kernel.grid().nodes.at(b);
  if (r == 0) return q_eval(kernel.params(), xa, xb);
  double scaled = 0.0;
  const auto& modes = kernel.modes();
  const auto& rho = kernel.eigenvalue_ratios();
  for (Eigen::Index c = 0; c < rho.size(); ++c) {
    scaled += modes(static_cast<Eigen::Index>(a), c) * modes(static_cast<Eigen::Index>(b), c) *
              integer_power(rho[c], static_cast<std::size_t>(r - 1));
  }
  const double log_scale = kernel.log_edge_factor(xa) + kernel.log_edge_factor(xb) +
                           (r + 1) * kernel.log_leading_eigenvalue();
  return std::exp(log_scale) * scaled;
}

double t_power_at(const TransferKernel& kernel, int r, double x, double y) {
  if (r < -1) throw std::invalid_argument("t_power needs r >= -1");
  if (r == -1) return 1.0;
  if (!(x > 0.0 && x <= 1.0 && y > 0.0 && y <= 1.0)) {
    throw std::domain_error("t_power_at arguments must lie in (0, 1]");
  }
  if (r == 0) return q_eval(kernel.params(), x, y);
  const double log_scale = kernel.log_edge_factor(x) + kernel.log_edge_factor(y) +
                           (r + 1) * kernel.log_leading_eigenvalue();
  return std::exp(log_scale) * kernel.scaled_power_at(r, x, y);
}

double scaled_partition_sum(const TransferKernel& kernel, std::size_t n) {
  const auto& rho = kernel.eigenvalue_ratios();
  // Ratios are already ordered by decreasing magnitude.
  long double total = 0.0L;
  for (Eigen::Index c = 0; c < rho.size(); ++c) {
    total += static_cast<long double>(integer_power(rho[c], n));
  }
  return static_cast<double>(total);
}

double log_partition_function(const TransferKernel& kernel, std::size_t n) {
  if (n < 3) throw std::invalid_argument("partition function needs n >= 3");
  return static_cast<double>(n) * kernel.log_leading_eigenvalue() +
         std::log(scaled_partition_sum(kernel, n));
}

double partition_function(const TransferKernel& kernel, std::size_t n) {
  return std::exp(log_partition_function(kernel, n));
}

double ClusterDensity::at(std::span<const std::size_t> multi_index) const {
  if (multi_index.size() != dims()) throw std::invalid_argument("multi-index rank mismatch");
  std::size_t flat = 0;
  for (std::size_t idx : multi_index) {
    if (idx >= grid.size()) throw std::out_of_range("grid index out of range");
    flat = flat * grid.size() + idx;
  }
  return values[flat];
}

double ClusterDensity::integral() const {
  const std::size_t m = grid.size();
  const std::size_t p = dims();
  std::vector<std::size_t> idx(p, 0);
  long double total = 0.0L;
  for (std::size_t flat = 0; flat < values.size(); ++flat) {
    std::size_t rem = flat;
    double w = 1.0;
    for (std::size_t d = p; d-- > 0;) {
      w *= grid.weights[rem % m];
      rem /= m;
    }
    total += static_cast<long double>(w * values[flat]);
  }
  return static_cast<double>(total);
}

namespace {

void check_cluster_dims(const IndexCluster& cluster) {
  if (cluster.length > kMaxClusterDims) {
    throw std::invalid_argument("cluster densities are limited to " +
                                std::to_string(kMaxClusterDims) + " sites");
  }
}

// Fills values[a_1..a_p] = prod R(a_i, a_{i+1}) * prod exp(-beta/x_{a_i})
// * closing(a_p, a_1) * scale.
std::vector<double> chain_tensor(const TransferKernel& kernel, std::size_t p,
                                 const Eigen::MatrixXd& closing, double scale) {
  const std::size_t m = kernel.size();
  const auto& nodes = kernel.grid().nodes;
  const auto& reduced = kernel.reduced_kernel();
  std::vector<double> site_factor(m);
  for (std::size_t a = 0; a < m; ++a) site_factor[a] = std::exp(-kernel.params().beta / nodes[a]);

  std::size_t total = 1;
  for (std::size_t d = 0; d < p; ++d) total *= m;
  std::vector<double> values(total);
  std::vector<std::size_t> idx(p);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (std::size_t d = p; d-- > 0;) {
      idx[d] = rem % m;
      rem /= m;
    }
    double v = scale;
    for (std::size_t d = 0; d < p; ++d) {
      v *= site_factor[idx[d]];
      if (d + 1 < p) {
        v *= reduced(static_cast<Eigen::Index>(idx[d]), static_cast<Eigen::Index>(idx[d + 1]));
      }
    }
    v *= closing(static_cast<Eigen::Index>(idx[p - 1]), static_cast<Eigen::Index>(idx[0]));
    values[flat] = v;
  }
  return values;
}

}  // namespace

ClusterDensity marginal_density(const TransferKernel& kernel, std::size_t n,
                                const IndexCluster& cluster) {
  check_cluster_dims(cluster);
  if (cluster.ring != n) throw std::invalid_argument("cluster ring differs from chain length");
  const std::size_t p = cluster.length;
  if (n < p + 2) throw std::invalid_argument("marginal density needs n >= |I| + 2");
  const Eigen::MatrixXd closing = kernel.scaled_power(static_cast<int>(n - p));
  const double scale = std::exp((1.0 - static_cast<double>(p)) * kernel.log_leading_eigenvalue()) /
                       scaled_partition_sum(kernel, n);
  return ClusterDensity{cluster, kernel.grid(), chain_tensor(kernel, p, closing, scale)};
}

ClusterDensity conditional_density(const TransferKernel& kernel, std::size_t n,
                                   const IndexCluster& i_cluster, const IndexCluster& j_cluster,
                                   std::span<const std::size_t> y_j) {
  check_cluster_dims(i_cluster);
  check_cluster_dims(j_cluster);
  if (i_cluster.ring != n || j_cluster.ring != n) {
    throw std::invalid_argument("cluster ring differs from chain length");
  }
  cluster_distance(i_cluster, j_cluster);  // throws on overlap
  if (y_j.size() != j_cluster.length) {
    throw std::invalid_argument("conditioning values must have one grid index per J site");
  }
  const std::size_t m = kernel.size();
  for (std::size_t idx : y_j) {
    if (idx >= m) throw std::out_of_range("conditioning grid index out of range");
  }
  const std::size_t p1 = i_cluster.length;
  const std::size_t p2 = j_cluster.length;
  const std::size_t gap_ij = forward_gap(i_cluster, j_cluster);
  const std::size_t gap_ji = n - p1 - p2 - gap_ij;
  const auto j_first = static_cast<Eigen::Index>(y_j.front());
  const auto j_last = static_cast<Eigen::Index>(y_j.back());

  const Eigen::MatrixXd to_j = kernel.scaled_power(static_cast<int>(gap_ij));
  const Eigen::MatrixXd from_j = kernel.scaled_power(static_cast<int>(gap_ji));
  const double denominator =
      kernel.scaled_power(static_cast<int>(n - p2))(j_last, j_first);

  // closing(a_p, a_1) = T(a_p -> J first) T(J last -> a_1) / T(J last -> J first)
  Eigen::MatrixXd closing(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (Eigen::Index last = 0; last < closing.rows(); ++last) {
    for (Eigen::Index first = 0; first < closing.cols(); ++first) {
      closing(last, first) = to_j(last, j_first) * from_j(j_last, first) / denominator;
    }
  }
  const double scale = std::exp((1.0 - static_cast<double>(p1)) * kernel.log_leading_eigenvalue());
  return ClusterDensity{i_cluster, kernel.grid(), chain_tensor(kernel, p1, closing, scale)};
}

ExactMoments::ExactMoments(const TransferKernel& kernel, std::size_t n) : n_(n) {
  if (n < 3) throw std::invalid_argument("exact moments need n >= 3");
  const auto& v = kernel.eigenvectors();
  Eigen::VectorXd x(static_cast<Eigen::Index>(kernel.size()));
  for (std::size_t a = 0; a < kernel.size(); ++a) x[static_cast<Eigen::Index>(a)] = kernel.grid().nodes[a];
  const Eigen::MatrixXd projected = v.transpose() * x.asDiagonal() * v;
  projected_sq_ = projected.cwiseProduct(projected);
  ratios_ = kernel.eigenvalue_ratios();

  zhat_ = scaled_partition_sum(kernel, n);
  mu1_ = projected(0, 0);
  long double delta = 0.0L;
  long double eps = 0.0L;
  for (Eigen::Index c = 1; c < ratios_.size(); ++c) {
    const double weight = integer_power(ratios_[c], n);
    delta += weight;
    eps += static_cast<long double>(weight * projected(c, c));
  }
  delta_ = static_cast<double>(delta);
  eps_ = static_cast<double>(eps);
  mean_ = (mu1_ + eps_) / zhat_;
}

double ExactMoments::cov(std::size_t r) const {
  if (r > n_) throw std::invalid_argument("lag exceeds chain length");
  const std::size_t lag = std::min(r, n_ - r);
  const std::size_t rest = n_ - lag;
  const Eigen::Index m = ratios_.size();
  std::vector<double> lag_pow(static_cast<std::size_t>(m));
  std::vector<double> rest_pow(static_cast<std::size_t>(m));
  for (Eigen::Index c = 0; c < m; ++c) {
    lag_pow[static_cast<std::size_t>(c)] = integer_power(ratios_[c], lag);
    rest_pow[static_cast<std::size_t>(c)] = integer_power(ratios_[c], rest);
  }
  long double off = 0.0L;
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      if (a == 0 && b == 0) continue;
      const double weight = lag_pow[static_cast<std::size_t>(a)] * rest_pow[static_cast<std::size_t>(b)];
      if (weight == 0.0) continue;
      off += static_cast<long double>(weight * projected_sq_(a, b));
    }
  }
  // The (1,1) term minus mean^2, expanded so that the leading parts cancel
  // analytically.
  const double leading =
      (mu1_ * mu1_ * delta_ - 2.0 * mu1_ * eps_ - eps_ * eps_) / (zhat_ * zhat_);
  return static_cast<double>(off) / zhat_ + leading;
}

ExactMoments exact_moments(const TransferKernel& kernel, std::size_t n) {
  return ExactMoments(kernel, n);
}

double sigma_n_squared(const ExactMoments& moments) {
  long double total = 0.0L;
  for (std::size_t r = 0; r < moments.n(); ++r) total += moments.cov(r);
  const double value = static_cast<double>(total);
  if (!(value > 0.0)) {
    throw NonPositiveVarianceError("sigma_N^2 is not positive (" + std::to_string(value) +
                                   "); the quadrature grid is too coarse");
  }
  return value;
}

double sigma_n_squared(const TransferKernel& kernel, std::size_t n) {
  return sigma_n_squared(ExactMoments(kernel, n));
}

void require_spectral_gap(const TransferKernel& kernel) {
  const auto& rho = kernel.eigenvalue_ratios();
  if (rho.size() < 2) return;
  if (1.0 - std::abs(rho[1]) < 1e-13) {
    throw SpectralGapError("spectral gap of the transfer kernel is degenerate");
  }
}

double spectral_decay_rate(const TransferKernel& kernel) {
  require_spectral_gap(kernel);
  const auto& rho = kernel.eigenvalue_ratios();
  if (rho.size() < 2) return std::numeric_limits<double>::infinity();
  const double second = std::abs(rho[1]);
  if (second < 1e-10) return std::numeric_limits<double>::infinity();
  return -std::log(second);
}

MarginalCdf::MarginalCdf(const TransferKernel& kernel, std::size_t n, std::size_t cells)
    : step_(1.0 / static_cast<double>(cells)) {
  if (n < 3) throw std::invalid_argument("marginal CDF needs n >= 3");
  if (cells < 2) throw std::invalid_argument("marginal CDF needs at least 2 cells");
  const double zhat = scaled_partition_sum(kernel, n);
  const int power = static_cast<int>(n - 1);
  const auto& rho = kernel.eigenvalue_ratios();
  std::vector<double> rho_pow(static_cast<std::size_t>(rho.size()));
  for (Eigen::Index c = 0; c < rho.size(); ++c) {
    rho_pow[static_cast<std::size_t>(c)] = integer_power(rho[c], static_cast<std::size_t>(power - 1));
  }
  auto density = [&](double y) {
    if (y <= 0.0) return 0.0;
    const Eigen::VectorXd e = kernel.modes_at(y);
    double diag = 0.0;
    for (Eigen::Index c = 0; c < e.size(); ++c) diag += e[c] * e[c] * rho_pow[static_cast<std::size_t>(c)];
    return std::exp(-kernel.params().beta / y) * diag / zhat;
  };
  const QuadratureGrid unit = gauss_legendre(8);
  cdf_.assign(cells + 1, 0.0);
  pdf_.assign(cells + 1, 0.0);
  long double running = 0.0L;
  for (std::size_t k = 0; k <= cells; ++k) {
    const double hi = static_cast<double>(k) * step_;
    pdf_[k] = density(hi);
    if (k == 0) continue;
    const double lo = hi - step_;
    long double cell = 0.0L;
    for (std::size_t q = 0; q < unit.size(); ++q) {
      cell += unit.weights[q] * density(lo + step_ * unit.nodes[q]);
    }
    running += cell * step_;
    cdf_[k] = static_cast<double>(running);
  }
  const double total = cdf_.back();
  for (auto& c : cdf_) c /= total;
  for (auto& p : pdf_) p /= total;
}

double MarginalCdf::operator()(double y) const {
  if (y <= 0.0) return 0.0;
  if (y >= 1.0) return 1.0;
  const double pos = y / step_;
  const auto k = std::min(static_cast<std::size_t>(pos), cdf_.size() - 2);
  const double t = pos - static_cast<double>(k);
  const double t2 = t * t;
  const double t3 = t2 * t;
  // Cubic Hermite with CDF values and densities at the cell ends.
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  const double value = h00 * cdf_[k] + h10 * step_ * pdf_[k] + h01 * cdf_[k + 1] +
                       h11 * step_ * pdf_[k + 1];
  return std::clamp(value, 0.0, 1.0);
}

double MarginalCdf::density(double y) const {
  if (y <= 0.0 || y > 1.0) return 0.0;
  const double pos = y / step_;
  const auto k = std::min(static_cast<std::size_t>(pos), pdf_.size() - 2);
  const double t = pos - static_cast<double>(k);
  return (1.0 - t) * pdf_[k] + t * pdf_[k + 1];
}

}  // namespace cchain
