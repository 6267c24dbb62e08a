#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "cchain/model.hpp"
#include "cchain/quadrature.hpp"

namespace cchain {

// Nystrom discretization of the two-point kernel Q on a quadrature grid.
//
// The kernel factorizes as Q(x, y) = g(x) g(y) R(x, y) with
// g(t) = exp(-beta/(2t)) and R(x, y) = exp(-gamma/(x + y)). All spectral
// work is done on the reduced kernel R with weights w_a g(x_a)^2, which gives
// the same symmetrized matrix
//
//   S[a][b] = sqrt(w_a) Q(x_a, x_b) sqrt(w_b)
//
// but never divides by the vanishing factor g near t = 0. Powers are returned
// in a scaled form T^r(x, y) = g(x) g(y) lambda_1^(r+1) Tscaled^r(x, y) so
// that long chains do not underflow.
class TransferKernel {
 public:
  TransferKernel(const ModelParams& params, QuadratureGrid grid);

  const ModelParams& params() const { return params_; }
  const QuadratureGrid& grid() const { return grid_; }
  std::size_t size() const { return grid_.size(); }

  // K[a][b] = Q(x_a, x_b); entries underflow to zero near the origin.
  Eigen::MatrixXd matrix() const;
  const Eigen::MatrixXd& symmetrized() const { return sym_; }

  // Leading eigenvalue first, then the rest by decreasing magnitude.
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  const Eigen::MatrixXd& eigenvectors() const { return eigenvectors_; }
  double leading_eigenvalue() const { return eigenvalues_[0]; }
  double log_leading_eigenvalue() const { return log_lambda1_; }
  // eigenvalues / lambda_1.
  const Eigen::VectorXd& eigenvalue_ratios() const { return ratios_; }

  // Reduced kernel R(x_a, x_b) = exp(-gamma/(x_a + x_b)).
  const Eigen::MatrixXd& reduced_kernel() const { return reduced_; }

  // Nystrom extension of the eigenvectors, scaled by 1/lambda_1: column c
  // holds e_c(x_a) such that Tscaled^s(a, b) = sum_c e_c(a) e_c(b) rho_c^(s-1)
  // for s >= 1.
  const Eigen::MatrixXd& modes() const { return modes_; }
  // Same extension at an arbitrary point x in (0, 1].
  Eigen::VectorXd modes_at(double x) const;

  // Tscaled^s on the grid (m x m). s >= 0.
  Eigen::MatrixXd scaled_power(int s) const;
  // Tscaled^s at arbitrary points.
  double scaled_power_at(int s, double x, double y) const;

  // log g(x) = -beta/(2x).
  double log_edge_factor(double x) const { return -0.5 * params_.beta / x; }

 private:
  ModelParams params_;
  QuadratureGrid grid_;
  Eigen::VectorXd sqrt_reduced_weights_;
  Eigen::MatrixXd reduced_;
  Eigen::MatrixXd sym_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
  Eigen::VectorXd ratios_;
  Eigen::MatrixXd modes_;
  double log_lambda1_ = 0.0;
};

// T^r(x_a, x_b): r intermediate integrations. r = 0 gives Q itself and
// r = -1 is the unit element (returns 1). Throws std::invalid_argument for
// r < -1.
double t_power(const TransferKernel& kernel, int r, std::size_t a, std::size_t b);
// T^r at arbitrary points in (0, 1] via the Nystrom extension.
double t_power_at(const TransferKernel& kernel, int r, double x, double y);

// sum_c (lambda_c / lambda_1)^n, accumulated in extended precision.
double scaled_partition_sum(const TransferKernel& kernel, std::size_t n);
double log_partition_function(const TransferKernel& kernel, std::size_t n);
// Z_N = trace(S^n). May underflow to zero for long chains; prefer the log.
double partition_function(const TransferKernel& kernel, std::size_t n);

// Joint density of a cluster, tabulated on the grid tensor product.
// values are row-major with the first cluster index varying slowest.
struct ClusterDensity {
  IndexCluster cluster;
  QuadratureGrid grid;
  std::vector<double> values;

  std::size_t dims() const { return cluster.length; }
  double at(std::span<const std::size_t> multi_index) const;
  // Quadrature integral over all coordinates.
  double integral() const;
};

inline constexpr std::size_t kMaxClusterDims = 4;

ClusterDensity marginal_density(const TransferKernel& kernel, std::size_t n,
                                const IndexCluster& cluster);

// Density of Y_I given Y_J = grid point `y_j` (one grid index per J site).
ClusterDensity conditional_density(const TransferKernel& kernel, std::size_t n,
                                   const IndexCluster& i_cluster, const IndexCluster& j_cluster,
                                   std::span<const std::size_t> y_j);

// Exact finite-n moments of the stationary spacing sequence.
class ExactMoments {
 public:
  ExactMoments(const TransferKernel& kernel, std::size_t n);

  std::size_t n() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return cov(0); }
  // E(Y_1 Y_{1+r}) - E(Y_1)^2 for 0 <= r <= n; cov(r) == cov(n - r) exactly.
  double cov(std::size_t r) const;
  // E(Y_1 Y_{1+r}).
  double second_moment(std::size_t r) const { return cov(r) + mean_ * mean_; }

 private:
  std::size_t n_;
  Eigen::VectorXd ratios_;
  Eigen::MatrixXd projected_sq_;  // (V^T X V)_ab^2
  double zhat_ = 1.0;
  double mu1_ = 0.0;
  double delta_ = 0.0;
  double eps_ = 0.0;
  double mean_ = 0.0;
};

ExactMoments exact_moments(const TransferKernel& kernel, std::size_t n);

// (1/n) Var(sum_i Y_i) = sum_{r=0}^{n-1} cov(r). Throws
// NonPositiveVarianceError when the result is not strictly positive.
double sigma_n_squared(const TransferKernel& kernel, std::size_t n);
double sigma_n_squared(const ExactMoments& moments);

// log(lambda_1 / |lambda_2|). Returns +infinity when |lambda_2| / lambda_1 is
// below 1e-10 (separable kernel); throws SpectralGapError when the relative
// gap is below 1e-13.
double spectral_decay_rate(const TransferKernel& kernel);

// Throws SpectralGapError unless lambda_1 > 0 is separated from the rest of
// the spectrum.
void require_spectral_gap(const TransferKernel& kernel);

// CDF of the single-site marginal for a chain of length n, tabulated once
// and evaluated by cubic Hermite interpolation.
class MarginalCdf {
 public:
  MarginalCdf(const TransferKernel& kernel, std::size_t n, std::size_t cells = 1024);

  double operator()(double y) const;
  // Density, linearly interpolated between tabulation points.
  double density(double y) const;

 private:
  std::vector<double> cdf_;
  std::vector<double> pdf_;
  double step_;
};

}  // namespace cchain
