#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "cchain/model.hpp"
#include "cchain/sampler.hpp"
#include "cchain/stats.hpp"
#include "cchain/transfer.hpp"

namespace cchain {

inline constexpr double kDefaultEpsilon = 0.1;
inline constexpr std::size_t kMinKsSamples = 1000;
inline constexpr std::size_t kMinProfileSamples = 10000;
inline constexpr std::size_t kMinReplicasPerN = 10000;
inline constexpr std::size_t kBootstrapRounds = 200;

// Alternating blocks V_1, W_1, V_2, W_2, ... of sizes p and q starting at
// index kFirstSite, plus the leftover indices when k (p + q) < n.
struct BlockPartition {
  std::size_t n = 0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  std::size_t p = 0;
  std::size_t q = 0;
  std::size_t k = 0;
  std::vector<IndexCluster> v_blocks;
  std::vector<IndexCluster> w_blocks;
  // Empty when n == k (p + q).
  std::vector<std::size_t> remainder;
};

// p = floor(n^(1 - 2 epsilon)), q = floor(n^epsilon), k = floor(n / (p + q)).
// Throws std::invalid_argument unless 0 < epsilon < 1/4, p > q >= 1 and k >= 2.
BlockPartition build_partition(std::size_t n, double epsilon);

// sum_i (y_i - mean) / sqrt(n sigma_n_sq).
double zeta_from_sample(std::span<const double> state, double mean, double sigma_n_sq);
double zeta_from_sample(const ChainState& state, double mean, double sigma_n_sq);

// sup_z |F_empirical(z) - Phi(z)| over the order statistics. Needs at least
// kMinKsSamples values.
double ks_distance(std::span<const double> zeta_samples);

// For each t: |mean(exp(i t zeta)) - exp(-t^2/2)| / |t|. Needs at least
// kMinProfileSamples values and no t equal to 0.
std::vector<std::pair<double, double>> petrov_integrand_profile(std::span<const double> zeta_samples,
                                                                std::span<const double> t_grid);

// Cutoff T = n^(1/4 - epsilon) bounding the profile's t-grid.
double petrov_cutoff(std::size_t n, double epsilon);

struct CltReport {
  ModelParams params;
  std::size_t n = 0;
  double mean = 0.0;
  double sigma_n_sq = 0.0;
  std::size_t num_replicas = 0;
  std::uint64_t seed = 0;
  double ks_distance = 0.0;
  SampleMoments zeta_samples_digest;
  double epsilon = kDefaultEpsilon;
  std::size_t p = 0;
  std::size_t q = 0;
  std::size_t k = 0;
  std::size_t remainder = 0;
};

struct RateSweepOptions {
  double epsilon = kDefaultEpsilon;
  std::size_t grid_size = kDefaultGridSize;
  std::size_t burn_in_sweeps = kDefaultBurnInSweeps;
  std::size_t heat_bath_resolution = kDefaultHeatBathResolution;
  std::size_t bootstrap_rounds = kBootstrapRounds;
  // Called once per n with the replica end states, before they are dropped.
  std::function<void(const CltReport&, const SampleSet&, const TransferKernel&)> observer;
};

struct RateSweep {
  std::vector<CltReport> reports;
  std::vector<std::vector<double>> zeta_samples;
  double fitted_rate = 0.0;
  double rate_ci_low = 0.0;
  double rate_ci_high = 0.0;
};

// Same computation without the sweep-size preconditions: any nonempty,
// strictly increasing n_values and replicas_per_n >= kMinKsSamples. The rate
// fit needs two or more values of n; with one it is left at zero.
RateSweep clt_sweep(const ModelParams& params, std::span<const std::size_t> n_values,
                    std::size_t replicas_per_n, std::uint64_t seed,
                    const RateSweepOptions& options = {});

// For each n: exact mean and sigma_N^2, independent chains for the replicas,
// zeta and the KS distance; then the least-squares slope of log KS against
// log n with a bootstrap interval. n_values must be strictly increasing with
// at least 4 entries and replicas_per_n >= kMinReplicasPerN.
RateSweep rate_sweep(const ModelParams& params, std::span<const std::size_t> n_values,
                     std::size_t replicas_per_n, std::uint64_t seed,
                     const RateSweepOptions& options = {});

// Slope of log(ks) against log(n).
double fit_rate(std::span<const std::size_t> n_values, std::span<const double> ks);

struct LemmaDiagnostics {
  double c3_ratio = 0.0;
  double block_dependence_gap = 0.0;
  double normalization_drift = 0.0;
  double third_moment_ratio = 0.0;
  double variance_lower_ratio = 0.0;
};

inline constexpr std::array<double, 5> kLemmaTGrid = {0.25, 0.5, 1.0, 2.0, 4.0};

// Empirical block-level quantities from replica end states. Window moments
// (Var(xi), E|xi|^3, E(sum_{i<=p} X_i)^2) pool all n circular windows of p
// consecutive sites in every replica; stationarity makes each window a copy
// of xi_1.
LemmaDiagnostics lemma_diagnostics(const ModelParams& params, std::size_t n, double epsilon,
                                   const SampleSet& samples, const TransferKernel& kernel);

}  // namespace cchain
