#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cchain/model.hpp"
#include "cchain/rng.hpp"

namespace cchain {

enum class Proposal { heat_bath_grid, metropolis_uniform };

inline constexpr std::size_t kDefaultHeatBathResolution = 4096;
inline constexpr std::size_t kMinHeatBathResolution = 256;
inline constexpr std::size_t kDefaultBurnInSweeps = 100;

struct SamplerConfig {
  ModelParams params;
  std::size_t n = 32;
  std::uint64_t seed = 0;
  std::size_t burn_in_sweeps = kDefaultBurnInSweeps;
  std::size_t thin_sweeps = 1;
  Proposal proposal = Proposal::heat_bath_grid;
  std::size_t heat_bath_resolution = kDefaultHeatBathResolution;

  // Throws std::invalid_argument on n < 3, thin_sweeps < 1 or a heat-bath
  // resolution below kMinHeatBathResolution.
  void validate() const;
};

struct SamplerDiagnostics {
  double acceptance_rate = 1.0;
  // Of the per-sample observable sum_i Y_i.
  double integrated_autocorrelation_time = 0.5;
  double effective_sample_count = 0.0;
  std::size_t retained = 0;
};

// Row-major block of chain states, one row of n spacings per sample.
struct SampleSet {
  std::size_t n = 0;
  std::vector<double> values;

  std::size_t count() const { return n == 0 ? 0 : values.size() / n; }
  std::span<const double> row(std::size_t i) const { return {values.data() + i * n, n}; }
  void append(std::span<const double> state) { values.insert(values.end(), state.begin(), state.end()); }
};

// log f(y | neighbours) = -beta/y - gamma/(y_prev + y) - gamma/(y + y_next), up
// to a constant. Throws std::domain_error on nonpositive arguments.
double full_conditional_log_density(const ModelParams& params, double y_prev, double y_next,
                                    double y);

// min(1, f(proposed) / f(current)) for the single-site conditional.
double metropolis_accept_probability(const ModelParams& params, double y_prev, double y_next,
                                     double current, double proposed);

// CDF of the discretized conditional on the grid t_j = j / resolution:
// trapezoid cell masses of the conditional density, normalized. Size
// resolution + 1, first entry 0, last entry 1.
std::vector<double> discretized_conditional_cdf(const ModelParams& params, double y_prev,
                                                double y_next, std::size_t resolution);

// Inverse of the piecewise-linear CDF returned above, for u in (0, 1].
double inverse_cdf_sample(std::span<const double> cdf, double u);

// Systematic-scan single-site sampler for one chain.
class GibbsSampler {
 public:
  explicit GibbsSampler(const SamplerConfig& config);
  GibbsSampler(const SamplerConfig& config, ChainState initial);

  const SamplerConfig& config() const { return config_; }
  const ChainState& state() const { return state_; }

  // One update of every site in index order.
  void sweep();
  void sweeps(std::size_t count);

  std::uint64_t proposals() const { return proposals_; }
  std::uint64_t acceptances() const { return acceptances_; }
  double acceptance_rate() const;

 private:
  double draw_from_grid_proposal();
  double heat_bath_draw(double y_prev, double y_next);
  void metropolis_update(std::size_t i, double y_prev, double y_next);

  SamplerConfig config_;
  Rng rng_;
  ChainState state_;
  double step_ = 0.0;
  std::vector<double> site_weight_;   // exp(-beta / t_j)
  std::vector<double> cell_cumulative_;  // cumulative proposal cell masses
  std::uint64_t proposals_ = 0;
  std::uint64_t acceptances_ = 0;
};

// Burn-in, then num_samples states spaced thin_sweeps apart. Identical
// configs give bit-identical output. Throws SamplerError on a non-finite
// energy.
struct SampleRun {
  SampleSet samples;
  SamplerDiagnostics diagnostics;
};
SampleRun run(const SamplerConfig& config, std::size_t num_samples);

// As run(), but hands each retained state to `observer` instead of storing it.
SamplerDiagnostics run_streaming(const SamplerConfig& config, std::size_t num_samples,
                                 const std::function<void(std::span<const double>)>& observer);

// Final state of `replicas` independent chains, each seeded with
// derive_seed(config.seed, replica) and run for burn_in_sweeps sweeps.
// Runs concurrently; the result does not depend on the worker count.
SampleSet independent_replicas(const SamplerConfig& config, std::size_t replicas);

// Smallest thinning interval at which the autocorrelation of sum_i Y_i drops
// below `target`, estimated from a pilot run of pilot_sweeps sweeps.
std::size_t calibrate_thinning(const SamplerConfig& config, std::size_t pilot_sweeps = 20000,
                               double target = 0.1);

}  // namespace cchain
