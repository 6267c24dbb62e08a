#include "cchain/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cchain/errors.hpp"
#include "cchain/parallel.hpp"
#include "cchain/stats.hpp"

namespace cchain {

namespace {

constexpr std::uint64_t kMaxRejections = 10'000'000;

void check_unit_interval(double v, const char* what) {
  if (!(v > 0.0 && v <= 1.0)) {
    throw std::domain_error(std::string(what) + " must lie in (0, 1]");
  }
}

double neighbour_log_factor(double gamma, double y_prev, double y_next, double y) {
  return -gamma / (y_prev + y) - gamma / (y + y_next);
}

}  // namespace

void SamplerConfig::validate() const {
  if (n < 3) throw std::invalid_argument("chain length n must be >= 3");
  if (thin_sweeps < 1) throw std::invalid_argument("thin_sweeps must be >= 1");
  if (proposal == Proposal::heat_bath_grid && heat_bath_resolution < kMinHeatBathResolution) {
    throw std::invalid_argument("heat_bath_resolution must be >= " +
                                std::to_string(kMinHeatBathResolution));
  }
  ModelParams check(params.beta, params.gamma);
  (void)check;
}

double full_conditional_log_density(const ModelParams& params, double y_prev, double y_next,
                                    double y) {
  if (y_prev <= 0.0 || y_next <= 0.0 || y <= 0.0) {
    throw std::domain_error("conditional density arguments must be positive");
  }
  return -params.beta / y + neighbour_log_factor(params.gamma, y_prev, y_next, y);
}

double metropolis_accept_probability(const ModelParams& params, double y_prev, double y_next,
                                     double current, double proposed) {
  const double diff = full_conditional_log_density(params, y_prev, y_next, proposed) -
                      full_conditional_log_density(params, y_prev, y_next, current);
  return diff >= 0.0 ? 1.0 : std::exp(diff);
}

std::vector<double> discretized_conditional_cdf(const ModelParams& params, double y_prev,
                                                double y_next, std::size_t resolution) {
  if (resolution < 2) throw std::invalid_argument("resolution must be >= 2");
  check_unit_interval(y_prev, "y_prev");
  check_unit_interval(y_next, "y_next");
  const double step = 1.0 / static_cast<double>(resolution);
  std::vector<double> f(resolution + 1, 0.0);
  // Shift by the value at t = 1, where the density is largest.
  const double log_top = full_conditional_log_density(params, y_prev, y_next, 1.0);
  for (std::size_t j = 1; j <= resolution; ++j) {
    const double t = static_cast<double>(j) * step;
    f[j] = std::exp(full_conditional_log_density(params, y_prev, y_next, t) - log_top);
  }
  std::vector<double> cdf(resolution + 1, 0.0);
  long double running = 0.0L;
  for (std::size_t j = 0; j < resolution; ++j) {
    running += 0.5L * (f[j] + f[j + 1]);
    cdf[j + 1] = static_cast<double>(running);
  }
  const double total = cdf.back();
  for (auto& c : cdf) c /= total;
  cdf.back() = 1.0;
  return cdf;
}

double inverse_cdf_sample(std::span<const double> cdf, double u) {
  if (cdf.size() < 2) throw std::invalid_argument("CDF table too small");
  if (!(u > 0.0 && u <= 1.0)) throw std::domain_error("u must lie in (0, 1]");
  const std::size_t cells = cdf.size() - 1;
  // First j with cdf[j + 1] >= u; cells of zero mass are never selected.
  const auto it = std::lower_bound(cdf.begin() + 1, cdf.end(), u);
  const auto j = static_cast<std::size_t>(it - cdf.begin()) - 1;
  const double lo = cdf[j];
  const double hi = cdf[j + 1];
  const double frac = hi > lo ? (u - lo) / (hi - lo) : 1.0;
  const double step = 1.0 / static_cast<double>(cells);
  const double y = (static_cast<double>(j) + frac) * step;
  return std::clamp(y, step * 1e-12, 1.0);
}

GibbsSampler::GibbsSampler(const SamplerConfig& config)
    : GibbsSampler(config, ChainState(std::vector<double>(std::max<std::size_t>(config.n, 3), 1.0))) {
  std::vector<double> initial(config_.n);
  for (auto& y : initial) y = draw_from_grid_proposal();
  state_ = ChainState(std::move(initial));
}

GibbsSampler::GibbsSampler(const SamplerConfig& config, ChainState initial)
    : config_(config), rng_(config.seed), state_(std::move(initial)) {
  config_.validate();
  if (state_.size() != config_.n) throw std::invalid_argument("initial state length differs from n");
  const std::size_t resolution = config_.proposal == Proposal::heat_bath_grid
                                     ? config_.heat_bath_resolution
                                     : kDefaultHeatBathResolution;
  step_ = 1.0 / static_cast<double>(resolution);
  site_weight_.assign(resolution + 1, 0.0);
  for (std::size_t j = 1; j <= resolution; ++j) {
    site_weight_[j] = std::exp(-config_.params.beta / (static_cast<double>(j) * step_));
  }
  cell_cumulative_.assign(resolution + 1, 0.0);
  for (std::size_t j = 0; j < resolution; ++j) {
    cell_cumulative_[j + 1] = cell_cumulative_[j] + site_weight_[j] + site_weight_[j + 1];
  }
}

double GibbsSampler::draw_from_grid_proposal() {
  const double target = rng_.uniform() * cell_cumulative_.back();
  const auto it = std::upper_bound(cell_cumulative_.begin() + 1, cell_cumulative_.end(), target);
  const auto j = std::min(static_cast<std::size_t>(it - cell_cumulative_.begin()) - 1,
                          cell_cumulative_.size() - 2);
  return (static_cast<double>(j) + rng_.uniform_open_closed()) * step_;
}

// Exact draw from the discretized conditional: propose a cell from the
// beta-only masses, accept against the neighbour factor, then place the point
// uniformly inside the cell.
double GibbsSampler::heat_bath_draw(double y_prev, double y_next) {
  const double gamma = config_.params.gamma;
  if (gamma == 0.0) return draw_from_grid_proposal();
  const double h_top = std::exp(neighbour_log_factor(gamma, y_prev, y_next, 1.0));
  for (std::uint64_t attempt = 0; attempt < kMaxRejections; ++attempt) {
    const double target = rng_.uniform() * cell_cumulative_.back();
    const auto it = std::upper_bound(cell_cumulative_.begin() + 1, cell_cumulative_.end(), target);
    const auto j = std::min(static_cast<std::size_t>(it - cell_cumulative_.begin()) - 1,
                            cell_cumulative_.size() - 2);
    const double t0 = static_cast<double>(j) * step_;
    const double t1 = t0 + step_;
    const double g0 = site_weight_[j];
    const double g1 = site_weight_[j + 1];
    const double h0 = std::exp(neighbour_log_factor(gamma, y_prev, y_next, t0));
    const double h1 = std::exp(neighbour_log_factor(gamma, y_prev, y_next, t1));
    const double accept = (g0 * h0 + g1 * h1) / ((g0 + g1) * h_top);
    if (rng_.uniform() < accept) return (static_cast<double>(j) + rng_.uniform_open_closed()) * step_;
  }
  throw SamplerError("heat-bath rejection loop did not terminate");
}

void GibbsSampler::metropolis_update(std::size_t i, double y_prev, double y_next) {
  const double current = state_[i];
  const double proposed = rng_.uniform_open_closed();
  ++proposals_;
  const double accept =
      metropolis_accept_probability(config_.params, y_prev, y_next, current, proposed);
  if (accept >= 1.0 || rng_.uniform() < accept) {
    state_.set(i, proposed);
    ++acceptances_;
  }
}

void GibbsSampler::sweep() {
  const std::size_t n = state_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double y_prev = state_[(i + n - 1) % n];
    const double y_next = state_[(i + 1) % n];
    if (config_.proposal == Proposal::heat_bath_grid) {
      state_.set(i, heat_bath_draw(y_prev, y_next));
      ++proposals_;
      ++acceptances_;
    } else {
      metropolis_update(i, y_prev, y_next);
    }
  }
}

void GibbsSampler::sweeps(std::size_t count) {
  for (std::size_t s = 0; s < count; ++s) sweep();
}

double GibbsSampler::acceptance_rate() const {
  return proposals_ == 0 ? 1.0 : static_cast<double>(acceptances_) / static_cast<double>(proposals_);
}

SamplerDiagnostics run_streaming(const SamplerConfig& config, std::size_t num_samples,
                                 const std::function<void(std::span<const double>)>& observer) {
  if (num_samples < 1) throw std::invalid_argument("num_samples must be >= 1");
  GibbsSampler sampler(config);
  sampler.sweeps(config.burn_in_sweeps);
  const std::uint64_t proposals_before = sampler.proposals();
  const std::uint64_t acceptances_before = sampler.acceptances();
  std::vector<double> totals;
  totals.reserve(num_samples);
  for (std::size_t s = 0; s < num_samples; ++s) {
    sampler.sweeps(config.thin_sweeps);
    const auto y = sampler.state().spacings();
    const double energy = circular_energy(config.params, y);
    if (!std::isfinite(energy)) throw SamplerError("non-finite energy in sampled state");
    double total = 0.0;
    for (double v : y) total += v;
    totals.push_back(total);
    observer(y);
  }
  SamplerDiagnostics diag;
  const auto proposals = sampler.proposals() - proposals_before;
  diag.acceptance_rate =
      proposals == 0 ? 1.0
                     : static_cast<double>(sampler.acceptances() - acceptances_before) /
                           static_cast<double>(proposals);
  diag.retained = num_samples;
  diag.integrated_autocorrelation_time = integrated_autocorrelation_time(totals);
  diag.effective_sample_count = effective_sample_size(totals);
  return diag;
}

SampleRun run(const SamplerConfig& config, std::size_t num_samples) {
  SampleRun out;
  out.samples.n = config.n;
  out.samples.values.reserve(num_samples * config.n);
  out.diagnostics = run_streaming(config, num_samples,
                                  [&](std::span<const double> y) { out.samples.append(y); });
  return out;
}

SampleSet independent_replicas(const SamplerConfig& config, std::size_t replicas) {
  config.validate();
  SampleSet out;
  out.n = config.n;
  out.values.assign(replicas * config.n, 0.0);
  parallel_for(replicas, [&](std::size_t r) {
    SamplerConfig local = config;
    local.seed = derive_seed(config.seed, r);
    GibbsSampler sampler(local);
    sampler.sweeps(config.burn_in_sweeps);
    const auto y = sampler.state().spacings();
    std::copy(y.begin(), y.end(), out.values.begin() + static_cast<std::ptrdiff_t>(r * config.n));
  });
  return out;
}

std::size_t calibrate_thinning(const SamplerConfig& config, std::size_t pilot_sweeps, double target) {
  SamplerConfig pilot = config;
  pilot.thin_sweeps = 1;
  std::vector<double> totals;
  totals.reserve(pilot_sweeps);
  run_streaming(pilot, pilot_sweeps, [&](std::span<const double> y) {
    double total = 0.0;
    for (double v : y) total += v;
    totals.push_back(total);
  });
  const std::size_t max_lag = std::min<std::size_t>(pilot_sweeps / 10, 1000);
  const std::vector<double> rho = autocorrelation(totals, max_lag);
  for (std::size_t lag = 1; lag < rho.size(); ++lag) {
    if (std::abs(rho[lag]) < target) return lag;
  }
  return std::max<std::size_t>(max_lag, 1);
}

}  // namespace cchain
