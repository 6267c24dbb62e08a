#include "cchain/clt.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "cchain/parallel.hpp"
#include "cchain/rng.hpp"

namespace cchain {

BlockPartition build_partition(std::size_t n, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.25)) {
    throw std::invalid_argument("epsilon must lie in (0, 1/4)");
  }
  BlockPartition part;
  part.n = n;
  part.delta1 = 1.0 - 2.0 * epsilon;
  part.delta2 = epsilon;
  const double nd = static_cast<double>(n);
  part.p = static_cast<std::size_t>(std::floor(std::pow(nd, part.delta1)));
  part.q = static_cast<std::size_t>(std::floor(std::pow(nd, part.delta2)));
  if (part.q < 1 || part.p <= part.q) {
    throw std::invalid_argument("block sizes p = " + std::to_string(part.p) + ", q = " +
                                std::to_string(part.q) + " need p > q >= 1; epsilon too large for n");
  }
  part.k = n / (part.p + part.q);
  if (part.k < 2) {
    throw std::invalid_argument("n = " + std::to_string(n) + " gives fewer than 2 blocks");
  }
  for (std::size_t l = 0; l < part.k; ++l) {
    const std::size_t start = kFirstSite + l * (part.p + part.q);
    part.v_blocks.emplace_back(start, part.p, n);
    part.w_blocks.emplace_back(start + part.p, part.q, n);
  }
  for (std::size_t i = part.k * (part.p + part.q); i < n; ++i) part.remainder.push_back(i);
  return part;
}

double zeta_from_sample(std::span<const double> state, double mean, double sigma_n_sq) {
  if (!(sigma_n_sq > 0.0)) throw std::invalid_argument("sigma_n_sq must be positive");
  long double total = 0.0L;
  for (double y : state) total += y - mean;
  return static_cast<double>(total) / std::sqrt(static_cast<double>(state.size()) * sigma_n_sq);
}

double zeta_from_sample(const ChainState& state, double mean, double sigma_n_sq) {
  return zeta_from_sample(state.spacings(), mean, sigma_n_sq);
}

double ks_distance(std::span<const double> zeta_samples) {
  if (zeta_samples.size() < kMinKsSamples) {
    throw std::invalid_argument("ks_distance needs at least " + std::to_string(kMinKsSamples) +
                                " samples");
  }
  std::vector<double> sorted(zeta_samples.begin(), zeta_samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double m = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double phi = normal_cdf(sorted[i]);
    const double above = static_cast<double>(i + 1) / m - phi;
    const double below = phi - static_cast<double>(i) / m;
    d = std::max({d, above, below});
  }
  return std::clamp(d, 0.0, 1.0);
}

std::vector<std::pair<double, double>> petrov_integrand_profile(std::span<const double> zeta_samples,
                                                                std::span<const double> t_grid) {
  if (zeta_samples.size() < kMinProfileSamples) {
    throw std::invalid_argument("profile needs at least " + std::to_string(kMinProfileSamples) +
                                " samples");
  }
  std::vector<std::pair<double, double>> out;
  out.reserve(t_grid.size());
  const double m = static_cast<double>(zeta_samples.size());
  for (double t : t_grid) {
    if (t == 0.0) throw std::invalid_argument("t-grid must exclude 0");
    long double re = 0.0L;
    long double im = 0.0L;
    for (double z : zeta_samples) {
      re += std::cos(t * z);
      im += std::sin(t * z);
    }
    const std::complex<double> cf(static_cast<double>(re / m), static_cast<double>(im / m));
    const double gap = std::abs(cf - std::exp(-0.5 * t * t)) / std::abs(t);
    out.emplace_back(t, gap);
  }
  return out;
}

double petrov_cutoff(std::size_t n, double epsilon) {
  return std::pow(static_cast<double>(n), 0.25 - epsilon);
}

double fit_rate(std::span<const std::size_t> n_values, std::span<const double> ks) {
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    x.push_back(std::log(static_cast<double>(n_values[i])));
    y.push_back(std::log(ks[i]));
  }
  return fit_line(x, y).slope;
}

RateSweep rate_sweep(const ModelParams& params, std::span<const std::size_t> n_values,
                     std::size_t replicas_per_n, std::uint64_t seed,
                     const RateSweepOptions& options) {
  if (n_values.size() < 4) throw std::invalid_argument("rate_sweep needs at least 4 values of n");
  if (replicas_per_n < kMinReplicasPerN) {
    throw std::invalid_argument("rate_sweep needs at least " + std::to_string(kMinReplicasPerN) +
                                " replicas per n");
  }
  return clt_sweep(params, n_values, replicas_per_n, seed, options);
}

RateSweep clt_sweep(const ModelParams& params, std::span<const std::size_t> n_values,
                    std::size_t replicas_per_n, std::uint64_t seed,
                    const RateSweepOptions& options) {
  if (n_values.empty()) throw std::invalid_argument("no values of n given");
  for (std::size_t i = 1; i < n_values.size(); ++i) {
    if (n_values[i] <= n_values[i - 1]) {
      throw std::invalid_argument("n values must be strictly increasing");
    }
  }
  if (replicas_per_n < kMinKsSamples) {
    throw std::invalid_argument("need at least " + std::to_string(kMinKsSamples) +
                                " replicas per n");
  }
  const TransferKernel kernel(params, build_grid(options.grid_size));
  require_spectral_gap(kernel);

  RateSweep sweep;
  std::vector<double> ks_values;
  for (std::size_t n : n_values) {
    const ExactMoments moments(kernel, n);
    CltReport report;
    report.params = params;
    report.n = n;
    report.mean = moments.mean();
    report.sigma_n_sq = sigma_n_squared(moments);
    report.num_replicas = replicas_per_n;
    report.seed = derive_seed(seed, n);
    report.epsilon = options.epsilon;
    const BlockPartition part = build_partition(n, options.epsilon);
    report.p = part.p;
    report.q = part.q;
    report.k = part.k;
    report.remainder = part.remainder.size();

    SamplerConfig config;
    config.params = params;
    config.n = n;
    config.seed = report.seed;
    config.burn_in_sweeps = options.burn_in_sweeps;
    config.heat_bath_resolution = options.heat_bath_resolution;
    const SampleSet replicas = independent_replicas(config, replicas_per_n);

    std::vector<double> zeta(replicas.count());
    for (std::size_t r = 0; r < replicas.count(); ++r) {
      zeta[r] = zeta_from_sample(replicas.row(r), report.mean, report.sigma_n_sq);
    }
    report.ks_distance = ks_distance(zeta);
    report.zeta_samples_digest = sample_moments(zeta);
    if (options.observer) options.observer(report, replicas, kernel);
    ks_values.push_back(report.ks_distance);
    sweep.reports.push_back(report);
    sweep.zeta_samples.push_back(std::move(zeta));
  }
  if (n_values.size() < 2) return sweep;
  sweep.fitted_rate = fit_rate(n_values, ks_values);

  if (options.bootstrap_rounds > 0) {
    std::vector<double> slopes(options.bootstrap_rounds);
    parallel_for(options.bootstrap_rounds, [&](std::size_t b) {
      Rng rng(derive_seed(seed, 0xb0075742ULL, b));
      std::vector<double> ks_b(n_values.size());
      std::vector<double> resampled;
      for (std::size_t i = 0; i < n_values.size(); ++i) {
        const auto& z = sweep.zeta_samples[i];
        resampled.resize(z.size());
        for (auto& v : resampled) v = z[rng.next() % z.size()];
        ks_b[i] = ks_distance(resampled);
      }
      slopes[b] = fit_rate(n_values, ks_b);
    });
    std::sort(slopes.begin(), slopes.end());
    auto quantile = [&](double q) {
      const double pos = q * static_cast<double>(slopes.size() - 1);
      const auto lo = static_cast<std::size_t>(std::floor(pos));
      const auto hi = std::min(lo + 1, slopes.size() - 1);
      return slopes[lo] + (pos - static_cast<double>(lo)) * (slopes[hi] - slopes[lo]);
    };
    sweep.rate_ci_low = quantile(0.025);
    sweep.rate_ci_high = quantile(0.975);
  } else {
    sweep.rate_ci_low = sweep.rate_ci_high = sweep.fitted_rate;
  }
  return sweep;
}

LemmaDiagnostics lemma_diagnostics(const ModelParams& params, std::size_t n, double epsilon,
                                   const SampleSet& samples, const TransferKernel& kernel) {
  if (samples.n != n) throw std::invalid_argument("sample width differs from n");
  if (kernel.params().beta != params.beta || kernel.params().gamma != params.gamma) {
    throw std::invalid_argument("kernel parameters differ from params");
  }
  if (samples.count() < 2) throw std::invalid_argument("lemma diagnostics need >= 2 samples");
  const BlockPartition part = build_partition(n, epsilon);
  const ExactMoments moments(kernel, n);
  const double mean = moments.mean();
  const double sigma_sq = sigma_n_squared(moments);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n) * sigma_sq);
  const std::size_t count = samples.count();
  const std::size_t k = part.k;
  const std::size_t p = part.p;
  const double eps6 = 0.5 * (1.0 - epsilon);

  long double w_abs = 0.0L;
  std::vector<std::complex<double>> joint(kLemmaTGrid.size());
  std::vector<std::vector<std::complex<double>>> per_block(
      kLemmaTGrid.size(), std::vector<std::complex<double>>(k));
  long double win_sum = 0.0L;
  long double win_sq = 0.0L;
  long double win_abs3 = 0.0L;
  std::vector<double> prefix(2 * n + 1);
  std::vector<double> block_sums(k);

  for (std::size_t r = 0; r < count; ++r) {
    const auto y = samples.row(r);
    prefix[0] = 0.0;
    for (std::size_t i = 0; i < 2 * n; ++i) prefix[i + 1] = prefix[i] + (y[i % n] - mean);
    auto range_sum = [&](const IndexCluster& c) { return prefix[c.start + c.length] - prefix[c.start]; };

    double w_total = 0.0;
    for (const auto& w : part.w_blocks) w_total += range_sum(w);
    w_abs += std::abs(w_total);

    double v_total = 0.0;
    for (std::size_t l = 0; l < k; ++l) {
      block_sums[l] = range_sum(part.v_blocks[l]);
      v_total += block_sums[l];
    }
    for (std::size_t ti = 0; ti < kLemmaTGrid.size(); ++ti) {
      const double t = kLemmaTGrid[ti] * scale;
      joint[ti] += std::polar(1.0, t * v_total);
      for (std::size_t l = 0; l < k; ++l) per_block[ti][l] += std::polar(1.0, t * block_sums[l]);
    }

    for (std::size_t s = 0; s < n; ++s) {
      const double xi = prefix[s + p] - prefix[s];
      win_sum += xi;
      win_sq += static_cast<long double>(xi) * xi;
      win_abs3 += static_cast<long double>(std::abs(xi)) * xi * xi;
    }
  }

  const double m = static_cast<double>(count);
  LemmaDiagnostics out;
  out.c3_ratio = static_cast<double>(w_abs / m) / std::sqrt(static_cast<double>(k * part.q));
  for (std::size_t ti = 0; ti < kLemmaTGrid.size(); ++ti) {
    std::complex<double> product(1.0, 0.0);
    for (std::size_t l = 0; l < k; ++l) product *= per_block[ti][l] / m;
    out.block_dependence_gap = std::max(out.block_dependence_gap, std::abs(joint[ti] / m - product));
  }
  const double windows = m * static_cast<double>(n);
  const double win_mean = static_cast<double>(win_sum / windows);
  const double second = static_cast<double>(win_sq / windows);
  const double win_var = (second - win_mean * win_mean) * windows / (windows - 1.0);
  out.normalization_drift = std::abs(1.0 - win_var / (static_cast<double>(p) * sigma_sq));
  out.third_moment_ratio = static_cast<double>(win_abs3 / windows) /
                           std::pow(static_cast<double>(p), 1.0 + 0.5 * eps6);
  out.variance_lower_ratio = second / static_cast<double>(p);
  return out;
}

}  // namespace cchain
