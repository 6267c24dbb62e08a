#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cchain {

// Standard normal CDF via std::erfc.
double normal_cdf(double z);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Ordinary least squares y = intercept + slope * x. Needs >= 2 distinct x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

struct SampleMoments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};

SampleMoments sample_moments(std::span<const double> values);

// Normalized autocorrelation of a series at lags 0..max_lag.
std::vector<double> autocorrelation(std::span<const double> series, std::size_t max_lag);

// Integrated autocorrelation time tau = 1/2 + sum_{t>=1} rho(t), truncated by
// Sokal's automatic window (smallest W with W >= c * tau(W)). Never below 1/2.
double integrated_autocorrelation_time(std::span<const double> series, double window_c = 5.0);

// count / (2 tau), capped at count.
double effective_sample_size(std::span<const double> series);

}  // namespace cchain
