#include "cchain/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cchain {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_line: size mismatch");
  if (x.size() < 2) throw std::invalid_argument("fit_line: need at least 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: x values are all equal");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - fit.intercept - fit.slope * x[i];
    sse += e * e;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
  return fit;
}

SampleMoments sample_moments(std::span<const double> values) {
  if (values.size() < 2) throw std::invalid_argument("sample_moments: need at least 2 values");
  const double n = static_cast<double>(values.size());
  long double sum = 0.0L;
  for (double v : values) sum += v;
  const double mean = static_cast<double>(sum / n);
  long double m2 = 0.0L;
  long double m3 = 0.0L;
  long double m4 = 0.0L;
  for (double v : values) {
    const long double d = v - mean;
    const long double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  SampleMoments out;
  out.mean = mean;
  out.variance = static_cast<double>(m2 / (n - 1.0));
  const double pop_var = static_cast<double>(m2 / n);
  if (pop_var > 0.0) {
    out.skewness = static_cast<double>(m3 / n) / std::pow(pop_var, 1.5);
    out.excess_kurtosis = static_cast<double>(m4 / n) / (pop_var * pop_var) - 3.0;
  }
  return out;
}

std::vector<double> autocorrelation(std::span<const double> series, std::size_t max_lag) {
  const std::size_t n = series.size();
  if (n < 2) throw std::invalid_argument("autocorrelation: need at least 2 values");
  max_lag = std::min(max_lag, n - 1);
  long double sum = 0.0L;
  for (double v : series) sum += v;
  const double mean = static_cast<double>(sum / n);
  std::vector<double> centered(n);
  for (std::size_t i = 0; i < n; ++i) centered[i] = series[i] - mean;
  std::vector<double> rho(max_lag + 1, 0.0);
  long double c0 = 0.0L;
  for (double v : centered) c0 += static_cast<long double>(v) * v;
  if (c0 == 0.0L) {
    rho[0] = 1.0;
    return rho;
  }
  for (std::size_t lag = 0; lag <= max_lag; ++lag) {
    long double c = 0.0L;
    for (std::size_t i = 0; i + lag < n; ++i) c += static_cast<long double>(centered[i]) * centered[i + lag];
    rho[lag] = static_cast<double>(c / c0);
  }
  return rho;
}

double integrated_autocorrelation_time(std::span<const double> series, double window_c) {
  const std::size_t n = series.size();
  if (n < 2) return 0.5;
  long double sum = 0.0L;
  for (double v : series) sum += v;
  const double mean = static_cast<double>(sum / n);
  std::vector<double> centered(n);
  long double c0 = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    centered[i] = series[i] - mean;
    c0 += static_cast<long double>(centered[i]) * centered[i];
  }
  if (c0 == 0.0L) return 0.5;
  // Lags are computed on demand; the window usually closes after a few terms.
  double tau = 0.5;
  for (std::size_t w = 1; w < n; ++w) {
    long double c = 0.0L;
    for (std::size_t i = 0; i + w < n; ++i) c += static_cast<long double>(centered[i]) * centered[i + w];
    tau += static_cast<double>(c / c0);
    if (static_cast<double>(w) >= window_c * tau) break;
  }
  return std::max(tau, 0.5);
}

double effective_sample_size(std::span<const double> series) {
  const double count = static_cast<double>(series.size());
  return std::min(count, count / (2.0 * integrated_autocorrelation_time(series)));
}

}  // namespace cchain
