#include "cchain/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cchain {

ModelParams::ModelParams(double beta_in, double gamma_in) : beta(beta_in), gamma(gamma_in) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("beta must satisfy beta > 0, got " + std::to_string(beta));
  }
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("gamma must satisfy gamma >= 0, got " + std::to_string(gamma));
  }
}

namespace {

void check_spacing(double y) {
  if (!(y > 0.0 && y <= 1.0)) {
    throw std::domain_error("spacing must lie in (0, 1], got " + std::to_string(y));
  }
}

}  // namespace

ChainState::ChainState(std::vector<double> spacings) : spacings_(std::move(spacings)) {
  if (spacings_.size() < 3) {
    throw std::invalid_argument("chain needs at least 3 spacings");
  }
  for (double y : spacings_) check_spacing(y);
}

double ChainState::at_circular(std::ptrdiff_t i) const {
  const auto n = static_cast<std::ptrdiff_t>(spacings_.size());
  return spacings_[static_cast<std::size_t>(((i % n) + n) % n)];
}

void ChainState::set(std::size_t i, double value) {
  check_spacing(value);
  spacings_.at(i) = value;
}

IndexCluster::IndexCluster(std::size_t start_in, std::size_t length_in, std::size_t ring_in)
    : start(start_in), length(length_in), ring(ring_in) {
  if (ring == 0 || length == 0 || length > ring) {
    throw std::invalid_argument("cluster length must satisfy 1 <= length <= ring");
  }
  if (start >= ring) {
    throw std::invalid_argument("cluster start outside the ring");
  }
}

bool IndexCluster::contains(std::size_t index) const {
  return (index + ring - start) % ring < length;
}

std::vector<std::size_t> IndexCluster::indices() const {
  std::vector<std::size_t> out(length);
  for (std::size_t i = 0; i < length; ++i) out[i] = (start + i) % ring;
  return out;
}

double log_q(const ModelParams& params, double x, double y) {
  check_spacing(x);
  check_spacing(y);
  return -0.5 * params.beta / x - 0.5 * params.beta / y - params.gamma / (x + y);
}

double q_eval(const ModelParams& params, double x, double y) {
  return std::exp(log_q(params, x, y));
}

double circular_energy(const ModelParams& params, std::span<const double> y) {
  const std::size_t n = y.size();
  double energy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    check_spacing(y[i]);
    const double next = y[(i + 1) % n];
    energy += params.beta / y[i] + params.gamma / (y[i] + next);
  }
  return energy;
}

double circular_energy(const ModelParams& params, const ChainState& state) {
  return circular_energy(params, state.spacings());
}

std::size_t forward_gap(const IndexCluster& from, const IndexCluster& to) {
  return (to.start + from.ring - (from.start + from.length) % from.ring) % from.ring;
}

std::size_t cluster_distance(const IndexCluster& a, const IndexCluster& b) {
  if (a.ring != b.ring) {
    throw std::invalid_argument("clusters live on rings of different size");
  }
  if (a.length + b.length > a.ring) {
    throw std::invalid_argument("clusters overlap");
  }
  for (std::size_t i : b.indices()) {
    if (a.contains(i)) throw std::invalid_argument("clusters overlap");
  }
  const std::size_t gap_ab = forward_gap(a, b);
  const std::size_t gap_ba = a.ring - a.length - b.length - gap_ab;
  return std::min(gap_ab, gap_ba);
}

}  // namespace cchain
