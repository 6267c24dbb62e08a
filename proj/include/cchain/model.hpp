#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cchain {

// Indices are 0-based everywhere in code. Documentation and file formats that
// talk about "site 1" mean index kFirstSite, and every index is taken modulo
// the chain length.
inline constexpr std::size_t kFirstSite = 0;

// Interaction strengths: beta for nearest neighbours, gamma for
// next-to-nearest neighbours.
struct ModelParams {
  double beta = 2.0;
  double gamma = 1.0;

  ModelParams() = default;
  ModelParams(double beta, double gamma);  // validates beta > 0, gamma >= 0
};

// One spacing configuration on the circle. Every spacing lies in (0, 1].
class ChainState {
 public:
  explicit ChainState(std::vector<double> spacings);

  std::size_t size() const { return spacings_.size(); }
  double operator[](std::size_t i) const { return spacings_[i]; }
  // Circular access: i is reduced modulo size().
  double at_circular(std::ptrdiff_t i) const;
  std::span<const double> spacings() const { return spacings_; }

  // Replaces one spacing; value must lie in (0, 1].
  void set(std::size_t i, double value);

 private:
  std::vector<double> spacings_;
};

// A run of `length` consecutive circular indices starting at `start`, on a
// circle of `ring` sites.
struct IndexCluster {
  std::size_t start = 0;
  std::size_t length = 1;
  std::size_t ring = 1;

  IndexCluster() = default;
  IndexCluster(std::size_t start, std::size_t length, std::size_t ring);

  std::size_t last() const { return (start + length - 1) % ring; }
  bool contains(std::size_t index) const;
  std::vector<std::size_t> indices() const;
};

// Q(x, y) = exp(-beta/(2x) - beta/(2y) - gamma/(x + y)). Throws
// std::domain_error unless 0 < x, y <= 1.
double q_eval(const ModelParams& params, double x, double y);

// log Q(x, y) without the exponential.
double log_q(const ModelParams& params, double x, double y);

// H(y) = sum_i beta/y_i + gamma/(y_i + y_{i+1}), circular.
double circular_energy(const ModelParams& params, const ChainState& state);
double circular_energy(const ModelParams& params, std::span<const double> spacings);

// Number of indices in the shorter of the two circular gaps separating the
// clusters. Throws std::invalid_argument if they overlap or live on
// different rings.
std::size_t cluster_distance(const IndexCluster& a, const IndexCluster& b);

// Gap lengths walking forward from the end of `from` to the start of `to`.
std::size_t forward_gap(const IndexCluster& from, const IndexCluster& to);

}  // namespace cchain
