#pragma once

#include <cstddef>
#include <vector>

namespace cchain {

// Gauss-Legendre rule mapped to [0, 1]. Nodes are strictly increasing in
// (0, 1) and the weights sum to one.
struct QuadratureGrid {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

inline constexpr std::size_t kMinGridSize = 8;
inline constexpr std::size_t kDefaultGridSize = 64;

// Throws std::invalid_argument for m < kMinGridSize.
QuadratureGrid build_grid(std::size_t m);

// Same rule without the lower bound on m, mapped to [lo, hi]. Used for small
// auxiliary integrals (reduced tensor grids, CDF tabulation).
QuadratureGrid gauss_legendre(std::size_t m, double lo = 0.0, double hi = 1.0);

}  // namespace cchain
