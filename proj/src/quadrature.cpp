#include "cchain/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cchain {

QuadratureGrid gauss_legendre(std::size_t m, double lo, double hi) {
  if (m == 0) throw std::invalid_argument("quadrature needs at least one node");
  QuadratureGrid grid;
  grid.nodes.resize(m);
  grid.weights.resize(m);
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  // Newton iteration on P_m from the Tricomi initial guess; roots are
  // symmetric so only half are computed.
  for (std::size_t i = 0; i < (m + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(m) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= m; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      if (m == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = static_cast<double>(m) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged root.
    double p0 = 1.0;
    double p1 = x;
    for (std::size_t k = 2; k <= m; ++k) {
      const double kk = static_cast<double>(k);
      const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
      p0 = p1;
      p1 = p2;
    }
    dp = static_cast<double>(m) * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // x is the i-th largest root; store ascending.
    grid.nodes[m - 1 - i] = mid + half * x;
    grid.nodes[i] = mid - half * x;
    grid.weights[m - 1 - i] = half * w;
    grid.weights[i] = half * w;
  }
  return grid;
}

QuadratureGrid build_grid(std::size_t m) {
  if (m < kMinGridSize) {
    throw std::invalid_argument("grid size must be at least 8");
  }
  return gauss_legendre(m);
}

}  // namespace cchain
