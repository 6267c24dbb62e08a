#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cchain/model.hpp"
#include "cchain/transfer.hpp"

namespace cchain {

// sup over the grid of |f_{I|J}(y_I | y_J) / f_I(y_I) - 1| for one placement.
struct DecayMeasurement {
  ModelParams params;
  std::size_t n = 0;
  std::size_t i_len = 0;
  std::size_t j_len = 0;
  std::size_t r = 0;
  double sup_ratio = 0.0;
};

struct DecayFit {
  double alpha_hat = 0.0;
  double c_hat = 0.0;
  std::size_t r_min = 0;
  std::size_t r_max = 0;
  double r_squared = 0.0;
};

// Places I at index 0 and J a forward gap r after the end of I.
DecayMeasurement measure_ratio(const TransferKernel& kernel, std::size_t n, std::size_t i_len,
                               std::size_t j_len, std::size_t r);

// General placement; the result depends only on the two gap lengths.
DecayMeasurement measure_ratio(const TransferKernel& kernel, std::size_t n,
                               const IndexCluster& i_cluster, const IndexCluster& j_cluster);

// Measurements for r in [r_min, r_max], computed concurrently.
std::vector<DecayMeasurement> measure_ratio_sweep(const TransferKernel& kernel, std::size_t n,
                                                  std::size_t i_len, std::size_t j_len,
                                                  std::size_t r_min, std::size_t r_max);

// Least-squares fit of log(sup_ratio) = log(c_hat) - alpha_hat * r. Throws
// FitError on fewer than 4 points, mismatched measurement keys, gamma == 0,
// or any sup_ratio <= 0.
DecayFit fit_decay(std::span<const DecayMeasurement> measurements);

// Delta^r(z) = T(z1,z2)T(z3,z4)T(z5,z6)T(z7,z8) - T(z1,z4)T(z3,z2)T(z5,z8)T(z7,z6)
// with T = T^r evaluated through the Nystrom extension.
double delta_function(const TransferKernel& kernel, int r, const std::array<double, 8>& z);

inline constexpr std::size_t kReducedAxisNodes = 12;
inline constexpr int kMaxDeltaOrder = 6;

struct DeltaContraction {
  int r = 0;
  // int exp(-sum beta/(2 z_i)) |Delta^r(z)| dz on the reduced tensor grid.
  double lhs = 0.0;
  // (int int exp(-beta/(2u)) T^{floor(r/2)}(u,v) exp(-beta/(2v)) du dv)^8.
  double rhs_shape = 0.0;
  // lhs / rhs_shape for r, r-2, ... >= 1 (same parity), newest first.
  std::vector<double> ratio_sequence;
  // True when the same-parity sequence strictly decreases towards r.
  bool ratio_sequence_decreasing = true;
};

// Throws std::invalid_argument unless 1 <= r <= kMaxDeltaOrder.
DeltaContraction delta_contraction_check(const TransferKernel& kernel, int r,
                                         std::size_t axis_nodes = kReducedAxisNodes);

// The lhs integral alone.
double delta_lhs_integral(const TransferKernel& kernel, int r,
                          std::size_t axis_nodes = kReducedAxisNodes);
double delta_rhs_shape(const TransferKernel& kernel, int r);

// Plain Monte Carlo estimate of the lhs integral over [0,1]^8 with uniform
// points; returns {estimate, standard error}.
std::array<double, 2> delta_lhs_monte_carlo(const TransferKernel& kernel, int r,
                                            std::size_t points, std::uint64_t seed);

}  // namespace cchain
