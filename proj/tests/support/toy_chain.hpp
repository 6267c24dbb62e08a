#pragma once

// Metropolis chain on a 3-site ring restricted to `levels` equally spaced
// spacing values j / levels, with the transition matrix built by enumeration
// from the library's acceptance rule.

#include <cstddef>

#include "cchain/model.hpp"

namespace toy {

struct BalanceReport {
  std::size_t states = 0;
  // max |pi(a) P(a->b) - pi(b) P(b->a)| / pi(a) over single-site moves.
  double detailed_balance_error = 0.0;
  // max |(pi P)(b) - pi(b)| / pi(b) for the full systematic scan.
  double stationarity_error = 0.0;
  // max |sum_b P(a->b) - 1| per single-site kernel.
  double row_sum_error = 0.0;
};

BalanceReport metropolis_balance(const cchain::ModelParams& params, std::size_t levels = 16);

}  // namespace toy
