#pragma once

#include <stdexcept>

namespace cchain {

// Raised when the transfer kernel has no usable gap between its two leading
// eigenvalues.
class SpectralGapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by the sampler when a chain reaches a non-finite energy.
class SamplerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a computed variance is not strictly positive.
class NonPositiveVarianceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a log-linear decay fit cannot be formed.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cchain
