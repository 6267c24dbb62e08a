#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace cchain {

// Identifier written into run manifests.
inline constexpr std::string_view kRngAlgorithm = "xoshiro256** seeded by splitmix64";

// SplitMix64 step (Steele, Lea, Flood 2014). Also used to derive stream
// seeds from (master seed, stream index).
std::uint64_t splitmix64(std::uint64_t& state);

// Mixes a master seed and a list of stream coordinates into one 64-bit seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

// xoshiro256** 1.0 (Blackman, Vigna). Fully specified, so streams are
// bit-identical across platforms and compilers.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  result_type operator()() { return next(); }
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (0, 1].
  double uniform_open_closed();
  // Standard normal by the polar Box-Muller method.
  double normal();

  const std::array<std::uint64_t, 4>& state() const { return s_; }

 private:
  std::array<std::uint64_t, 4> s_{};
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace cchain
