#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>

#include "cchain/model.hpp"
#include "cchain/sampler.hpp"

namespace cchain {

inline constexpr std::string_view kSampleMagic = "CCHN";
inline constexpr std::uint16_t kSampleFormatVersion = 1;

struct SampleFileHeader {
  std::uint16_t version = kSampleFormatVersion;
  std::uint32_t n = 0;
  std::uint64_t count = 0;
  std::uint64_t seed = 0;
  double beta = 0.0;
  double gamma = 0.0;
};

// Binary layout, all little-endian and packed: "CCHN", u16 version, u32 n,
// u64 count, u64 seed, f64 beta, f64 gamma, then count rows of n f64.
void write_samples_binary(const std::filesystem::path& path, const SampleSet& samples,
                          std::uint64_t seed, const ModelParams& params);

struct LoadedSamples {
  SampleFileHeader header;
  SampleSet samples;
};
LoadedSamples read_samples_binary(const std::filesystem::path& path);

// One row per sample, columns y1..yn, 17 significant digits.
void write_samples_csv(const std::filesystem::path& path, const SampleSet& samples);

}  // namespace cchain
