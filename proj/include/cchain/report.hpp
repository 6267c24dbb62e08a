#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cchain/clt.hpp"
#include "cchain/decay.hpp"
#include "cchain/model.hpp"

namespace cchain {

inline constexpr std::string_view kToolVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::span<const unsigned char> bytes);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);
std::string hex64(std::uint64_t value);

// printf("%.17g").
std::string format_double(double value);

nlohmann::json to_json(const ModelParams& params);
nlohmann::json to_json(const SampleMoments& moments);
nlohmann::json to_json(const CltReport& report);
nlohmann::json to_json(const LemmaDiagnostics& diagnostics);
nlohmann::json to_json(const DecayFit& fit);

// Pretty-printed, newline-terminated.
void write_json(const std::filesystem::path& path, const nlohmann::json& value);
nlohmann::json read_json(const std::filesystem::path& path);

// Rows: beta,gamma,n,i_len,j_len,r,sup_ratio.
void write_decay_csv(const std::filesystem::path& path,
                     std::span<const DecayMeasurement> measurements);

struct ManifestOutput {
  std::filesystem::path path;
  std::uint64_t digest = 0;
};

struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  nlohmann::json params;
  nlohmann::json n;
  std::size_t grid_size = 0;
  std::uint64_t seed = 0;
  nlohmann::json replicas;
  double duration_seconds = 0.0;
  std::vector<ManifestOutput> outputs;

  // Digests the listed files now.
  void add_output(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

}  // namespace cchain
