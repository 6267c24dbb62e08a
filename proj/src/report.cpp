#include "cchain/report.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include "cchain/rng.hpp"

namespace cchain {

std::uint64_t fnv1a64(std::span<const unsigned char> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string() + " for hashing");
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  return fnv1a64(bytes);
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

nlohmann::json to_json(const ModelParams& params) {
  return {{"beta", params.beta}, {"gamma", params.gamma}};
}

nlohmann::json to_json(const SampleMoments& moments) {
  return {{"mean", moments.mean},
          {"variance", moments.variance},
          {"skewness", moments.skewness},
          {"excess_kurtosis", moments.excess_kurtosis}};
}

nlohmann::json to_json(const CltReport& report) {
  return {{"schema_version", kSchemaVersion},
          {"params", to_json(report.params)},
          {"n", report.n},
          {"mean", report.mean},
          {"sigma_n_sq", report.sigma_n_sq},
          {"num_replicas", report.num_replicas},
          {"seed", report.seed},
          {"ks_distance", report.ks_distance},
          {"zeta_samples_digest", to_json(report.zeta_samples_digest)},
          {"epsilon", report.epsilon},
          {"partition", {{"p", report.p}, {"q", report.q}, {"k", report.k},
                         {"remainder", report.remainder}}}};
}

nlohmann::json to_json(const LemmaDiagnostics& d) {
  return {{"schema_version", kSchemaVersion},
          {"c3_ratio", d.c3_ratio},
          {"block_dependence_gap", d.block_dependence_gap},
          {"normalization_drift", d.normalization_drift},
          {"third_moment_ratio", d.third_moment_ratio},
          {"variance_lower_ratio", d.variance_lower_ratio}};
}

nlohmann::json to_json(const DecayFit& fit) {
  return {{"schema_version", kSchemaVersion},
          {"alpha_hat", fit.alpha_hat},
          {"c_hat", fit.c_hat},
          {"r_range", {fit.r_min, fit.r_max}},
          {"r_squared", fit.r_squared}};
}

void write_json(const std::filesystem::path& path, const nlohmann::json& value) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << value.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return nlohmann::json::parse(in);
}

void write_decay_csv(const std::filesystem::path& path,
                     std::span<const DecayMeasurement> measurements) {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  std::fprintf(f, "beta,gamma,n,i_len,j_len,r,sup_ratio\n");
  for (const auto& m : measurements) {
    std::fprintf(f, "%s,%s,%zu,%zu,%zu,%zu,%s\n", format_double(m.params.beta).c_str(),
                 format_double(m.params.gamma).c_str(), m.n, m.i_len, m.j_len, m.r,
                 format_double(m.sup_ratio).c_str());
  }
  if (std::fclose(f) != 0) throw std::runtime_error("write failed for " + path.string());
}

void RunManifest::add_output(const std::filesystem::path& path) {
  outputs.push_back({path, fnv1a64_file(path)});
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json files = nlohmann::json::array();
  for (const auto& o : outputs) {
    files.push_back({{"path", o.path.string()},
                     {"name", o.path.filename().string()},
                     {"fnv1a64", hex64(o.digest)}});
  }
  return {{"schema_version", kSchemaVersion},
          {"command", command},
          {"argv", argv},
          {"params", params},
          {"n", n},
          {"grid_size", grid_size},
          {"seed", seed},
          {"replicas", replicas},
          {"tool_version", std::string(kToolVersion)},
          {"rng", std::string(kRngAlgorithm)},
          {"duration_seconds", duration_seconds},
          {"outputs", files}};
}

}  // namespace cchain
