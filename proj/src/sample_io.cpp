#include "cchain/sample_io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace cchain {

namespace {

template <typename T>
void put_le(std::ostream& out, T value) {
  using U = std::conditional_t<sizeof(T) == 2, std::uint16_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>;
  const U bits = std::bit_cast<U>(value);
  char bytes[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(bytes, sizeof(U));
}

template <typename T>
T get_le(std::istream& in) {
  using U = std::conditional_t<sizeof(T) == 2, std::uint16_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>;
  unsigned char bytes[sizeof(U)];
  in.read(reinterpret_cast<char*>(bytes), sizeof(U));
  if (!in) throw std::runtime_error("sample file truncated");
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) bits |= static_cast<U>(bytes[i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

}  // namespace

void write_samples_binary(const std::filesystem::path& path, const SampleSet& samples,
                          std::uint64_t seed, const ModelParams& params) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(kSampleMagic.data(), static_cast<std::streamsize>(kSampleMagic.size()));
  put_le<std::uint16_t>(out, kSampleFormatVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(samples.n));
  put_le<std::uint64_t>(out, samples.count());
  put_le<std::uint64_t>(out, seed);
  put_le<double>(out, params.beta);
  put_le<double>(out, params.gamma);
  for (double v : samples.values) put_le<double>(out, v);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

LoadedSamples read_samples_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kSampleMagic.data(), 4) != 0) {
    throw std::runtime_error(path.string() + " is not a CCHN sample file");
  }
  LoadedSamples out;
  out.header.version = get_le<std::uint16_t>(in);
  if (out.header.version != kSampleFormatVersion) {
    throw std::runtime_error("unsupported sample file version " + std::to_string(out.header.version));
  }
  out.header.n = get_le<std::uint32_t>(in);
  out.header.count = get_le<std::uint64_t>(in);
  out.header.seed = get_le<std::uint64_t>(in);
  out.header.beta = get_le<double>(in);
  out.header.gamma = get_le<double>(in);
  out.samples.n = out.header.n;
  out.samples.values.resize(static_cast<std::size_t>(out.header.count) * out.header.n);
  for (auto& v : out.samples.values) v = get_le<double>(in);
  return out;
}

void write_samples_csv(const std::filesystem::path& path, const SampleSet& samples) {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (std::size_t j = 0; j < samples.n; ++j) std::fprintf(f, "%sy%zu", j ? "," : "", j + 1);
  std::fputc('\n', f);
  for (std::size_t i = 0; i < samples.count(); ++i) {
    const auto row = samples.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) std::fprintf(f, "%s%.17g", j ? "," : "", row[j]);
    std::fputc('\n', f);
  }
  if (std::fclose(f) != 0) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace cchain
