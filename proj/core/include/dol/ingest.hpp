#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "dol/core.hpp"

namespace dol {

enum class DataFormat { dold, csv };

DataFormat parse_data_format(std::string_view text);

// DOLD layout (all little-endian):
//   "DOLD" | u32 version (=1) | u64 n | u64 d | n*d binary32, row-major
inline constexpr std::size_t kDoldHeaderBytes = 24;
inline constexpr std::uint32_t kDoldVersion = 1;

Dataset load_dataset(const std::filesystem::path& path, DataFormat format);
void save_dataset(const Dataset& ds, const std::filesystem::path& path);

/// In-memory codecs behind load/save, exposed for streams and tests.
std::vector<unsigned char> encode_dold(const Dataset& ds);
Dataset decode_dold(std::span<const unsigned char> bytes);
Dataset parse_csv_dataset(std::string_view text);

/// 64-bit FNV-1a over the DOLD payload bytes (the binary32 values only).
std::uint64_t payload_checksum(const Dataset& ds);

struct IsotropicGaussian {
  std::vector<double> mean;  // length dim, or empty for the origin
  double scale = 1.0;
};

struct TwoPoint {
  std::vector<double> a;  // length dim; each sample is a or b with probability 1/2
  std::vector<double> b;
};

struct FiniteMixture {
  std::vector<std::vector<double>> points;  // K atoms of length dim
  std::vector<double> probs;                // sums to 1
};

struct SyntheticSpec {
  std::variant<IsotropicGaussian, TwoPoint, FiniteMixture> kind;
  std::size_t n_samples = 0;
  std::size_t dim = 0;
  std::uint64_t seed = 0;
};

/// Deterministic synthetic dataset; Gaussian draws use Box-Muller over a
/// Philox stream keyed by the seed. Throws SpecError on invalid parameters.
Dataset generate(const SyntheticSpec& spec);

}  // namespace dol
