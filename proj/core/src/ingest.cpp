#include "dol/ingest.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "dol/rng.hpp"

namespace dol {

namespace {

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

std::uint64_t get_le(std::span<const unsigned char> bytes, std::size_t offset, int width) {
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) {
    v |= static_cast<std::uint64_t>(bytes[offset + i]) << (8 * i);
  }
  return v;
}

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

// Stream tags so the three generators never share Philox streams.
constexpr std::uint32_t kTagGaussian = 1;
constexpr std::uint32_t kTagTwoPoint = 2;
constexpr std::uint32_t kTagMixture = 3;

CounterStream row_stream(std::uint64_t seed, std::size_t row, std::uint32_t tag) {
  return CounterStream(derive_key(seed, 0x5EED), static_cast<std::uint32_t>(row),
                       static_cast<std::uint32_t>(static_cast<std::uint64_t>(row) >> 32), tag);
}

void require_length(const std::vector<double>& v, std::size_t dim, const char* what) {
  if (v.size() != dim) {
    throw SpecError(std::string(what) + " must have length " + std::to_string(dim));
  }
  for (double x : v) {
    if (!std::isfinite(x)) throw SpecError(std::string(what) + " must be finite");
  }
}

}  // namespace

DataFormat parse_data_format(std::string_view text) {
  if (text == "dold") return DataFormat::dold;
  if (text == "csv") return DataFormat::csv;
  throw FormatError("unknown data format '" + std::string(text) + "'");
}

std::vector<unsigned char> encode_dold(const Dataset& ds) {
  std::vector<unsigned char> out{'D', 'O', 'L', 'D'};
  out.reserve(kDoldHeaderBytes + 4 * ds.values().size());
  put_u32(out, kDoldVersion);
  put_u64(out, ds.size());
  put_u64(out, ds.dim());
  for (float v : ds.values()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

Dataset decode_dold(std::span<const unsigned char> bytes) {
  if (bytes.size() < kDoldHeaderBytes) throw FormatError("DOLD file is shorter than its header");
  if (bytes[0] != 'D' || bytes[1] != 'O' || bytes[2] != 'L' || bytes[3] != 'D') {
    throw FormatError("bad DOLD magic");
  }
  const auto version = static_cast<std::uint32_t>(get_le(bytes, 4, 4));
  if (version != kDoldVersion) {
    throw FormatError("unsupported DOLD version " + std::to_string(version));
  }
  const std::uint64_t n = get_le(bytes, 8, 8);
  const std::uint64_t d = get_le(bytes, 16, 8);
  if (n == 0 || d == 0) throw FormatError("DOLD header declares an empty dataset");
  const std::uint64_t payload = bytes.size() - kDoldHeaderBytes;
  if (n > payload / 4 / d || n * d * 4 != payload) {
    throw FormatError("DOLD payload holds " + std::to_string(payload) + " bytes, header declares " +
                      std::to_string(n) + "x" + std::to_string(d) + " binary32 values");
  }
  std::vector<float> values(n * d);
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = std::bit_cast<float>(static_cast<std::uint32_t>(get_le(bytes, kDoldHeaderBytes + 4 * i, 4)));
  }
  return Dataset(n, d, std::move(values));
}

Dataset parse_csv_dataset(std::string_view text) {
  std::vector<float> values;
  std::size_t dim = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (trim(line).empty()) continue;

    std::size_t fields = 0;
    bool finite_row = true;
    while (true) {
      const auto comma = line.find(',');
      const std::string_view field = trim(line.substr(0, comma));
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
        throw FormatError("line " + std::to_string(line_no) + ": cannot parse '" + std::string(field) +
                          "' as a number");
      }
      const auto f = static_cast<float>(v);
      finite_row = finite_row && std::isfinite(f);
      values.push_back(f);
      ++fields;
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    if (rows == 0) {
      dim = fields;
    } else if (fields != dim) {
      throw FormatError("line " + std::to_string(line_no) + ": expected " + std::to_string(dim) +
                        " fields, found " + std::to_string(fields));
    }
    if (!finite_row) {
      throw DataError(rows, "non-finite value in row " + std::to_string(rows));
    }
    ++rows;
  }
  if (rows == 0) throw FormatError("CSV dataset has no rows");
  return Dataset(rows, dim, std::move(values));
}

Dataset load_dataset(const std::filesystem::path& path, DataFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failure on '" + path.string() + "'");
  if (format == DataFormat::dold) return decode_dold(bytes);
  return parse_csv_dataset(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
  if (path.empty()) throw IoError("empty output path");
  const auto bytes = encode_dold(ds);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failure on '" + path.string() + "'");
}

std::uint64_t payload_checksum(const Dataset& ds) {
  std::uint64_t h = kFnvOffset;
  for (float v : ds.values()) {
    const auto bits = std::bit_cast<std::uint32_t>(v);
    for (int i = 0; i < 4; ++i) {
      h ^= static_cast<unsigned char>(bits >> (8 * i));
      h *= kFnvPrime;
    }
  }
  return h;
}

Dataset generate(const SyntheticSpec& spec) {
  if (spec.n_samples == 0 || spec.dim == 0) throw SpecError("synthetic dataset needs n >= 1 and dim >= 1");
  const std::size_t n = spec.n_samples;
  const std::size_t d = spec.dim;
  std::vector<float> values(n * d);

  if (const auto* g = std::get_if<IsotropicGaussian>(&spec.kind)) {
    if (!(g->scale > 0.0) || !std::isfinite(g->scale)) throw SpecError("gaussian scale must be positive");
    if (!g->mean.empty()) require_length(g->mean, d, "gaussian mean");
    for (std::size_t i = 0; i < n; ++i) {
      auto rng = row_stream(spec.seed, i, kTagGaussian);
      for (std::size_t j = 0; j < d; ++j) {
        const double mu = g->mean.empty() ? 0.0 : g->mean[j];
        values[i * d + j] = static_cast<float>(mu + g->scale * rng.normal());
      }
    }
  } else if (const auto* tp = std::get_if<TwoPoint>(&spec.kind)) {
    require_length(tp->a, d, "two-point a");
    require_length(tp->b, d, "two-point b");
    for (std::size_t i = 0; i < n; ++i) {
      auto rng = row_stream(spec.seed, i, kTagTwoPoint);
      const auto& src = rng.uniform() < 0.5 ? tp->a : tp->b;
      for (std::size_t j = 0; j < d; ++j) values[i * d + j] = static_cast<float>(src[j]);
    }
  } else {
    const auto& mix = std::get<FiniteMixture>(spec.kind);
    if (mix.points.empty() || mix.points.size() != mix.probs.size()) {
      throw SpecError("mixture needs one probability per atom and at least one atom");
    }
    double total = 0.0;
    for (double p : mix.probs) {
      if (!(p >= 0.0) || !std::isfinite(p)) throw SpecError("mixture probabilities must be nonnegative");
      total += p;
    }
    if (std::fabs(total - 1.0) > 1e-12) throw SpecError("mixture probabilities must sum to 1");
    for (const auto& pt : mix.points) require_length(pt, d, "mixture atom");
    for (std::size_t i = 0; i < n; ++i) {
      auto rng = row_stream(spec.seed, i, kTagMixture);
      const double u = rng.uniform() * total;
      std::size_t k = 0;
      double acc = mix.probs[0];
      while (k + 1 < mix.probs.size() && u >= acc) acc += mix.probs[++k];
      for (std::size_t j = 0; j < d; ++j) values[i * d + j] = static_cast<float>(mix.points[k][j]);
    }
  }
  return Dataset(n, d, std::move(values));
}

}  // namespace dol
