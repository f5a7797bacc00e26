#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace dol::cli {

using nlohmann::json;

/// 17 significant digits, enough to round-trip a double.
std::string format_double(double v);

std::string read_text(const std::filesystem::path& path);
/// Writes `text` to `path`, or to stdout when the path is empty or "-".
void write_text(const std::filesystem::path& path, std::string_view text);

/// Numeric CSV with an optional header line.
struct Table {
  std::vector<std::string> header;  // empty when the file has none
  std::vector<std::vector<double>> rows;

  /// Index of a named column; throws FormatError when absent.
  std::size_t column(std::string_view name) const;
};

/// Throws FormatError on ragged rows, non-numeric cells or fewer than
/// `min_columns` columns.
Table parse_table(std::string_view text, const std::string& source, std::size_t min_columns);

struct Invocation {
  std::vector<std::string> argv;
  unsigned threads = 1;
  bool write_manifest = true;
  std::chrono::steady_clock::time_point started;
};

/// --threads when given, else DOL_THREADS, else the hardware concurrency.
unsigned resolve_threads(std::optional<unsigned> flag);

/// Writes `<out>.manifest.json` unless suppressed or writing to stdout.
void write_manifest(const Invocation& inv, const std::filesystem::path& out, const json& config,
                    std::optional<std::uint64_t> seed, std::optional<std::uint64_t> data_checksum);

}  // namespace dol::cli
