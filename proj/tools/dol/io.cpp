#include "io.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "dol/errors.hpp"

namespace dol::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_number(std::string_view cell, double& out) {
  if (cell == "inf" || cell == "+inf") {
    out = std::numeric_limits<double>::infinity();
    return true;
  }
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size();
}

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw FormatError("missing column '" + std::string(name) + "'");
}

Table parse_table(std::string_view text, const std::string& source, std::size_t min_columns) {
  Table t;
  std::size_t width = 0;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    const std::string_view line = trim(text.substr(0, nl));
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto cells = split(line, ',');
    std::vector<double> row(cells.size());
    bool numeric = true;
    for (std::size_t i = 0; i < cells.size() && numeric; ++i) numeric = parse_number(cells[i], row[i]);
    if (!numeric) {
      if (t.rows.empty() && t.header.empty()) {
        for (auto c : cells) t.header.emplace_back(c);
        width = cells.size();
        continue;
      }
      throw FormatError(source + ":" + std::to_string(line_no) + ": non-numeric value");
    }
    if (width == 0) width = cells.size();
    if (cells.size() != width) {
      throw FormatError(source + ":" + std::to_string(line_no) + ": expected " + std::to_string(width) +
                        " columns, got " + std::to_string(cells.size()));
    }
    t.rows.push_back(std::move(row));
  }
  if (width < min_columns) {
    throw FormatError(source + ": expected at least " + std::to_string(min_columns) + " columns");
  }
  return t;
}

unsigned resolve_threads(std::optional<unsigned> flag) {
  if (flag) return std::max(1u, *flag);
  if (const char* env = std::getenv("DOL_THREADS")) {
    unsigned v = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || v == 0) {
      throw ConfigError("DOL_THREADS must be a positive integer, got '" + std::string(s) + "'");
    }
    return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void write_manifest(const Invocation& inv, const std::filesystem::path& out, const json& config,
                    std::optional<std::uint64_t> seed, std::optional<std::uint64_t> data_checksum) {
  if (!inv.write_manifest || out.empty() || out == "-") return;
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - inv.started).count();
  json m;
  m["command_line"] = inv.argv;
  m["config"] = config;
  m["seed"] = seed ? json(*seed) : json(nullptr);
  m["version"] = DOLKIT_VERSION_STRING;
  m["dataset_checksum"] = data_checksum ? json(hex64(*data_checksum)) : json(nullptr);
  m["threads"] = inv.threads;
  m["wall_time_seconds"] = seconds;
  write_text(out.string() + ".manifest.json", m.dump(2) + "\n");
}

}  // namespace dol::cli
