#pragma once

// Tabular artifacts: `#`-prefixed metadata lines, one header row, then rows.
// Doubles are written in the shortest form that parses back exactly.

#include <charconv>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace magsense::io {

inline constexpr std::string_view kToolName = "magnon-sense";
inline constexpr std::string_view kToolVersion = "1.0.0";
inline constexpr std::string_view kSchemaVersion = "1";

/// Write/read failure of an artifact or input file.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  auto [p, ec] = std::to_chars(buf, buf + 16, v, 16);
  std::string s(buf, p);
  return std::string(16 - s.size(), '0') + s;
}

inline std::string format_double(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, p);
}

using Cell = std::variant<double, std::int64_t, std::string>;

struct Column {
  std::string name;
  std::string unit;  // empty: dimensionless
};

struct Table {
  std::vector<std::pair<std::string, std::string>> metadata;  // ordered
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> rows;

  void meta(std::string key, std::string value) {
    metadata.emplace_back(std::move(key), std::move(value));
  }

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) {
      throw std::logic_error("row width does not match the column count");
    }
    rows.push_back(std::move(row));
  }

  std::size_t column_index(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i].name == name) return i;
    }
    throw std::out_of_range("no column '" + std::string(name) + "'");
  }
};

inline std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

/// Run-level metadata shared by every artifact of one invocation.
struct RunInfo {
  std::string task;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string timestamp;
};

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::vector<std::pair<std::string, std::string>> header_lines(const RunInfo& run,
                                                                     const Table& t) {
  std::vector<std::pair<std::string, std::string>> lines{
      {"tool", std::string(kToolName)},
      {"version", std::string(kToolVersion)},
      {"schema", std::string(kSchemaVersion)},
      {"task", run.task},
      {"config_hash", run.config_hash},
      {"seed", std::to_string(run.seed)},
      {"timestamp", run.timestamp},
  };
  lines.insert(lines.end(), t.metadata.begin(), t.metadata.end());
  std::string units;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) units += ",";
    units += t.columns[i].unit.empty() ? "1" : t.columns[i].unit;
  }
  lines.emplace_back("units", units);
  return lines;
}

inline std::string render_csv(const RunInfo& run, const Table& t) {
  std::string out;
  for (const auto& [k, v] : header_lines(run, t)) out += "# " + k + ": " + v + "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out += ',';
    out += t.columns[i].name;
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += cell_text(row[i]);
    }
    out += '\n';
  }
  return out;
}

inline std::string render_json(const RunInfo& run, const Table& t) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [k, v] : header_lines(run, t)) {
    if (k != "units") meta[k] = v;
  }
  j["metadata"] = meta;
  nlohmann::ordered_json cols = nlohmann::ordered_json::array();
  for (const auto& c : t.columns) cols.push_back({{"name", c.name}, {"unit", c.unit}});
  j["columns"] = cols;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json r = nlohmann::ordered_json::array();
    for (const auto& c : row) std::visit([&](const auto& v) { r.push_back(v); }, c);
    rows.push_back(std::move(r));
  }
  j["rows"] = rows;
  return j.dump(1) + "\n";
}

/// Writes through a temporary sibling and renames it into place.
inline void write_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      throw IoError("write failed for '" + tmp.string() + "'");
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move artifact into '" + path.string() + "'");
  }
}

// ---- reading back -------------------------------------------------------

/// A numeric CSV artifact read back from disk.
struct CsvData {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t column_index(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return i;
    }
    throw IoError("CSV has no column '" + std::string(name) + "'");
  }

  bool has_column(std::string_view name) const {
    for (const auto& c : columns) {
      if (c == name) return true;
    }
    return false;
  }

  std::vector<double> numeric(std::string_view name) const {
    const std::size_t k = column_index(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
      double v = 0.0;
      const auto& s = r[k];
      const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc{} || p != s.data() + s.size()) {
        throw IoError("non-numeric entry '" + s + "' in column '" + std::string(name) + "'");
      }
      out.push_back(v);
    }
    return out;
  }
};

inline CsvData parse_csv(std::string_view text, const std::string& origin = "<csv>") {
  CsvData d;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = false;
  std::size_t lineno = 0;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
      if (c == ',') {
        out.push_back(cur);
        cur.clear();
      } else if (c != '\r') {
        cur += c;
      }
    }
    out.push_back(cur);
    return out;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(':');
      if (colon != std::string::npos) {
        std::string key = line.substr(1, colon - 1);
        std::string val = line.substr(colon + 1);
        while (!key.empty() && key.front() == ' ') key.erase(key.begin());
        while (!val.empty() && val.front() == ' ') val.erase(val.begin());
        d.metadata.emplace_back(key, val);
      }
      continue;
    }
    if (!header) {
      d.columns = split(line);
      header = true;
      continue;
    }
    auto row = split(line);
    if (row.size() != d.columns.size()) {
      throw IoError(origin + ":" + std::to_string(lineno) + ": expected " +
                    std::to_string(d.columns.size()) + " fields, got " + std::to_string(row.size()));
    }
    d.rows.push_back(std::move(row));
  }
  if (!header) throw IoError(origin + ": no header row");
  return d;
}

inline CsvData read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), path.string());
}

}  // namespace magsense::io
