#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "error.hpp"
#include "text.hpp"

namespace contribscope {

/// Empty cell (undefined value), text key, integer count, or real value.
using Cell = std::variant<std::monostate, std::string, long long, double>;

/// Long-form keyed table produced by every analysis. Reals are always
/// written with six decimals so exports are byte-stable.
struct AnalysisTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, Cell>> meta;

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::logic_error("row width does not match columns of " + name);
    rows.push_back(std::move(row));
  }

  std::string to_csv() const {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) out += ',';
      out += csv_escape(columns[i]);
    }
    out += '\n';
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (i) out += ',';
        out += render(r[i], false);
      }
      out += '\n';
    }
    return out;
  }

  std::string to_json() const {
    std::string out = "{\n  \"analysis\": " + json_string(name) + ",\n  \"meta\": {";
    for (std::size_t i = 0; i < meta.size(); ++i) {
      out += i ? ", " : "";
      out += json_string(meta[i].first) + ": " + render(meta[i].second, true);
    }
    out += "},\n  \"rows\": [";
    for (std::size_t r = 0; r < rows.size(); ++r) {
      out += r ? ",\n    {" : "\n    {";
      for (std::size_t i = 0; i < columns.size(); ++i) {
        out += i ? ", " : "";
        out += json_string(columns[i]) + ": " + render(rows[r][i], true);
      }
      out += "}";
    }
    out += rows.empty() ? "]\n}\n" : "\n  ]\n}\n";
    return out;
  }

  static std::string json_string(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
      auto c = static_cast<unsigned char>(ch);
      switch (ch) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default:
          if (c < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\u%04x", c);
            out += buf;
          } else {
            out.push_back(ch);
          }
      }
    }
    return out + "\"";
  }

 private:
  static std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
      if (c == '"') out += '"';
      out += c;
    }
    return out + "\"";
  }

  static std::string render(const Cell& c, bool json) {
    if (std::holds_alternative<std::monostate>(c)) return json ? "null" : "";
    if (const auto* s = std::get_if<std::string>(&c)) return json ? json_string(*s) : csv_escape(*s);
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    const double d = std::get<double>(c);
    if (!std::isfinite(d)) return json ? "null" : "";
    return text::fixed6(d);
  }
};

/// Writes <dir>/<stem>.csv and <dir>/<stem>.json; returns the two paths.
inline std::vector<std::string> write_table(const AnalysisTable& t, const std::string& dir, const std::string& stem) {
  std::vector<std::string> paths = {dir + "/" + stem + ".csv", dir + "/" + stem + ".json"};
  const std::string bodies[2] = {t.to_csv(), t.to_json()};
  for (int i = 0; i < 2; ++i) {
    std::ofstream out(paths[i], std::ios::binary);
    if (!out) throw DataError("cannot write " + paths[i]);
    out << bodies[i];
  }
  return paths;
}

}  // namespace contribscope
