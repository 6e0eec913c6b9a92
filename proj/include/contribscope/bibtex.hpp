#pragma once

#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "text.hpp"

namespace contribscope {

struct BibEntry {
  std::string key;
  std::string entry_type;  // lowercase, e.g. "inproceedings"
  std::string title;
  std::string venue;  // booktitle, else journal
  std::optional<int> year;
  std::optional<int> month;
  std::map<std::string, std::string> fields;  // every field, lowercase names
};

struct BibParseResult {
  std::map<std::string, BibEntry> entries;
  std::vector<std::string> warnings;
};

namespace bibtex_detail {

inline std::optional<int> parse_month(std::string_view raw) {
  static constexpr std::string_view kMonths[] = {"jan", "feb", "mar", "apr", "may", "jun",
                                                 "jul", "aug", "sep", "oct", "nov", "dec"};
  const std::string v = text::to_lower(text::trim(raw));
  if (v.empty()) return std::nullopt;
  if (std::isdigit(static_cast<unsigned char>(v[0]))) {
    int m = 0;
    for (char c : v) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
      m = m * 10 + (c - '0');
      if (m > 12) return std::nullopt;
    }
    if (m < 1) return std::nullopt;
    return m;
  }
  for (int i = 0; i < 12; ++i) {
    if (v.rfind(kMonths[i], 0) == 0) return i + 1;
  }
  return std::nullopt;
}

inline std::optional<int> parse_year(std::string_view raw) {
  const auto v = text::trim(raw);
  if (v.size() != 4) return std::nullopt;
  int y = 0;
  for (char c : v) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    y = y * 10 + (c - '0');
  }
  if (y < 1900 || y > 2100) return std::nullopt;
  return y;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  BibParseResult run() {
    BibParseResult out;
    while (true) {
      auto at = src_.find('@', pos_);
      if (at == std::string_view::npos) break;
      pos_ = at + 1;
      std::string type = text::to_lower(read_identifier());
      skip_ws();
      if (pos_ >= src_.size() || (src_[pos_] != '{' && src_[pos_] != '(')) {
        // Stray '@' outside an entry, treated as comment text.
        continue;
      }
      const char open = src_[pos_];
      const char close = open == '{' ? '}' : ')';
      const std::size_t entry_start = pos_;
      if (type == "comment" || type == "preamble") {
        skip_balanced(open, close, entry_start);
        continue;
      }
      ++pos_;
      if (type == "string") {
        parse_string_macro(close, entry_start);
        continue;
      }
      BibEntry e = parse_entry(type, close, entry_start);
      if (out.entries.count(e.key)) {
        out.warnings.push_back("duplicate key " + e.key + " at byte " + std::to_string(entry_start) +
                               "; keeping the last entry");
      }
      std::string key = e.key;
      out.entries.insert_or_assign(std::move(key), std::move(e));
    }
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& what, std::size_t offset) const {
    throw DataError("bibtex: " + what + " at byte " + std::to_string(offset));
  }

  void skip_ws() {
    while (pos_ < src_.size() && text::is_space(src_[pos_])) ++pos_;
  }

  std::string read_identifier() {
    std::size_t start = pos_;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == ':' || c == '.' ||
          c == '+' || c == '/')
        ++pos_;
      else
        break;
    }
    return std::string(src_.substr(start, pos_ - start));
  }

  // Positions pos_ just past the matching close character.
  void skip_balanced(char open, char close, std::size_t start) {
    int depth = 0;
    for (; pos_ < src_.size(); ++pos_) {
      if (src_[pos_] == open) ++depth;
      if (src_[pos_] == close && --depth == 0) {
        ++pos_;
        return;
      }
    }
    fail("unbalanced braces in entry starting", start);
  }

  // Reads {...} with nesting; returns the content minus the outer braces.
  std::string read_braced() {
    const std::size_t start = pos_;
    int depth = 0;
    for (; pos_ < src_.size(); ++pos_) {
      char c = src_[pos_];
      if (c == '{') {
        ++depth;
      } else if (c == '}') {
        if (--depth == 0) {
          ++pos_;
          return std::string(src_.substr(start + 1, pos_ - start - 2));
        }
      }
    }
    fail("unbalanced braces in value starting", start);
  }

  std::string read_quoted() {
    const std::size_t start = pos_;
    ++pos_;
    int depth = 0;
    for (; pos_ < src_.size(); ++pos_) {
      char c = src_[pos_];
      if (c == '{') ++depth;
      if (c == '}') {
        if (--depth < 0) fail("unbalanced braces in quoted value starting", start);
      }
      if (c == '"' && depth == 0 && src_[pos_ - 1] != '\\') {
        ++pos_;
        return std::string(src_.substr(start + 1, pos_ - start - 2));
      }
    }
    fail("unterminated quoted value starting", start);
  }

  std::string read_value() {
    std::string out;
    while (true) {
      skip_ws();
      if (pos_ >= src_.size()) fail("unexpected end of input in value", pos_);
      char c = src_[pos_];
      if (c == '{') {
        out += read_braced();
      } else if (c == '"') {
        out += read_quoted();
      } else {
        const std::size_t start = pos_;
        std::string word = read_identifier();
        if (word.empty()) fail("expected a value", start);
        auto it = macros_.find(text::to_lower(word));
        out += it != macros_.end() ? it->second : word;
      }
      skip_ws();
      if (pos_ < src_.size() && src_[pos_] == '#') {
        ++pos_;
        continue;
      }
      return out;
    }
  }

  void parse_string_macro(char close, std::size_t start) {
    skip_ws();
    std::string name = text::to_lower(read_identifier());
    skip_ws();
    if (pos_ >= src_.size() || src_[pos_] != '=') fail("malformed @string", start);
    ++pos_;
    std::string value = read_value();
    skip_ws();
    if (pos_ >= src_.size() || src_[pos_] != close) fail("unbalanced braces in @string starting", start);
    ++pos_;
    macros_[name] = value;
  }

  BibEntry parse_entry(const std::string& type, char close, std::size_t start) {
    BibEntry e;
    e.entry_type = type;
    skip_ws();
    const std::size_t key_start = pos_;
    while (pos_ < src_.size() && src_[pos_] != ',' && src_[pos_] != close && !text::is_space(src_[pos_])) ++pos_;
    e.key = std::string(src_.substr(key_start, pos_ - key_start));
    if (e.key.empty()) fail("entry without key", start);
    while (true) {
      skip_ws();
      if (pos_ >= src_.size()) fail("unbalanced braces in entry starting", start);
      char c = src_[pos_];
      if (c == ',') {
        ++pos_;
        continue;
      }
      if (c == close) {
        ++pos_;
        break;
      }
      if (c == '@') fail("unbalanced braces in entry starting", start);
      const std::size_t field_start = pos_;
      std::string name = text::to_lower(read_identifier());
      if (name.empty()) fail("expected a field name", field_start);
      skip_ws();
      if (pos_ >= src_.size() || src_[pos_] != '=') fail("expected '=' after field " + name, pos_);
      ++pos_;
      e.fields[name] = read_value();
    }
    if (auto it = e.fields.find("title"); it != e.fields.end()) e.title = it->second;
    if (auto it = e.fields.find("booktitle"); it != e.fields.end()) {
      e.venue = it->second;
    } else if (auto jt = e.fields.find("journal"); jt != e.fields.end()) {
      e.venue = jt->second;
    }
    if (auto it = e.fields.find("year"); it != e.fields.end()) e.year = parse_year(it->second);
    if (auto it = e.fields.find("month"); it != e.fields.end()) e.month = parse_month(it->second);
    return e;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::map<std::string, std::string> macros_ = {
      {"jan", "1"}, {"feb", "2"}, {"mar", "3"}, {"apr", "4"},  {"may", "5"},  {"jun", "6"},
      {"jul", "7"}, {"aug", "8"}, {"sep", "9"}, {"oct", "10"}, {"nov", "11"}, {"dec", "12"},
  };
};

}  // namespace bibtex_detail

inline BibParseResult parse_bibtex(std::string_view src) { return bibtex_detail::Parser(src).run(); }

inline BibParseResult load_metadata(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open metadata file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_bibtex(ss.str());
}

}  // namespace contribscope
