#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "text.hpp"

namespace contribscope {

/// Tokens that end in a period without ending a sentence. Compared
/// case-insensitively against the whitespace-delimited word before a break.
inline constexpr std::array<std::string_view, 34> kAbbreviations = {
    "al.",    "e.g.",   "i.e.",  "fig.",  "figs.", "vs.",  "cf.",  "eq.",   "eqs.",
    "sec.",   "tab.",   "no.",   "nos.",  "dr.",   "mr.",  "mrs.", "ms.",   "prof.",
    "jr.",    "sr.",    "st.",   "inc.",  "ltd.",  "co.",  "corp.", "approx.", "resp.",
    "viz.",   "ca.",    "ref.",  "refs.", "ch.",   "vol.", "pp.",
};

namespace segment_detail {

inline bool is_abbreviation(std::string_view word) {
  // Strip leading brackets/quotes so "(e.g." still matches.
  while (!word.empty() && (word.front() == '(' || word.front() == '[' || word.front() == '"' ||
                           word.front() == '\'')) {
    word.remove_prefix(1);
  }
  const std::string lower = text::to_lower(word);
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), lower) != kAbbreviations.end();
}

inline bool is_closer(char c) { return c == ')' || c == ']' || c == '"' || c == '\''; }

inline bool starts_sentence(std::string_view rest) {
  std::size_t i = 0;
  while (i < rest.size() && (rest[i] == '(' || rest[i] == '[' || rest[i] == '"' || rest[i] == '\'')) ++i;
  if (i >= rest.size()) return false;
  auto c = static_cast<unsigned char>(rest[i]);
  return std::isupper(c) || std::isdigit(c);
}

}  // namespace segment_detail

/// Rule-based splitter: break after '.', '!' or '?' (plus any closing
/// brackets/quotes) when followed by whitespace and an uppercase letter or
/// digit, unless the word ending in '.' is a listed abbreviation. Sentences
/// are substrings of the whitespace-collapsed abstract.
inline std::vector<std::string> segment_sentences(std::string_view abstract) {
  const std::string norm = text::collapse_whitespace(abstract);
  if (norm.empty()) throw DataError("cannot segment an empty abstract");

  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < norm.size(); ++i) {
    const char c = norm[i];
    if (c != '.' && c != '!' && c != '?') continue;
    std::size_t end = i + 1;
    while (end < norm.size() && segment_detail::is_closer(norm[end])) ++end;
    if (end >= norm.size() || norm[end] != ' ') continue;
    if (!segment_detail::starts_sentence(std::string_view(norm).substr(end + 1))) continue;
    if (c == '.') {
      const std::size_t word_start = norm.rfind(' ', i);
      const std::size_t ws = word_start == std::string::npos ? 0 : word_start + 1;
      std::string_view word = std::string_view(norm).substr(ws, i + 1 - ws);
      if (segment_detail::is_abbreviation(word)) continue;
    }
    out.push_back(norm.substr(start, end - start));
    start = end + 1;
    i = end;
  }
  if (start < norm.size()) out.push_back(norm.substr(start));
  return out;
}

}  // namespace contribscope
