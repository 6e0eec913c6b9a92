#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "text.hpp"

namespace contribscope {

enum class Venue {
  ACL,
  EMNLP,
  NAACL,
  EACL,
  AACL,
  Findings,
  CoNLL,
  StarSem,
  TACL,
  CL,
  Other,
};

inline constexpr std::array<Venue, 11> kAllVenues = {
    Venue::ACL,   Venue::EMNLP,   Venue::NAACL, Venue::EACL, Venue::AACL,  Venue::Findings,
    Venue::CoNLL, Venue::StarSem, Venue::TACL,  Venue::CL,   Venue::Other,
};

inline constexpr std::array<std::string_view, 11> kVenueNames = {
    "ACL", "EMNLP", "NAACL", "EACL", "AACL", "FINDINGS", "CONLL", "STARSEM", "TACL", "CL", "OTHER",
};

inline std::string venue_name(Venue v) { return std::string(kVenueNames[static_cast<std::size_t>(v)]); }

/// Parse a canonical venue name (as printed by venue_name), case-insensitive.
inline Venue parse_venue_name(std::string_view s) {
  std::string upper(text::trim(s));
  for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (std::size_t i = 0; i < kVenueNames.size(); ++i) {
    if (upper == kVenueNames[i]) return kAllVenues[i];
  }
  throw UsageError("unknown venue '" + std::string(s) + "'");
}

struct VenueId {
  Venue canonical = Venue::Other;
  std::string raw;
  friend bool operator==(const VenueId&, const VenueId&) = default;
};

namespace detail {

// Lowercase tokens with trailing year digits stripped ("EACL97" -> "eacl").
// '*' is kept so that "*SEM" survives.
inline std::vector<std::string> venue_tokens(std::string_view raw) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    while (cur.size() > 1 && std::isdigit(static_cast<unsigned char>(cur.back()))) cur.pop_back();
    if (!cur.empty()) out.push_back(cur);
    cur.clear();
  };
  for (char ch : raw) {
    auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c == '*') {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

}  // namespace detail

/// Map a raw booktitle/journal/event string onto a canonical venue. Rules are
/// checked in order; the first match wins, OTHER otherwise.
inline Venue normalize_venue(std::string_view raw) {
  const std::string lower = text::collapse_whitespace(text::to_lower(raw));
  const auto toks = detail::venue_tokens(raw);
  auto has_tok = [&](std::string_view t) {
    for (const auto& x : toks) {
      if (x == t) return true;
    }
    return false;
  };
  auto has = [&](std::string_view phrase) { return lower.find(phrase) != std::string::npos; };

  if (has("findings")) return Venue::Findings;
  if (has_tok("tacl") || has("transactions of the association for computational linguistics"))
    return Venue::TACL;
  if (has_tok("*sem") || has_tok("starsem") || has("lexical and computational semantics"))
    return Venue::StarSem;
  if (has_tok("conll") || has("computational natural language learning")) return Venue::CoNLL;
  if (has_tok("emnlp") || has("empirical methods in natural language processing")) return Venue::EMNLP;
  if (has_tok("naacl") || has("north american chapter")) return Venue::NAACL;
  if (has_tok("eacl") || has("european chapter")) return Venue::EACL;
  if (has_tok("aacl") || has("asia-pacific chapter") || has("asia pacific chapter")) return Venue::AACL;
  if (has_tok("acl") || has("annual meeting of the association for computational linguistics"))
    return Venue::ACL;
  if (text::trim(lower) == "computational linguistics" || has_tok("cl")) return Venue::CL;
  return Venue::Other;
}

inline VenueId make_venue(std::string raw) {
  VenueId v;
  v.canonical = normalize_venue(raw);
  v.raw = std::move(raw);
  return v;
}

}  // namespace contribscope
