#pragma once

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "venue.hpp"

namespace contribscope {

inline constexpr int kMinYear = 1900;
inline constexpr int kMaxYear = 2100;

struct PaperRecord {
  std::string paper_id;
  std::string title;
  std::string abstract;
  std::vector<std::string> sentences;
  VenueId venue;
  std::optional<int> year;  // nullopt when missing or outside [1900, 2100]
  std::optional<int> month;
  std::optional<long long> citation_count;
  std::set<std::string> event_keys;

  bool empty_abstract = false;
  bool metadata_resolved = false;

  friend bool operator==(const PaperRecord&, const PaperRecord&) = default;
};

inline std::optional<int> checked_year(long long y) {
  if (y < kMinYear || y > kMaxYear) return std::nullopt;
  return static_cast<int>(y);
}

/// Event key such as "ACL97": canonical venue plus two-digit year. Falls back
/// to the raw venue string for venues outside the canonical set.
inline std::string event_key(const VenueId& venue, std::optional<int> year) {
  std::string base = venue.canonical == Venue::Other ? venue.raw : venue_name(venue.canonical);
  if (year) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%02d", *year % 100);
    base += buf;
  }
  return base;
}

namespace detail {

inline const nlohmann::json* field(const nlohmann::json& obj, const char* name) {
  auto it = obj.find(name);
  if (it == obj.end() || it->is_null()) return nullptr;
  return &*it;
}

}  // namespace detail

/// Parse one paper-record JSON line. `line_no` is 1-based and only used for
/// error messages. `unparseable_year` is set when a year was given but could
/// not be accepted.
inline PaperRecord parse_paper_line(const std::string& line, std::size_t line_no,
                                    bool* unparseable_year = nullptr) {
  const std::string where = "line " + std::to_string(line_no) + ": ";
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(where + "malformed JSON (" + e.what() + ")");
  }
  if (!j.is_object()) throw DataError(where + "expected a JSON object");

  auto get_string = [&](const char* name, bool required) -> std::string {
    const auto* f = detail::field(j, name);
    if (!f) {
      if (required) throw DataError(where + "missing field " + name);
      return {};
    }
    if (!f->is_string()) throw DataError(where + "field " + name + " must be a string");
    return f->get<std::string>();
  };
  auto get_int = [&](const char* name) -> std::optional<long long> {
    const auto* f = detail::field(j, name);
    if (!f) return std::nullopt;
    if (!f->is_number_integer()) throw DataError(where + "field " + name + " must be an integer");
    return f->get<long long>();
  };

  PaperRecord p;
  p.paper_id = get_string("paper_id", true);
  if (p.paper_id.empty()) throw DataError(where + "empty paper_id");
  p.title = get_string("title", false);
  p.abstract = get_string("abstract", true);
  p.venue = make_venue(get_string("venue", false));
  if (auto y = get_int("year")) {
    p.year = checked_year(*y);
    if (!p.year && unparseable_year) *unparseable_year = true;
  }
  if (auto m = get_int("month")) {
    if (*m < 1 || *m > 12) throw DataError(where + "month out of range");
    p.month = static_cast<int>(*m);
  }
  if (auto c = get_int("citation_count")) {
    if (*c < 0) throw DataError(where + "negative citation_count");
    p.citation_count = *c;
  }
  if (const auto* ek = detail::field(j, "event_keys")) {
    if (!ek->is_array()) throw DataError(where + "event_keys must be an array");
    for (const auto& e : *ek) p.event_keys.insert(e.get<std::string>());
  }
  if (const auto* ss = detail::field(j, "sentences")) {
    if (!ss->is_array()) throw DataError(where + "sentences must be an array");
    for (const auto& s : *ss) p.sentences.push_back(s.get<std::string>());
  }
  p.empty_abstract = text::trim(p.abstract).empty();
  return p;
}

struct LoadPapersResult {
  std::vector<PaperRecord> papers;
  std::size_t unparseable_years = 0;
};

inline LoadPapersResult load_papers_from(std::istream& in) {
  LoadPapersResult out;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    bool bad_year = false;
    PaperRecord p = parse_paper_line(line, line_no, &bad_year);
    if (bad_year) ++out.unparseable_years;
    if (!seen.insert(p.paper_id).second)
      throw DataError("line " + std::to_string(line_no) + ": duplicate paper_id " + p.paper_id);
    out.papers.push_back(std::move(p));
  }
  return out;
}

inline LoadPapersResult load_papers_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open paper file " + path);
  return load_papers_from(in);
}

inline std::vector<PaperRecord> load_papers(const std::string& path) { return load_papers_report(path).papers; }

inline nlohmann::ordered_json paper_to_json(const PaperRecord& p) {
  nlohmann::ordered_json j;
  j["paper_id"] = p.paper_id;
  j["title"] = p.title;
  j["abstract"] = p.abstract;
  j["venue"] = p.venue.raw;
  if (p.year) j["year"] = *p.year;
  if (p.month) j["month"] = *p.month;
  if (p.citation_count) j["citation_count"] = *p.citation_count;
  if (!p.event_keys.empty()) j["event_keys"] = p.event_keys;
  if (!p.sentences.empty()) j["sentences"] = p.sentences;
  return j;
}

inline void save_papers(std::ostream& out, const std::vector<PaperRecord>& papers) {
  for (const auto& p : papers) out << paper_to_json(p).dump() << '\n';
}

inline void save_papers(const std::string& path, const std::vector<PaperRecord>& papers) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  save_papers(out, papers);
}

}  // namespace contribscope
