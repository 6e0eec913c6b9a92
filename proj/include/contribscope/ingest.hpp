#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "bibtex.hpp"
#include "paper.hpp"
#include "segment.hpp"

namespace contribscope {

struct IngestReport {
  std::size_t loaded = 0;
  std::size_t deduped = 0;  // records folded into an earlier record
  std::size_t unresolved_metadata = 0;
  std::size_t empty_abstracts = 0;
  std::size_t unparseable_years = 0;
  std::size_t excluded_by_venue = 0;
  std::size_t records = 0;  // records in the final corpus
  std::vector<std::string> warnings;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["loaded"] = loaded;
    j["deduped"] = deduped;
    j["unresolved_metadata"] = unresolved_metadata;
    j["empty_abstracts"] = empty_abstracts;
    j["unparseable_years"] = unparseable_years;
    j["excluded_by_venue"] = excluded_by_venue;
    j["records"] = records;
    j["warnings"] = warnings;
    return j;
  }
};

/// Identity used to collapse records listed under several events: the title
/// lowercased and reduced to alphanumerics, plus the year. Records without a
/// usable title fall back to their paper_id.
inline std::string dedup_key(const PaperRecord& p) {
  std::string norm;
  for (char ch : p.title) {
    auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c >= 0x80) norm.push_back(static_cast<char>(std::tolower(c)));
  }
  if (norm.empty()) return "id:" + p.paper_id;
  return norm + "|" + (p.year ? std::to_string(*p.year) : std::string("?"));
}

namespace ingest_detail {

// BibTeX titles carry case-protection braces; drop them for the record title.
inline std::string strip_braces(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c != '{' && c != '}') out.push_back(c);
  }
  return text::collapse_whitespace(out);
}

}  // namespace ingest_detail

/// Join metadata by paper_id (bibliographic fields override the record's
/// when present), then collapse records that share a dedup_key. The first
/// record in input order survives; its event_keys become the union.
inline std::vector<PaperRecord> merge_and_dedup(std::vector<PaperRecord> papers,
                                                const std::map<std::string, BibEntry>& meta,
                                                IngestReport* report = nullptr) {
  for (auto& p : papers) {
    auto it = meta.find(p.paper_id);
    if (it == meta.end()) {
      // Records that already carry resolved metadata stay resolved, which
      // keeps a second merge pass a no-op.
      if (!p.metadata_resolved && report) ++report->unresolved_metadata;
    } else {
      const BibEntry& e = it->second;
      if (!e.title.empty()) p.title = ingest_detail::strip_braces(e.title);
      if (!e.venue.empty()) p.venue = make_venue(ingest_detail::strip_braces(e.venue));
      if (e.year) p.year = e.year;
      if (e.month) p.month = e.month;
      p.metadata_resolved = true;
    }
    if (p.event_keys.empty()) p.event_keys.insert(event_key(p.venue, p.year));
  }

  std::vector<PaperRecord> out;
  out.reserve(papers.size());
  std::unordered_map<std::string, std::size_t> by_key;
  for (auto& p : papers) {
    auto [it, fresh] = by_key.emplace(dedup_key(p), out.size());
    if (fresh) {
      out.push_back(std::move(p));
      continue;
    }
    PaperRecord& keep = out[it->second];
    keep.event_keys.insert(p.event_keys.begin(), p.event_keys.end());
    if (!keep.citation_count && p.citation_count) keep.citation_count = p.citation_count;
    if (report) ++report->deduped;
  }
  return out;
}

/// Segment every non-empty abstract that has not been segmented yet.
inline void segment_corpus(std::vector<PaperRecord>& papers) {
  for (auto& p : papers) {
    if (p.empty_abstract || !p.sentences.empty()) continue;
    p.sentences = segment_sentences(p.abstract);
  }
}

/// Keep only papers whose canonical venue is in `allow` (empty = keep all).
inline std::vector<PaperRecord> filter_venues(std::vector<PaperRecord> papers, const std::set<Venue>& allow,
                                              IngestReport* report = nullptr) {
  if (allow.empty()) return papers;
  std::vector<PaperRecord> out;
  for (auto& p : papers) {
    if (allow.count(p.venue.canonical)) {
      out.push_back(std::move(p));
    } else if (report) {
      ++report->excluded_by_venue;
    }
  }
  return out;
}

struct IngestResult {
  std::vector<PaperRecord> papers;
  IngestReport report;
};

/// Full ingestion: load, join metadata, dedup, filter by venue, segment.
inline IngestResult ingest(const std::string& papers_path, const std::optional<std::string>& metadata_path,
                           const std::set<Venue>& allow) {
  IngestResult r;
  auto loaded = load_papers_report(papers_path);
  r.report.loaded = loaded.papers.size();
  r.report.unparseable_years = loaded.unparseable_years;
  BibParseResult meta;
  if (metadata_path) {
    meta = load_metadata(*metadata_path);
    r.report.warnings = meta.warnings;
  }
  auto merged = merge_and_dedup(std::move(loaded.papers), meta.entries, &r.report);
  r.papers = filter_venues(std::move(merged), allow, &r.report);
  for (const auto& p : r.papers) {
    if (p.empty_abstract) ++r.report.empty_abstracts;
  }
  segment_corpus(r.papers);
  r.report.records = r.papers.size();
  return r;
}

}  // namespace contribscope
