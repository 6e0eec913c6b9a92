#pragma once

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "error.hpp"
#include "paper.hpp"
#include "rng.hpp"
#include "taxonomy.hpp"

namespace contribscope {

struct AnnotatedSentence {
  std::string paper_id;
  std::size_t sentence_index = 0;
  std::string text;
  LabelSet gold;
  std::optional<std::string> annotator_id;

  friend bool operator==(const AnnotatedSentence&, const AnnotatedSentence&) = default;
};

inline AnnotatedSentence parse_annotation_line(const std::string& line, std::size_t line_no) {
  const std::string where = "line " + std::to_string(line_no) + ": ";
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(where + "malformed JSON (" + e.what() + ")");
  }
  if (!j.is_object()) throw DataError(where + "expected a JSON object");
  AnnotatedSentence a;
  try {
    a.paper_id = j.at("paper_id").get<std::string>();
    const auto idx = j.at("sentence_index").get<long long>();
    if (idx < 0) throw DataError(where + "negative sentence_index");
    a.sentence_index = static_cast<std::size_t>(idx);
    a.text = j.value("text", std::string());
    if (auto it = j.find("annotator_id"); it != j.end() && !it->is_null()) a.annotator_id = it->get<std::string>();
    for (const auto& name : j.at("labels")) a.gold.insert(parse_label(name.get<std::string>()));
  } catch (const DataError& e) {
    if (std::string(e.what()).rfind("line ", 0) == 0) throw;
    throw DataError(where + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw DataError(where + "invalid field (" + e.what() + ")");
  }
  return a;
}

/// Load annotation JSONL. When `papers` is given, every sentence_index is
/// checked against the segmented sentence count of its paper record.
inline std::vector<AnnotatedSentence> load_annotations(const std::string& path,
                                                       const std::vector<PaperRecord>* papers = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open annotation file " + path);
  std::unordered_map<std::string, std::size_t> sentence_counts;
  if (papers) {
    for (const auto& p : *papers) sentence_counts[p.paper_id] = p.sentences.size();
  }
  std::set<std::tuple<std::string, std::size_t, std::string>> seen;
  std::vector<AnnotatedSentence> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    AnnotatedSentence a = parse_annotation_line(line, line_no);
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (!seen.emplace(a.paper_id, a.sentence_index, a.annotator_id.value_or("")).second)
      throw DataError(where + "duplicate (paper_id, sentence_index, annotator_id)");
    if (papers) {
      auto it = sentence_counts.find(a.paper_id);
      if (it == sentence_counts.end()) throw DataError(where + "unknown paper_id " + a.paper_id);
      if (a.sentence_index >= it->second)
        throw DataError(where + "sentence_index " + std::to_string(a.sentence_index) + " out of range for paper " +
                        a.paper_id);
    }
    out.push_back(std::move(a));
  }
  return out;
}

inline nlohmann::ordered_json annotation_to_json(const AnnotatedSentence& a) {
  nlohmann::ordered_json j;
  j["paper_id"] = a.paper_id;
  j["sentence_index"] = a.sentence_index;
  j["text"] = a.text;
  j["labels"] = a.gold.names();
  if (a.annotator_id) j["annotator_id"] = *a.annotator_id;
  return j;
}

inline void save_annotations(const std::string& path, const std::vector<AnnotatedSentence>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  for (const auto& a : rows) out << annotation_to_json(a).dump() << '\n';
}

// ---------------------------------------------------------------------------
// Paper-level splits

struct SplitManifest {
  std::vector<std::string> train, val, test;  // each sorted
  std::uint64_t seed = 0;

  friend bool operator==(const SplitManifest&, const SplitManifest&) = default;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["seed"] = seed;
    j["train"] = train;
    j["val"] = val;
    j["test"] = test;
    return j;
  }
  static SplitManifest from_json(const nlohmann::json& j) {
    SplitManifest m;
    m.seed = j.at("seed").get<std::uint64_t>();
    m.train = j.at("train").get<std::vector<std::string>>();
    m.val = j.at("val").get<std::vector<std::string>>();
    m.test = j.at("test").get<std::vector<std::string>>();
    return m;
  }
};

inline constexpr std::size_t kMinSplitPapers = 10;

/// Uniform 70/15/15 split over papers: floor(0.70 n) train, floor(0.15 n)
/// validation, remainder test.
inline SplitManifest split_corpus(const std::set<std::string>& papers, std::uint64_t seed) {
  const std::size_t n = papers.size();
  if (n < kMinSplitPapers)
    throw DataError("split needs at least " + std::to_string(kMinSplitPapers) + " papers, got " + std::to_string(n));
  std::vector<std::string> ids(papers.begin(), papers.end());
  Rng rng(seed);
  shuffle(ids, rng);
  const std::size_t n_train = n * 70 / 100;
  const std::size_t n_val = n * 15 / 100;
  SplitManifest m;
  m.seed = seed;
  m.train.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
  m.val.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train),
               ids.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  m.test.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), ids.end());
  std::sort(m.train.begin(), m.train.end());
  std::sort(m.val.begin(), m.val.end());
  std::sort(m.test.begin(), m.test.end());
  return m;
}

inline std::set<std::string> annotated_papers(const std::vector<AnnotatedSentence>& rows) {
  std::set<std::string> out;
  for (const auto& a : rows) out.insert(a.paper_id);
  return out;
}

inline std::vector<AnnotatedSentence> select_papers(const std::vector<AnnotatedSentence>& rows,
                                                    const std::vector<std::string>& ids) {
  std::set<std::string> keep(ids.begin(), ids.end());
  std::vector<AnnotatedSentence> out;
  for (const auto& a : rows) {
    if (keep.count(a.paper_id)) out.push_back(a);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Corpus statistics

struct StatsReport {
  std::size_t papers = 0;
  std::size_t sentences = 0;
  std::size_t contribution_statements = 0;
  std::size_t multi_label_statements = 0;
  double sentences_per_abstract = 0.0;
  double contribution_sentences_per_abstract = 0.0;
  double multi_label_fraction = 0.0;  // percent of contribution statements
  std::array<std::size_t, kNumLabels> label_counts{};
  std::array<double, kNumLabels> label_share{};  // percent of label assignments
  std::map<std::string, std::pair<std::size_t, double>> venue_sentence_mean;  // venue -> (papers, mean)

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["papers"] = papers;
    j["sentences"] = sentences;
    j["contribution_statements"] = contribution_statements;
    j["multi_label_statements"] = multi_label_statements;
    j["sentences_per_abstract"] = sentences_per_abstract;
    j["contribution_sentences_per_abstract"] = contribution_sentences_per_abstract;
    j["multi_label_percent"] = multi_label_fraction;
    nlohmann::ordered_json labels;
    for (Label l : kAllLabels) {
      labels[render_label(l)] = {{"count", label_counts[index_of(l)]}, {"share_percent", label_share[index_of(l)]}};
    }
    j["labels"] = labels;
    nlohmann::ordered_json venues;
    for (const auto& [v, pm] : venue_sentence_mean) venues[v] = {{"papers", pm.first}, {"mean_sentences", pm.second}};
    j["venues"] = venues;
    return j;
  }

  std::string to_text() const {
    char buf[160];
    std::string out;
    auto line = [&](const char* fmt, auto... args) {
      std::snprintf(buf, sizeof buf, fmt, args...);
      out += buf;
    };
    line("%-40s %12zu\n", "papers", papers);
    line("%-40s %12zu\n", "sentences", sentences);
    line("%-40s %12zu\n", "contribution statements", contribution_statements);
    line("%-40s %12.2f\n", "sentences per abstract", sentences_per_abstract);
    line("%-40s %12.2f\n", "contribution sentences per abstract", contribution_sentences_per_abstract);
    line("%-40s %11.1f%%\n", "multi-label statements", multi_label_fraction);
    out += "\n";
    line("%-12s %-12s %10s %10s\n", "Typ.", "Sub-typ.", "Count", "Prop.(%)");
    for (Label l : kAllLabels) {
      line("%-12s %-12s %10zu %10.1f\n", kind_of(l) == ContributionKind::Knowledge ? "Knowledge" : "Artifact",
           render_label(l).c_str(), label_counts[index_of(l)], label_share[index_of(l)]);
    }
    if (!venue_sentence_mean.empty()) {
      out += "\n";
      line("%-12s %10s %14s\n", "Venue", "Papers", "Avg.sentences");
      for (const auto& [v, pm] : venue_sentence_mean) line("%-12s %10zu %14.2f\n", v.c_str(), pm.first, pm.second);
    }
    return out;
  }
};

/// One annotation per (paper_id, sentence_index): the one with the smallest
/// annotator_id when a sentence was annotated more than once.
inline std::map<std::pair<std::string, std::size_t>, const AnnotatedSentence*> unique_gold(
    const std::vector<AnnotatedSentence>& rows) {
  std::map<std::pair<std::string, std::size_t>, const AnnotatedSentence*> unique;
  for (const auto& a : rows) {
    auto [it, fresh] = unique.emplace(std::make_pair(a.paper_id, a.sentence_index), &a);
    if (!fresh && a.annotator_id.value_or("") < it->second->annotator_id.value_or("")) it->second = &a;
  }
  return unique;
}
// The result points into `rows`.
void unique_gold(std::vector<AnnotatedSentence>&&) = delete;

/// Statistics over gold annotations. Where a sentence carries several
/// annotations (dual annotation), the one with the smallest annotator_id is
/// used. A contribution statement is any sentence with a non-empty gold set.
inline StatsReport corpus_stats(const std::vector<AnnotatedSentence>& sentences,
                                const std::vector<PaperRecord>& papers) {
  const auto unique = unique_gold(sentences);

  StatsReport r;
  std::map<std::string, std::size_t> per_paper;
  for (const auto& [key, a] : unique) {
    ++per_paper[key.first];
    ++r.sentences;
    if (a->gold.empty()) continue;
    ++r.contribution_statements;
    if (a->gold.size() > 1) ++r.multi_label_statements;
    for (Label l : a->gold.members()) ++r.label_counts[index_of(l)];
  }
  r.papers = per_paper.size();
  if (r.papers > 0) {
    r.sentences_per_abstract = static_cast<double>(r.sentences) / static_cast<double>(r.papers);
    r.contribution_sentences_per_abstract =
        static_cast<double>(r.contribution_statements) / static_cast<double>(r.papers);
  }
  if (r.contribution_statements > 0) {
    r.multi_label_fraction =
        100.0 * static_cast<double>(r.multi_label_statements) / static_cast<double>(r.contribution_statements);
  }
  std::size_t assignments = 0;
  for (auto c : r.label_counts) assignments += c;
  if (assignments > 0) {
    for (std::size_t i = 0; i < kNumLabels; ++i)
      r.label_share[i] = 100.0 * static_cast<double>(r.label_counts[i]) / static_cast<double>(assignments);
  }

  // Per-venue abstract length: segmented sentence count when available,
  // otherwise the number of annotated sentences for that paper.
  std::map<std::string, std::pair<std::size_t, std::size_t>> venue_tot;  // venue -> (papers, sentences)
  for (const auto& p : papers) {
    std::size_t n = p.sentences.size();
    if (n == 0) {
      auto it = per_paper.find(p.paper_id);
      if (it == per_paper.end()) continue;
      n = it->second;
    }
    auto& t = venue_tot[venue_name(p.venue.canonical)];
    ++t.first;
    t.second += n;
  }
  for (const auto& [v, t] : venue_tot)
    r.venue_sentence_mean[v] = {t.first, static_cast<double>(t.second) / static_cast<double>(t.first)};
  return r;
}

}  // namespace contribscope
