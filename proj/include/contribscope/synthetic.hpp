#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "annotations.hpp"
#include "paper.hpp"
#include "rng.hpp"
#include "taxonomy.hpp"
#include "venue.hpp"

// Schema-compatible synthetic corpora. Every contribution label is signalled
// by one trigger word, so gold labels follow a keyword rule that a linear
// model can learn exactly.
namespace contribscope::synthetic {

inline constexpr std::array<std::string_view, kNumLabels> kTriggers = {
    "benchmark",   // k-dataset
    "morphology",  // k-language
    "transformers",  // k-method
    "speakers",    // k-people
    "summarization",  // k-task
    "corpus",      // a-dataset
    "architecture",  // a-method
    "formulate",   // a-task
};

// Relative label frequencies (percent of label assignments).
inline constexpr std::array<double, kNumLabels> kLabelWeights = {5.1, 4.0, 12.6, 9.2, 36.1, 2.2, 27.2, 3.6};

inline constexpr std::array<std::string_view, 10> kOpeners = {
    "We", "Our study", "This paper", "In addition we", "Experiments", "Furthermore the analysis",
    "Results", "Overall this work", "Finally we", "Moreover our evaluation",
};

inline constexpr std::array<std::string_view, 60> kFiller = {
    "show",     "that",       "the",       "model",    "results",   "improve",  "over",      "strong",
    "baselines", "across",    "several",   "languages", "using",    "large",    "scale",     "data",
    "we",       "find",       "observe",   "approach", "performance", "accuracy", "evaluation", "settings",
    "method",   "based",      "on",        "neural",   "networks",  "training", "learning",  "representations",
    "text",     "sentences",  "words",     "with",     "without",   "compared", "to",        "prior",
    "work",     "experiments", "demonstrate", "significant", "gains", "in",     "both",      "quality",
    "efficiency", "domain",   "adaptation", "robust",  "simple",    "effective", "further",  "analysis",
    "reveals",  "consistent", "patterns",  "across",
};

inline constexpr std::array<std::string_view, 12> kVenueStrings = {
    "Proceedings of the Annual Meeting of the Association for Computational Linguistics",
    "Proceedings of the Conference on Empirical Methods in Natural Language Processing",
    "Proceedings of the Conference of the North American Chapter of the Association for Computational Linguistics",
    "Proceedings of the Conference of the European Chapter of the Association for Computational Linguistics",
    "Proceedings of the Conference of the Asia-Pacific Chapter of the Association for Computational Linguistics",
    "Findings of the Association for Computational Linguistics: EMNLP",
    "Proceedings of the Conference on Computational Natural Language Learning",
    "Proceedings of the Joint Conference on Lexical and Computational Semantics",
    "Transactions of the Association for Computational Linguistics",
    "Computational Linguistics",
    "ACL",
    "EMNLP",
};
inline constexpr std::array<double, 12> kVenueWeights = {20, 18, 10, 6, 2, 8, 5, 3, 4, 3, 10, 11};

struct Options {
  std::size_t papers = 1995;
  std::uint64_t seed = 7;
  int year_min = 1980;
  int year_max = 2023;
  std::size_t dual_listed = 0;       // extra 1997 EACL copies of 1997 ACL papers
  std::size_t second_annotator = 0;  // papers re-annotated by a noisy second annotator
  double contribution_rate = 2.95 / 5.42;
  double flip_present = 0.15;  // second annotator drops a present label
  double flip_absent = 0.02;   // second annotator adds an absent label
};

struct Corpus {
  std::vector<PaperRecord> papers;           // including dual-listed copies
  std::vector<AnnotatedSentence> gold;       // one row per sentence, no annotator id
  std::vector<AnnotatedSentence> dual;       // A1 and A2 rows for the re-annotated papers
  std::string bibtex;
};

namespace detail {

template <std::size_t N>
std::size_t weighted_pick(Rng& rng, const std::array<double, N>& w) {
  double total = 0.0;
  for (double x : w) total += x;
  double u = uniform_unit(rng) * total;
  for (std::size_t i = 0; i < N; ++i) {
    if (u < w[i]) return i;
    u -= w[i];
  }
  return N - 1;
}

inline std::string filler(Rng& rng, std::size_t n) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    out += ' ';
    out += kFiller[uniform_index(rng, kFiller.size())];
  }
  return out;
}

inline LabelSet draw_labels(Rng& rng, double contribution_rate) {
  LabelSet s;
  if (uniform_unit(rng) >= contribution_rate) return s;
  const double u = uniform_unit(rng);
  const std::size_t k = u < 0.424 ? 1 : (u < 0.874 ? 2 : 3);
  auto w = kLabelWeights;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t pick = weighted_pick(rng, w);
    s.insert(kAllLabels[pick]);
    w[pick] = 0.0;
  }
  return s;
}

inline std::string make_sentence(Rng& rng, LabelSet labels) {
  std::string s(kOpeners[uniform_index(rng, kOpeners.size())]);
  s += filler(rng, 1 + uniform_index(rng, 3));
  for (Label l : labels.members()) {
    s += ' ';
    s += kTriggers[index_of(l)];
    s += filler(rng, 1 + uniform_index(rng, 3));
  }
  s += filler(rng, 1 + uniform_index(rng, 2));
  s += '.';
  return s;
}

inline std::string bib_entry(const PaperRecord& p) {
  const bool journal = p.venue.canonical == Venue::TACL || p.venue.canonical == Venue::CL;
  std::string e = journal ? "@article{" : "@inproceedings{";
  e += p.paper_id + ",\n    title = \"{" + p.title + "}\",\n";
  e += std::string("    ") + (journal ? "journal" : "booktitle") + " = \"" + p.venue.raw + "\",\n";
  if (p.month) {
    static constexpr const char* kMon[] = {"jan", "feb", "mar", "apr", "may", "jun",
                                           "jul", "aug", "sep", "oct", "nov", "dec"};
    e += std::string("    month = ") + kMon[*p.month - 1] + ",\n";
  }
  e += "    year = \"" + std::to_string(*p.year) + "\",\n}\n\n";
  return e;
}

}  // namespace detail

/// Deterministic corpus for a given seed. Paper ids are "S<year>-<n>"; the
/// first `dual_listed` papers dated 1997 in the ACL venue get a second record
/// under EACL with the same title.
inline Corpus make_corpus(const Options& opt) {
  Rng rng(opt.seed);
  Corpus c;
  c.papers.reserve(opt.papers + opt.dual_listed);
  const int span = opt.year_max - opt.year_min + 1;

  for (std::size_t n = 0; n < opt.papers; ++n) {
    PaperRecord p;
    int year;
    std::string venue_raw;
    if (n < opt.dual_listed) {
      year = 1997;
      venue_raw = "ACL";
    } else {
      // Later years carry more papers.
      const double u = uniform_unit(rng);
      year = opt.year_min + static_cast<int>(std::floor(std::sqrt(u) * span));
      if (year > opt.year_max) year = opt.year_max;
      venue_raw = std::string(kVenueStrings[detail::weighted_pick(rng, kVenueWeights)]);
    }
    char id[32];
    std::snprintf(id, sizeof id, "S%04d-%05zu", year, n);
    p.paper_id = id;
    p.title = "Study " + std::to_string(n) + " on" + detail::filler(rng, 3);
    p.venue = make_venue(venue_raw);
    p.year = year;
    p.month = 1 + static_cast<int>(uniform_index(rng, 12));
    // Heavy-tailed citation counts; roughly one paper in twenty lacks one.
    if (uniform_unit(rng) >= 0.05) {
      const double g = std::sqrt(-2.0 * std::log(1.0 - uniform_unit(rng))) * std::cos(6.283185307179586 * uniform_unit(rng));
      p.citation_count = static_cast<long long>(std::floor(std::exp(3.5 + 1.3 * g)));
    }
    const std::size_t n_sent = 3 + uniform_index(rng, 6);
    const bool annotate_twice = n < opt.second_annotator;
    for (std::size_t i = 0; i < n_sent; ++i) {
      const LabelSet labels = detail::draw_labels(rng, opt.contribution_rate);
      std::string s = detail::make_sentence(rng, labels);
      if (!p.abstract.empty()) p.abstract += ' ';
      p.abstract += s;
      p.sentences.push_back(s);
      c.gold.push_back({p.paper_id, i, s, labels, std::nullopt});
      if (annotate_twice) {
        c.dual.push_back({p.paper_id, i, s, labels, std::string("A1")});
        LabelSet other = labels;
        for (Label l : kAllLabels) {
          const double u = uniform_unit(rng);
          if (labels.contains(l) && u < opt.flip_present) other.erase(l);
          if (!labels.contains(l) && u < opt.flip_absent) other.insert(l);
        }
        c.dual.push_back({p.paper_id, i, s, other, std::string("A2")});
      }
    }
    c.papers.push_back(std::move(p));
  }
  for (std::size_t n = 0; n < opt.dual_listed && n < opt.papers; ++n) {
    PaperRecord copy = c.papers[n];
    copy.paper_id = "E1997-" + std::to_string(n);
    copy.venue = make_venue("EACL");
    copy.citation_count.reset();
    c.papers.push_back(std::move(copy));
  }
  for (const auto& p : c.papers) c.bibtex += detail::bib_entry(p);
  return c;
}

/// Papers as they appear in a raw paper-record file (no segmentation).
inline std::vector<PaperRecord> raw_records(std::vector<PaperRecord> papers) {
  for (auto& p : papers) p.sentences.clear();
  return papers;
}

}  // namespace contribscope::synthetic
