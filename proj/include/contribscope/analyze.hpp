#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "annotations.hpp"
#include "error.hpp"
#include "paper.hpp"
#include "table.hpp"
#include "taxonomy.hpp"
#include "venue.hpp"

namespace contribscope {

/// A paper joined with the label sets of its sentences (gold or predicted).
struct LabeledPaper {
  std::string paper_id;
  Venue venue = Venue::Other;
  std::optional<int> year;
  std::optional<long long> citation_count;
  std::vector<LabelSet> sentence_labels;

  LabelSet label_union() const {
    LabelSet u;
    for (auto s : sentence_labels) u |= s;
    return u;
  }
};

/// Join sentence rows to the corpus by paper_id. Every corpus paper appears,
/// including those without labeled rows (they carry no contributions).
inline std::vector<LabeledPaper> join_labels(const std::vector<PaperRecord>& papers,
                                             const std::vector<AnnotatedSentence>& rows) {
  std::unordered_map<std::string, std::size_t> idx;
  std::vector<LabeledPaper> out;
  out.reserve(papers.size());
  for (const auto& p : papers) {
    idx[p.paper_id] = out.size();
    out.push_back({p.paper_id, p.venue.canonical, p.year, p.citation_count, {}});
  }
  for (const auto& r : rows) {
    auto it = idx.find(r.paper_id);
    if (it == idx.end()) continue;
    auto& lp = out[it->second];
    if (lp.sentence_labels.size() <= r.sentence_index) lp.sentence_labels.resize(r.sentence_index + 1);
    lp.sentence_labels[r.sentence_index] |= r.gold;
  }
  return out;
}

// ---------------------------------------------------------------------------
// PMI

struct CooccurrenceMatrix {
  std::size_t statements = 0;  // statements with at least one label
  std::array<std::size_t, kNumLabels> counts{};
  std::array<double, kNumLabels> marginal{};
  std::array<std::array<std::size_t, kNumLabels>, kNumLabels> joint{};
  std::array<std::array<std::optional<double>, kNumLabels>, kNumLabels> pmi{};  // nullopt: joint count 0
};

/// PMI(a, b) = log2(p(a, b) / (p(a) p(b))) over statements carrying at least
/// one label; no smoothing. The diagonal is self-PMI, -log2 p(a).
inline CooccurrenceMatrix pmi_matrix(const std::vector<LabelSet>& statements) {
  CooccurrenceMatrix m;
  for (const auto& s : statements) {
    if (s.empty()) continue;
    ++m.statements;
    for (Label a : kAllLabels) {
      if (!s.contains(a)) continue;
      ++m.counts[index_of(a)];
      for (Label b : kAllLabels) {
        if (s.contains(b)) ++m.joint[index_of(a)][index_of(b)];
      }
    }
  }
  if (m.statements == 0) throw DataError("pmi_matrix needs at least one labeled statement");
  const double n = static_cast<double>(m.statements);
  for (std::size_t a = 0; a < kNumLabels; ++a) m.marginal[a] = static_cast<double>(m.counts[a]) / n;
  for (std::size_t a = 0; a < kNumLabels; ++a) {
    for (std::size_t b = 0; b < kNumLabels; ++b) {
      if (m.joint[a][b] == 0) continue;
      const double pab = static_cast<double>(m.joint[a][b]) / n;
      m.pmi[a][b] = std::log2(pab / (m.marginal[a] * m.marginal[b]));
    }
  }
  return m;
}

inline AnalysisTable pmi_table(const CooccurrenceMatrix& m) {
  AnalysisTable t{"pmi", {"label_a", "label_b", "joint_count", "p_a", "p_b", "pmi"}, {}, {}};
  t.meta.emplace_back("statements", static_cast<long long>(m.statements));
  for (Label a : kAllLabels) {
    for (Label b : kAllLabels) {
      const auto i = index_of(a), j = index_of(b);
      Cell v = m.pmi[i][j] ? Cell(*m.pmi[i][j]) : Cell(std::monostate{});
      t.add_row({render_label(a), render_label(b), static_cast<long long>(m.joint[i][j]), m.marginal[i],
                 m.marginal[j], v});
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Yearly trends

struct TrendSeries {
  std::vector<int> years;  // ascending
  std::vector<std::size_t> papers;
  std::vector<std::array<double, kNumLabels>> share;  // percent of papers
  std::size_t papers_without_year = 0;
};

/// share(year, label) = 100 * papers of that year with >= 1 sentence carrying
/// the label / papers of that year.
inline TrendSeries yearly_type_share(const std::vector<LabeledPaper>& corpus) {
  std::map<int, std::pair<std::size_t, std::array<std::size_t, kNumLabels>>> acc;
  TrendSeries ts;
  for (const auto& p : corpus) {
    if (!p.year) {
      ++ts.papers_without_year;
      continue;
    }
    auto& [n, hits] = acc[*p.year];
    ++n;
    const LabelSet u = p.label_union();
    for (Label l : kAllLabels) hits[index_of(l)] += u.contains(l) ? 1 : 0;
  }
  for (const auto& [year, v] : acc) {
    ts.years.push_back(year);
    ts.papers.push_back(v.first);
    std::array<double, kNumLabels> s{};
    for (std::size_t i = 0; i < kNumLabels; ++i)
      s[i] = 100.0 * static_cast<double>(v.second[i]) / static_cast<double>(v.first);
    ts.share.push_back(s);
  }
  return ts;
}

/// Trailing rolling mean over the last `window` listed years (fewer at the
/// start of the series).
inline TrendSeries rolling_mean(const TrendSeries& ts, std::size_t window) {
  if (window == 0) throw UsageError("rolling window must be positive");
  TrendSeries out = ts;
  for (std::size_t k = 0; k < ts.years.size(); ++k) {
    const std::size_t lo = k + 1 >= window ? k + 1 - window : 0;
    std::array<double, kNumLabels> s{};
    for (std::size_t j = lo; j <= k; ++j) {
      for (std::size_t i = 0; i < kNumLabels; ++i) s[i] += ts.share[j][i];
    }
    for (auto& x : s) x /= static_cast<double>(k - lo + 1);
    out.share[k] = s;
  }
  return out;
}

inline AnalysisTable trend_table(const TrendSeries& ts, const std::string& name) {
  AnalysisTable t{name, {"year", "label", "papers", "share_percent"}, {}, {}};
  t.meta.emplace_back("papers_without_year", static_cast<long long>(ts.papers_without_year));
  for (std::size_t k = 0; k < ts.years.size(); ++k) {
    for (Label l : kAllLabels) {
      t.add_row({static_cast<long long>(ts.years[k]), render_label(l), static_cast<long long>(ts.papers[k]),
                 ts.share[k][index_of(l)]});
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Venue profiles

struct VenueProfile {
  Venue venue = Venue::Other;
  std::size_t papers = 0;
  std::array<double, kNumLabels> share{};  // fraction of the venue's papers
};

/// One profile per canonical venue with at least one paper, in canonical
/// venue order.
inline std::vector<VenueProfile> venue_profiles(const std::vector<LabeledPaper>& corpus) {
  std::array<std::size_t, kAllVenues.size()> papers{};
  std::array<std::array<std::size_t, kNumLabels>, kAllVenues.size()> hits{};
  for (const auto& p : corpus) {
    const auto v = static_cast<std::size_t>(p.venue);
    ++papers[v];
    const LabelSet u = p.label_union();
    for (Label l : kAllLabels) hits[v][index_of(l)] += u.contains(l) ? 1 : 0;
  }
  std::vector<VenueProfile> out;
  for (std::size_t v = 0; v < kAllVenues.size(); ++v) {
    if (papers[v] == 0) continue;
    VenueProfile vp{kAllVenues[v], papers[v], {}};
    for (std::size_t i = 0; i < kNumLabels; ++i)
      vp.share[i] = static_cast<double>(hits[v][i]) / static_cast<double>(papers[v]);
    out.push_back(vp);
  }
  return out;
}

inline AnalysisTable venue_table(const std::vector<VenueProfile>& profiles) {
  AnalysisTable t{"venues", {"venue", "label", "papers", "share"}, {}, {}};
  for (const auto& vp : profiles) {
    for (Label l : kAllLabels)
      t.add_row({venue_name(vp.venue), render_label(l), static_cast<long long>(vp.papers), vp.share[index_of(l)]});
  }
  return t;
}

// ---------------------------------------------------------------------------
// Venue convergence (Jensen-Shannon similarity)

using Distribution = std::array<double, kNumLabels>;

inline double entropy_bits(const Distribution& p) {
  double h = 0.0;
  for (double x : p) {
    if (x > 0.0) h -= x * std::log2(x);
  }
  return h;
}

/// 1 - JSD (base 2) between two non-negative weight vectors, each
/// renormalized to sum to 1. JSD = H(M) - (H(P) + H(Q)) / 2, M = (P + Q) / 2.
inline double jsd_similarity(const Distribution& p_raw, const Distribution& q_raw) {
  double sp = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < kNumLabels; ++i) {
    if (p_raw[i] < 0.0 || q_raw[i] < 0.0) throw DataError("distribution weights must be non-negative");
    sp += p_raw[i];
    sq += q_raw[i];
  }
  if (sp <= 0.0 || sq <= 0.0) throw DataError("distribution has zero mass");
  Distribution p{}, q{}, m{};
  for (std::size_t i = 0; i < kNumLabels; ++i) {
    p[i] = p_raw[i] / sp;
    q[i] = q_raw[i] / sq;
    m[i] = 0.5 * (p[i] + q[i]);
  }
  const double jsd = entropy_bits(m) - 0.5 * (entropy_bits(p) + entropy_bits(q));
  return std::clamp(1.0 - jsd, 0.0, 1.0);
}

/// Label-assignment counts per (venue, year).
inline std::map<std::pair<Venue, int>, Distribution> venue_year_distributions(const std::vector<LabeledPaper>& corpus) {
  std::map<std::pair<Venue, int>, Distribution> out;
  for (const auto& p : corpus) {
    if (!p.year) continue;
    auto& d = out[{p.venue, *p.year}];
    for (auto s : p.sentence_labels) {
      for (Label l : s.members()) d[index_of(l)] += 1.0;
    }
  }
  return out;
}

struct SimilarityPoint {
  Venue venue = Venue::Other;
  int year = 0;
  double similarity = 0.0;
};

struct SimilaritySeries {
  Venue reference = Venue::ACL;
  std::vector<SimilarityPoint> points;  // by year, then venue order
  std::vector<std::string> skipped;     // "<venue>:<year>: reason"
};

/// Similarity of every other venue to `reference` within each year.
inline SimilaritySeries venue_similarity_series(const std::map<std::pair<Venue, int>, Distribution>& dists,
                                                Venue reference) {
  SimilaritySeries s;
  s.reference = reference;
  auto mass = [](const Distribution& d) {
    double m = 0.0;
    for (double x : d) m += x;
    return m;
  };
  std::set<int> years;
  for (const auto& [k, d] : dists) years.insert(k.second);
  for (int y : years) {
    auto ref = dists.find({reference, y});
    const bool ref_ok = ref != dists.end() && mass(ref->second) > 0.0;
    for (Venue v : kAllVenues) {
      if (v == reference) continue;
      auto it = dists.find({v, y});
      if (it == dists.end()) continue;
      const std::string tag = venue_name(v) + ":" + std::to_string(y) + ": ";
      if (!ref_ok) {
        s.skipped.push_back(tag + "reference venue " + venue_name(reference) + " absent");
        continue;
      }
      if (mass(it->second) <= 0.0) {
        s.skipped.push_back(tag + "no label assignments");
        continue;
      }
      s.points.push_back({v, y, jsd_similarity(it->second, ref->second)});
    }
  }
  return s;
}

inline AnalysisTable similarity_table(const SimilaritySeries& s) {
  AnalysisTable t{"converge", {"venue", "year", "reference", "similarity"}, {}, {}};
  t.meta.emplace_back("skipped", static_cast<long long>(s.skipped.size()));
  for (const auto& p : s.points)
    t.add_row({venue_name(p.venue), static_cast<long long>(p.year), venue_name(s.reference), p.similarity});
  return t;
}

// ---------------------------------------------------------------------------
// Contribution diversity

struct DiversityPoint {
  Venue venue = Venue::Other;
  int year = 0;
  std::size_t papers = 0;
  double mean_unique = 0.0;
};

inline std::size_t unique_types(const LabeledPaper& p) { return p.label_union().size(); }

/// Mean number of distinct labels per paper for each (venue, year).
inline std::vector<DiversityPoint> unique_types_per_paper(const std::vector<LabeledPaper>& corpus) {
  std::map<std::pair<Venue, int>, std::pair<std::size_t, std::size_t>> acc;
  for (const auto& p : corpus) {
    if (!p.year) continue;
    auto& [n, total] = acc[{p.venue, *p.year}];
    ++n;
    total += unique_types(p);
  }
  std::vector<DiversityPoint> out;
  for (const auto& [k, v] : acc)
    out.push_back({k.first, k.second, v.first, static_cast<double>(v.second) / static_cast<double>(v.first)});
  return out;
}

inline AnalysisTable diversity_table(const std::vector<DiversityPoint>& pts) {
  AnalysisTable t{"diversity", {"venue", "year", "papers", "mean_unique_types"}, {}, {}};
  for (const auto& p : pts)
    t.add_row({venue_name(p.venue), static_cast<long long>(p.year), static_cast<long long>(p.papers), p.mean_unique});
  return t;
}

// ---------------------------------------------------------------------------
// Citation statistics

inline constexpr int kMaturityYears = 5;

struct CitationFilter {
  std::optional<Venue> venue;
  std::optional<int> year;
  bool maturity = true;            // require at least kMaturityYears of history
  std::optional<int> as_of_year;   // defaults to the latest year in the corpus
};

struct LabelCitation {
  std::size_t papers = 0;
  double mean = 0.0;
  double median = 0.0;
};

struct CitationStats {
  std::array<LabelCitation, kNumLabels> per_label{};
  std::size_t papers_matched = 0;
  std::size_t excluded_missing_citations = 0;
  std::size_t excluded_immature = 0;
  int as_of_year = 0;
};

/// Median of a non-empty sample; even sizes average the middle two.
inline double median(std::vector<double> v) {
  if (v.empty()) throw DataError("median of an empty sample");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

inline double mean(const std::vector<double>& v) {
  if (v.empty()) throw DataError("mean of an empty sample");
  long double s = 0.0L;
  for (double x : v) s += x;
  return static_cast<double>(s / static_cast<long double>(v.size()));
}

inline CitationStats citation_stats(const std::vector<LabeledPaper>& corpus, const CitationFilter& f) {
  CitationStats cs;
  int latest = kMinYear;
  for (const auto& p : corpus) {
    if (p.year) latest = std::max(latest, *p.year);
  }
  cs.as_of_year = f.as_of_year.value_or(latest);

  std::array<std::vector<double>, kNumLabels> samples;
  for (const auto& p : corpus) {
    if (f.venue && p.venue != *f.venue) continue;
    if (f.year && p.year != f.year) continue;
    if (f.maturity && (!p.year || cs.as_of_year - *p.year < kMaturityYears)) {
      ++cs.excluded_immature;
      continue;
    }
    if (!p.citation_count) {
      ++cs.excluded_missing_citations;
      continue;
    }
    ++cs.papers_matched;
    const LabelSet u = p.label_union();
    for (Label l : u.members()) samples[index_of(l)].push_back(static_cast<double>(*p.citation_count));
  }
  if (cs.papers_matched == 0) throw DataError("citation filter matched no papers with citation counts");
  for (std::size_t i = 0; i < kNumLabels; ++i) {
    auto& lc = cs.per_label[i];
    lc.papers = samples[i].size();
    if (lc.papers == 0) continue;
    lc.mean = mean(samples[i]);
    lc.median = median(samples[i]);
  }
  return cs;
}

inline AnalysisTable citation_table(const CitationStats& cs) {
  AnalysisTable t{"citations", {"label", "papers", "mean_citations", "median_citations"}, {}, {}};
  t.meta.emplace_back("papers_matched", static_cast<long long>(cs.papers_matched));
  t.meta.emplace_back("excluded_missing_citations", static_cast<long long>(cs.excluded_missing_citations));
  t.meta.emplace_back("excluded_immature", static_cast<long long>(cs.excluded_immature));
  t.meta.emplace_back("as_of_year", static_cast<long long>(cs.as_of_year));
  for (Label l : kAllLabels) {
    const auto& lc = cs.per_label[index_of(l)];
    if (lc.papers == 0) {
      t.add_row({render_label(l), 0LL, std::monostate{}, std::monostate{}});
    } else {
      t.add_row({render_label(l), static_cast<long long>(lc.papers), lc.mean, lc.median});
    }
  }
  return t;
}

}  // namespace contribscope
