#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "annotations.hpp"
#include "error.hpp"
#include "rng.hpp"
#include "taxonomy.hpp"

namespace contribscope {

// ---------------------------------------------------------------------------
// Label-based precision / recall / F1

struct ConfusionCounts {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct LabelConfusion {
  std::array<ConfusionCounts, kNumLabels> per_label{};
  std::size_t items = 0;
};

inline LabelConfusion confusion(const std::vector<LabelSet>& gold, const std::vector<LabelSet>& pred) {
  if (gold.size() != pred.size())
    throw DataError("gold and predicted lists differ in length (" + std::to_string(gold.size()) + " vs " +
                    std::to_string(pred.size()) + ")");
  LabelConfusion c;
  c.items = gold.size();
  for (std::size_t i = 0; i < gold.size(); ++i) {
    for (Label l : kAllLabels) {
      auto& k = c.per_label[index_of(l)];
      const bool g = gold[i].contains(l), p = pred[i].contains(l);
      if (g && p) ++k.tp;
      else if (!g && p) ++k.fp;
      else if (g && !p) ++k.fn;
      else ++k.tn;
    }
  }
  return c;
}

struct PRF {
  double precision = 0.0, recall = 0.0, f1 = 0.0;
};

/// 0/0 is taken as 0 for precision, recall and F1.
inline PRF prf_from_counts(const ConfusionCounts& k) {
  PRF r;
  if (k.tp + k.fp > 0) r.precision = static_cast<double>(k.tp) / static_cast<double>(k.tp + k.fp);
  if (k.tp + k.fn > 0) r.recall = static_cast<double>(k.tp) / static_cast<double>(k.tp + k.fn);
  if (r.precision + r.recall > 0) r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

struct MacroResult {
  PRF macro;
  std::array<PRF, kNumLabels> per_label{};
  LabelConfusion confusion;
};

/// Unweighted mean of per-label scores over `labels` (all eight by default).
inline MacroResult macro_from_confusion(const LabelConfusion& c, const std::vector<Label>& labels = {
                                                                     kAllLabels.begin(), kAllLabels.end()}) {
  MacroResult r;
  r.confusion = c;
  for (Label l : kAllLabels) r.per_label[index_of(l)] = prf_from_counts(c.per_label[index_of(l)]);
  if (labels.empty()) return r;
  for (Label l : labels) {
    const auto& p = r.per_label[index_of(l)];
    r.macro.precision += p.precision;
    r.macro.recall += p.recall;
    r.macro.f1 += p.f1;
  }
  const double n = static_cast<double>(labels.size());
  r.macro.precision /= n;
  r.macro.recall /= n;
  r.macro.f1 /= n;
  return r;
}

inline MacroResult macro_prf1(const std::vector<LabelSet>& gold, const std::vector<LabelSet>& pred) {
  return macro_from_confusion(confusion(gold, pred));
}

/// Exact-match ratio (label-set-based). Reported only on request.
inline double exact_match_ratio(const std::vector<LabelSet>& gold, const std::vector<LabelSet>& pred) {
  if (gold.size() != pred.size()) throw DataError("gold and predicted lists differ in length");
  if (gold.empty()) return 0.0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) hit += gold[i] == pred[i] ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(gold.size());
}

// ---------------------------------------------------------------------------
// McNemar

struct McNemarResult {
  std::size_t b = 0;  // a correct, b wrong
  std::size_t c = 0;  // a wrong, b correct
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Upper tail of chi-square with one degree of freedom.
inline double chi2_df1_sf(double x) { return x <= 0.0 ? 1.0 : std::erfc(std::sqrt(x / 2.0)); }

/// Continuity-corrected McNemar test on paired correctness flags.
inline McNemarResult mcnemar(const std::vector<bool>& correct_a, const std::vector<bool>& correct_b) {
  if (correct_a.size() != correct_b.size()) throw DataError("mcnemar: inputs differ in length");
  McNemarResult r;
  for (std::size_t i = 0; i < correct_a.size(); ++i) {
    if (correct_a[i] && !correct_b[i]) ++r.b;
    if (!correct_a[i] && correct_b[i]) ++r.c;
  }
  const double n = static_cast<double>(r.b + r.c);
  if (n == 0) return r;
  const double d = std::abs(static_cast<double>(r.b) - static_cast<double>(r.c)) - 1.0;
  r.statistic = d > 0 ? d * d / n : 0.0;
  r.p_value = chi2_df1_sf(r.statistic);
  return r;
}

/// Pooled sentence x label decisions: one correctness flag per pair.
inline std::vector<bool> decision_correctness(const std::vector<LabelSet>& gold, const std::vector<LabelSet>& pred) {
  if (gold.size() != pred.size()) throw DataError("gold and predicted lists differ in length");
  std::vector<bool> out;
  out.reserve(gold.size() * kNumLabels);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    for (Label l : kAllLabels) out.push_back(gold[i].contains(l) == pred[i].contains(l));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation report

struct SystemScores {
  std::string name;
  MacroResult result;
  std::optional<double> exact_match;
};

struct EvalReport {
  std::vector<SystemScores> systems;
  std::optional<std::pair<std::string, McNemarResult>> mcnemar_vs;  // primary system vs named system

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    nlohmann::ordered_json sys = nlohmann::ordered_json::array();
    for (const auto& s : systems) {
      nlohmann::ordered_json js;
      js["name"] = s.name;
      nlohmann::ordered_json per;
      for (Label l : kAllLabels) {
        const auto& p = s.result.per_label[index_of(l)];
        const auto& k = s.result.confusion.per_label[index_of(l)];
        per[render_label(l)] = {{"p", p.precision}, {"r", p.recall}, {"f1", p.f1},
                                {"tp", k.tp},       {"fp", k.fp},     {"fn", k.fn}, {"tn", k.tn}};
      }
      js["per_label"] = per;
      js["macro"] = {{"p", s.result.macro.precision}, {"r", s.result.macro.recall}, {"f1", s.result.macro.f1}};
      if (s.exact_match) js["exact_match"] = *s.exact_match;
      sys.push_back(js);
    }
    if (!systems.empty()) {
      j["per_label"] = sys[0]["per_label"];
      j["macro"] = sys[0]["macro"];
    }
    j["systems"] = sys;
    if (mcnemar_vs) {
      j["mcnemar"] = {{"vs", mcnemar_vs->first},
                      {"b", mcnemar_vs->second.b},
                      {"c", mcnemar_vs->second.c},
                      {"statistic", mcnemar_vs->second.statistic},
                      {"p", mcnemar_vs->second.p_value}};
    }
    return j;
  }

  /// Aligned (P, R, F1) table, one row per system.
  std::string to_text() const {
    std::string out;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-20s %6s %6s %6s\n", "Model", "P", "R", "F1");
    out += buf;
    for (const auto& s : systems) {
      std::snprintf(buf, sizeof buf, "%-20s %6.2f %6.2f %6.2f\n", s.name.c_str(), s.result.macro.precision,
                    s.result.macro.recall, s.result.macro.f1);
      out += buf;
    }
    if (!systems.empty()) {
      out += "\nper label (" + systems[0].name + ")\n";
      for (Label l : kAllLabels) {
        const auto& p = systems[0].result.per_label[index_of(l)];
        std::snprintf(buf, sizeof buf, "%-20s %6.2f %6.2f %6.2f\n", render_label(l).c_str(), p.precision, p.recall,
                      p.f1);
        out += buf;
      }
    }
    if (mcnemar_vs) {
      std::snprintf(buf, sizeof buf, "\nMcNemar vs %s: b=%zu c=%zu statistic=%.4f p=%.3g\n",
                    mcnemar_vs->first.c_str(), mcnemar_vs->second.b, mcnemar_vs->second.c,
                    mcnemar_vs->second.statistic, mcnemar_vs->second.p_value);
      out += buf;
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// Fleiss' kappa

/// counts[item][category] = raters choosing that category for the item.
struct AgreementTable {
  std::vector<std::vector<std::size_t>> counts;

  std::size_t items() const { return counts.size(); }
  std::size_t categories() const { return counts.empty() ? 0 : counts.front().size(); }
};

/// Fleiss' kappa = (P_bar - P_e) / (1 - P_e). When P_e = 1 (every rating in a
/// single category) the raters agree perfectly and 1.0 is returned.
inline double fleiss_kappa(const AgreementTable& t) {
  if (t.items() < 2) throw DataError("fleiss_kappa needs at least 2 items");
  const std::size_t k = t.categories();
  if (k < 2) throw DataError("fleiss_kappa needs at least 2 categories");
  std::size_t n = 0;
  for (auto c : t.counts.front()) n += c;
  if (n < 2) throw DataError("fleiss_kappa needs at least 2 raters per item");

  std::vector<double> col(k, 0.0);
  double p_bar = 0.0;
  for (const auto& row : t.counts) {
    if (row.size() != k) throw DataError("agreement table rows differ in category count");
    std::size_t sum = 0, pairs = 0;
    for (std::size_t j = 0; j < k; ++j) {
      sum += row[j];
      pairs += row[j] * (row[j] - (row[j] > 0 ? 1 : 0));
      col[j] += static_cast<double>(row[j]);
    }
    if (sum != n) throw DataError("agreement table has varying rater counts");
    p_bar += static_cast<double>(pairs) / static_cast<double>(n * (n - 1));
  }
  const double items = static_cast<double>(t.items());
  p_bar /= items;
  double p_e = 0.0;
  for (double c : col) {
    const double p = c / (items * static_cast<double>(n));
    p_e += p * p;
  }
  if (p_e >= 1.0 - 1e-15) return 1.0;
  return (p_bar - p_e) / (1.0 - p_e);
}

/// Binary present/absent tables, one per label, over sentences annotated by
/// every annotator in the file. Item order follows (paper_id, sentence_index).
struct DualAnnotation {
  std::array<AgreementTable, kNumLabels> tables;
  std::vector<std::string> annotators;
  std::size_t items = 0;
  std::size_t skipped_items = 0;  // not covered by every annotator
};

inline DualAnnotation agreement_tables(const std::vector<AnnotatedSentence>& rows) {
  std::set<std::string> annotators;
  for (const auto& a : rows) annotators.insert(a.annotator_id.value_or(""));
  std::map<std::pair<std::string, std::size_t>, std::vector<const AnnotatedSentence*>> by_item;
  for (const auto& a : rows) by_item[{a.paper_id, a.sentence_index}].push_back(&a);

  DualAnnotation d;
  d.annotators.assign(annotators.begin(), annotators.end());
  const std::size_t n = annotators.size();
  if (n < 2) throw DataError("agreement needs at least 2 distinct annotators");
  for (const auto& [key, anns] : by_item) {
    if (anns.size() != n) {
      ++d.skipped_items;
      continue;
    }
    ++d.items;
    for (Label l : kAllLabels) {
      std::size_t present = 0;
      for (const auto* a : anns) present += a->gold.contains(l) ? 1 : 0;
      d.tables[index_of(l)].counts.push_back({present, n - present});
    }
  }
  return d;
}

struct KappaInterval {
  double point = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool clamped = false;  // percentile bounds did not bracket the point estimate
};

namespace evaluate_detail {

// Linear-interpolated empirical quantile of sorted values.
inline double quantile_sorted(const std::vector<double>& v, double q) {
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(v.size() - 1, lo + 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

inline KappaInterval percentile_interval(double point, std::vector<double> stats, double level) {
  std::sort(stats.begin(), stats.end());
  KappaInterval r;
  r.point = point;
  r.lower = quantile_sorted(stats, (1.0 - level) / 2.0);
  r.upper = quantile_sorted(stats, 1.0 - (1.0 - level) / 2.0);
  if (r.lower > point) {
    r.lower = point;
    r.clamped = true;
  }
  if (r.upper < point) {
    r.upper = point;
    r.clamped = true;
  }
  return r;
}

inline void check_ci_args(std::size_t items, double level, std::size_t resamples) {
  if (items < 2) throw DataError("bootstrap needs at least 2 items");
  if (resamples < 100) throw UsageError("bootstrap needs at least 100 resamples");
  if (!(level > 0.0 && level < 1.0)) throw UsageError("confidence level must lie in (0, 1)");
}

}  // namespace evaluate_detail

inline constexpr std::size_t kDefaultResamples = 1000;

/// Mean kappa over several tables that share items (one per label), with a
/// percentile bootstrap interval from resampling items jointly.
inline KappaInterval mean_kappa_ci(const std::vector<AgreementTable>& tables, double level, std::size_t resamples,
                                   std::uint64_t seed) {
  if (tables.empty()) throw DataError("no agreement tables");
  const std::size_t items = tables.front().items();
  for (const auto& t : tables) {
    if (t.items() != items) throw DataError("agreement tables differ in item count");
  }
  evaluate_detail::check_ci_args(items, level, resamples);
  auto mean_kappa = [&](const std::vector<AgreementTable>& ts) {
    double s = 0.0;
    for (const auto& t : ts) s += fleiss_kappa(t);
    return s / static_cast<double>(ts.size());
  };
  const double point = mean_kappa(tables);
  Rng rng(seed);
  std::vector<double> stats;
  stats.reserve(resamples);
  std::vector<AgreementTable> boot(tables.size());
  std::vector<std::size_t> pick(items);
  for (std::size_t r = 0; r < resamples; ++r) {
    for (auto& p : pick) p = uniform_index(rng, items);
    for (std::size_t t = 0; t < tables.size(); ++t) {
      boot[t].counts.clear();
      for (auto p : pick) boot[t].counts.push_back(tables[t].counts[p]);
    }
    stats.push_back(mean_kappa(boot));
  }
  return evaluate_detail::percentile_interval(point, std::move(stats), level);
}

/// Percentile bootstrap over items for a single table.
inline KappaInterval kappa_ci(const AgreementTable& table, double level = 0.95,
                              std::size_t resamples = kDefaultResamples, std::uint64_t seed = 42) {
  return mean_kappa_ci({table}, level, resamples, seed);
}

struct AgreementReport {
  std::array<double, kNumLabels> per_label{};
  KappaInterval overall;
  double level = 0.95;
  std::size_t resamples = 0;
  std::size_t items = 0;
  std::size_t skipped_items = 0;
  std::vector<std::string> annotators;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["annotators"] = annotators;
    j["items"] = items;
    j["skipped_items"] = skipped_items;
    nlohmann::ordered_json per;
    for (Label l : kAllLabels) per[render_label(l)] = per_label[index_of(l)];
    j["per_label"] = per;
    j["overall"] = {{"kappa", overall.point},
                    {"lower", overall.lower},
                    {"upper", overall.upper},
                    {"level", level},
                    {"resamples", resamples},
                    {"clamped", overall.clamped}};
    return j;
  }

  std::string to_text() const {
    std::string out;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-12s %-12s %8s\n", "Typ.", "Sub-typ.", "kappa");
    out += buf;
    for (Label l : kAllLabels) {
      std::snprintf(buf, sizeof buf, "%-12s %-12s %8.2f\n",
                    kind_of(l) == ContributionKind::Knowledge ? "Knowledge" : "Artifact", render_label(l).c_str(),
                    per_label[index_of(l)]);
      out += buf;
    }
    std::snprintf(buf, sizeof buf, "%-25s %8.2f  [%.2f, %.2f] at %.0f%%\n", "Overall Agreement", overall.point,
                  overall.lower, overall.upper, level * 100.0);
    out += buf;
    return out;
  }
};

/// Per-label kappa plus the unweighted label average with its bootstrap CI.
inline AgreementReport agreement(const std::vector<AnnotatedSentence>& rows, double level, std::size_t resamples,
                                 std::uint64_t seed) {
  const auto d = agreement_tables(rows);
  AgreementReport r;
  r.items = d.items;
  r.skipped_items = d.skipped_items;
  r.annotators = d.annotators;
  r.level = level;
  r.resamples = resamples;
  std::vector<AgreementTable> tables(d.tables.begin(), d.tables.end());
  for (Label l : kAllLabels) r.per_label[index_of(l)] = fleiss_kappa(d.tables[index_of(l)]);
  r.overall = mean_kappa_ci(tables, level, resamples, seed);
  return r;
}

}  // namespace contribscope
