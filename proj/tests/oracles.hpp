#pragma once

// Brute-force reference implementations used to cross-check the library.
// They deliberately take different routes from the production code.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "contribscope/contribscope.hpp"

namespace oracle {

using namespace contribscope;

// Fleiss' kappa by enumerating ordered rater pairs per item.
inline double fleiss_kappa(const std::vector<std::vector<int>>& ratings, int categories) {
  const std::size_t items = ratings.size();
  const std::size_t raters = ratings.front().size();
  double agree_sum = 0.0;
  std::vector<double> freq(static_cast<std::size_t>(categories), 0.0);
  for (const auto& item : ratings) {
    std::size_t agree = 0;
    for (std::size_t a = 0; a < raters; ++a) {
      freq[static_cast<std::size_t>(item[a])] += 1.0;
      for (std::size_t b = 0; b < raters; ++b) {
        if (a != b && item[a] == item[b]) ++agree;
      }
    }
    agree_sum += static_cast<double>(agree) / static_cast<double>(raters * (raters - 1));
  }
  const double p_obs = agree_sum / static_cast<double>(items);
  double p_exp = 0.0;
  for (double f : freq) {
    const double p = f / static_cast<double>(items * raters);
    p_exp += p * p;
  }
  if (std::abs(1.0 - p_exp) < 1e-12) return 1.0;
  return (p_obs - p_exp) / (1.0 - p_exp);
}

inline AgreementTable to_table(const std::vector<std::vector<int>>& ratings, int categories) {
  AgreementTable t;
  for (const auto& item : ratings) {
    std::vector<std::size_t> row(static_cast<std::size_t>(categories), 0);
    for (int r : item) ++row[static_cast<std::size_t>(r)];
    t.counts.push_back(row);
  }
  return t;
}

struct Prf {
  double p, r, f;
};

// Per-label scores straight from the definitions, F1 as 2tp / (2tp + fp + fn).
inline std::array<Prf, kNumLabels> per_label_prf(const std::vector<LabelSet>& gold, const std::vector<LabelSet>& pred) {
  std::array<Prf, kNumLabels> out{};
  for (std::size_t li = 0; li < kNumLabels; ++li) {
    const Label l = kAllLabels[li];
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      const bool g = gold[i].contains(l), p = pred[i].contains(l);
      tp += g && p;
      fp += !g && p;
      fn += g && !p;
    }
    out[li].p = tp + fp == 0 ? 0.0 : tp / (tp + fp);
    out[li].r = tp + fn == 0 ? 0.0 : tp / (tp + fn);
    out[li].f = 2 * tp + fp + fn == 0 ? 0.0 : 2 * tp / (2 * tp + fp + fn);
  }
  return out;
}

inline Prf macro_prf(const std::vector<LabelSet>& gold, const std::vector<LabelSet>& pred) {
  const auto per = per_label_prf(gold, pred);
  Prf m{0, 0, 0};
  for (const auto& x : per) {
    m.p += x.p / kNumLabels;
    m.r += x.r / kNumLabels;
    m.f += x.f / kNumLabels;
  }
  return m;
}

// PMI from raw counts, natural logs rescaled to base 2.
inline std::array<std::array<std::optional<double>, kNumLabels>, kNumLabels> pmi(const std::vector<LabelSet>& statements) {
  std::vector<LabelSet> labeled;
  for (auto s : statements) {
    if (s.size() > 0) labeled.push_back(s);
  }
  std::array<std::array<std::optional<double>, kNumLabels>, kNumLabels> out{};
  const double n = static_cast<double>(labeled.size());
  for (std::size_t a = 0; a < kNumLabels; ++a) {
    for (std::size_t b = 0; b < kNumLabels; ++b) {
      double ca = 0, cb = 0, cab = 0;
      for (auto s : labeled) {
        const bool ha = (s.mask() >> a) & 1u, hb = (s.mask() >> b) & 1u;
        ca += ha;
        cb += hb;
        cab += ha && hb;
      }
      if (cab == 0) continue;
      out[a][b] = std::log((cab * n) / (ca * cb)) / std::log(2.0);
    }
  }
  return out;
}

// 1 - JSD with JSD written as the mean of the two KL terms against the midpoint.
inline double jsd_similarity(const Distribution& p_raw, const Distribution& q_raw) {
  double sp = 0, sq = 0;
  for (std::size_t i = 0; i < kNumLabels; ++i) {
    sp += p_raw[i];
    sq += q_raw[i];
  }
  double kl_p = 0, kl_q = 0;
  for (std::size_t i = 0; i < kNumLabels; ++i) {
    const double p = p_raw[i] / sp, q = q_raw[i] / sq, m = 0.5 * (p + q);
    if (p > 0) kl_p += p * std::log(p / m) / std::log(2.0);
    if (q > 0) kl_q += q * std::log(q / m) / std::log(2.0);
  }
  return 1.0 - 0.5 * (kl_p + kl_q);
}

struct SimPoint {
  Venue venue;
  int year;
  double similarity;
};

inline std::vector<SimPoint> similarity_series(const std::map<std::pair<Venue, int>, Distribution>& dists, Venue ref) {
  auto mass = [](const Distribution& d) {
    double s = 0;
    for (double x : d) s += x;
    return s;
  };
  std::vector<SimPoint> out;
  for (int y = 1900; y <= 2100; ++y) {
    auto r = dists.find({ref, y});
    if (r == dists.end() || mass(r->second) <= 0) continue;
    for (Venue v : kAllVenues) {
      if (v == ref) continue;
      auto it = dists.find({v, y});
      if (it == dists.end() || mass(it->second) <= 0) continue;
      out.push_back({v, y, jsd_similarity(it->second, r->second)});
    }
  }
  return out;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

inline double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// --- gradient check ---------------------------------------------------------

struct LogisticInstance {
  LinearClassifier clf;
  std::vector<FeatureVector> xs;
  std::vector<std::uint8_t> ys;
  double l2 = 0.0;
  double positive_weight = 1.0;
};

inline LogisticInstance random_logistic_instance(Rng& rng) {
  LogisticInstance inst;
  const std::size_t dim = 3 + uniform_index(rng, 14);
  const std::size_t n = 1 + uniform_index(rng, 12);
  inst.clf.weights.resize(dim);
  for (auto& w : inst.clf.weights) w = 4.0 * uniform_unit(rng) - 2.0;
  inst.clf.bias = 2.0 * uniform_unit(rng) - 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    FeatureVector fv;
    for (std::uint32_t j = 0; j < dim; ++j) {
      if (uniform_index(rng, 2) == 0) fv.entries.emplace_back(j, 2.0 * uniform_unit(rng) - 1.0);
    }
    inst.xs.push_back(fv);
    inst.ys.push_back(static_cast<std::uint8_t>(uniform_index(rng, 2)));
  }
  inst.l2 = uniform_index(rng, 2) ? 0.0 : 0.1 * uniform_unit(rng);
  inst.positive_weight = uniform_index(rng, 2) ? 1.0 : 0.5 + 4.0 * uniform_unit(rng);
  return inst;
}

// Loss evaluated from scratch: mean weighted log-loss plus the ridge term.
inline double direct_loss(const LinearClassifier& clf, const LogisticInstance& inst) {
  double loss = 0.0;
  for (std::size_t i = 0; i < inst.xs.size(); ++i) {
    double z = clf.bias;
    for (const auto& [j, v] : inst.xs[i].entries) z += clf.weights[j] * v;
    const double p = 1.0 / (1.0 + std::exp(-z));
    loss += inst.ys[i] ? -inst.positive_weight * std::log(p) : -std::log(1.0 - p);
  }
  loss /= static_cast<double>(inst.xs.size());
  double sq = 0;
  for (double w : clf.weights) sq += w * w;
  return loss + 0.5 * inst.l2 * sq;
}

/// ||g_analytic - g_numeric|| / max(||g_analytic|| + ||g_numeric||, 1e-12)
/// with central differences of step 1e-5.
inline double gradient_relative_error(const LogisticInstance& inst) {
  const auto obj = label_objective(inst.clf, inst.xs, inst.ys, inst.l2, inst.positive_weight);
  const double h = 1e-5;
  double diff = 0, na = 0, nn = 0;
  auto accumulate = [&](double analytic, double numeric) {
    diff += (analytic - numeric) * (analytic - numeric);
    na += analytic * analytic;
    nn += numeric * numeric;
  };
  for (std::size_t j = 0; j <= inst.clf.weights.size(); ++j) {
    LinearClassifier plus = inst.clf, minus = inst.clf;
    double* pp = j < plus.weights.size() ? &plus.weights[j] : &plus.bias;
    double* pm = j < minus.weights.size() ? &minus.weights[j] : &minus.bias;
    *pp += h;
    *pm -= h;
    const double numeric = (direct_loss(plus, inst) - direct_loss(minus, inst)) / (2 * h);
    accumulate(j < inst.clf.weights.size() ? obj.grad_weights[j] : obj.grad_bias, numeric);
  }
  return std::sqrt(diff) / std::max(std::sqrt(na) + std::sqrt(nn), 1e-12);
}

}  // namespace oracle
