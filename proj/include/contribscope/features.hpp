#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "error.hpp"
#include "text.hpp"

namespace contribscope {

inline constexpr std::uint32_t kDefaultHashDim = 1u << 18;

struct FeatureConfig {
  std::uint32_t dim = kDefaultHashDim;
  bool unigrams = true;
  bool bigrams = true;
  bool l2_normalize = true;
};

/// Sparse vector; entries sorted by index, indices unique.
struct FeatureVector {
  std::vector<std::pair<std::uint32_t, double>> entries;

  bool empty() const { return entries.empty(); }
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// Hash index of one n-gram feature. Unigrams hash "u\x1f<tok>", bigrams
/// "b\x1f<tok1>\x1f<tok2>" with FNV-1a 64, reduced modulo dim.
inline std::uint32_t feature_index(std::string_view kind, std::string_view a, std::string_view b, std::uint32_t dim) {
  std::uint64_t h = text::fnv1a64(kind);
  h = text::fnv1a64("\x1f", h);
  h = text::fnv1a64(a, h);
  if (!b.empty()) {
    h = text::fnv1a64("\x1f", h);
    h = text::fnv1a64(b, h);
  }
  return static_cast<std::uint32_t>(h % dim);
}

/// Lowercased word unigrams and bigrams, hashed into `cfg.dim` buckets with
/// count values, optionally L2-normalized.
inline FeatureVector featurize(std::string_view sentence, const FeatureConfig& cfg = {}) {
  if (cfg.dim == 0) throw UsageError("hash dimension must be positive");
  const auto toks = text::word_tokens(sentence);
  std::vector<std::uint32_t> idx;
  if (cfg.unigrams) {
    for (const auto& t : toks) idx.push_back(feature_index("u", t, {}, cfg.dim));
  }
  if (cfg.bigrams) {
    for (std::size_t i = 1; i < toks.size(); ++i) idx.push_back(feature_index("b", toks[i - 1], toks[i], cfg.dim));
  }
  std::sort(idx.begin(), idx.end());
  FeatureVector fv;
  for (auto i : idx) {
    if (!fv.entries.empty() && fv.entries.back().first == i) {
      fv.entries.back().second += 1.0;
    } else {
      fv.entries.emplace_back(i, 1.0);
    }
  }
  if (cfg.l2_normalize && !fv.entries.empty()) {
    double ss = 0.0;
    for (const auto& [i, v] : fv.entries) ss += v * v;
    const double inv = 1.0 / std::sqrt(ss);
    for (auto& e : fv.entries) e.second *= inv;
  }
  return fv;
}

}  // namespace contribscope
