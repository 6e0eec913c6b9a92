#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "text.hpp"

namespace contribscope {

// Contribution sub-types, in taxonomy table order: five knowledge sub-types
// followed by three artifact sub-types.
enum class Label : std::uint8_t {
  KDataset = 0,
  KLanguage,
  KMethod,
  KPeople,
  KTask,
  ADataset,
  AMethod,
  ATask,
};

enum class ContributionKind { Knowledge, Artifact };

inline constexpr std::size_t kNumLabels = 8;

inline constexpr std::array<Label, kNumLabels> kAllLabels = {
    Label::KDataset, Label::KLanguage, Label::KMethod, Label::KPeople,
    Label::KTask,    Label::ADataset,  Label::AMethod, Label::ATask,
};

inline constexpr std::array<std::string_view, kNumLabels> kLabelNames = {
    "k-dataset", "k-language", "k-method", "k-people",
    "k-task",    "a-dataset",  "a-method", "a-task",
};

constexpr std::size_t index_of(Label l) { return static_cast<std::size_t>(l); }

constexpr ContributionKind kind_of(Label l) {
  return index_of(l) < 5 ? ContributionKind::Knowledge : ContributionKind::Artifact;
}

inline std::string render_label(Label l) { return std::string(kLabelNames[index_of(l)]); }

inline std::string valid_label_names() {
  std::string out;
  for (auto n : kLabelNames) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

/// Case-insensitive parse of the hyphenated sub-type name.
inline Label parse_label(std::string_view s) {
  const std::string lower = text::to_lower(text::trim(s));
  for (std::size_t i = 0; i < kNumLabels; ++i) {
    if (lower == kLabelNames[i]) return kAllLabels[i];
  }
  throw DataError("unknown label '" + std::string(s) + "'; valid labels: " + valid_label_names());
}

inline std::vector<Label> labels_of_kind(ContributionKind kind) {
  std::vector<Label> out;
  for (Label l : kAllLabels) {
    if (kind_of(l) == kind) out.push_back(l);
  }
  return out;
}

/// Subset of the eight labels. The empty set marks a non-contribution
/// ("Null") sentence.
class LabelSet {
 public:
  constexpr LabelSet() = default;
  LabelSet(std::initializer_list<Label> labels) {
    for (Label l : labels) insert(l);
  }
  static constexpr LabelSet from_mask(std::uint8_t mask) {
    LabelSet s;
    s.mask_ = mask;
    return s;
  }

  constexpr void insert(Label l) { mask_ |= bit(l); }
  constexpr void erase(Label l) { mask_ &= static_cast<std::uint8_t>(~bit(l)); }
  constexpr bool contains(Label l) const { return (mask_ & bit(l)) != 0; }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr std::size_t size() const { return static_cast<std::size_t>(__builtin_popcount(mask_)); }
  constexpr std::uint8_t mask() const { return mask_; }

  std::vector<Label> members() const {
    std::vector<Label> out;
    for (Label l : kAllLabels) {
      if (contains(l)) out.push_back(l);
    }
    return out;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (Label l : members()) out.push_back(render_label(l));
    return out;
  }

  LabelSet operator|(LabelSet o) const { return from_mask(mask_ | o.mask_); }
  LabelSet& operator|=(LabelSet o) {
    mask_ |= o.mask_;
    return *this;
  }
  friend constexpr bool operator==(LabelSet, LabelSet) = default;

 private:
  static constexpr std::uint8_t bit(Label l) { return static_cast<std::uint8_t>(1u << index_of(l)); }
  std::uint8_t mask_ = 0;
};

template <class Range>
LabelSet parse_label_list(const Range& names) {
  LabelSet s;
  for (const auto& n : names) s.insert(parse_label(n));
  return s;
}

}  // namespace contribscope
