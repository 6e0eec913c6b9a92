#pragma once

#include <array>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "taxonomy.hpp"

namespace contribscope {

inline constexpr std::size_t kMaxShots = 5;

/// Per-label yes/no instructions for prompting backends, indexed like
/// kAllLabels.
inline constexpr std::array<std::string_view, kNumLabels> kInstructions = {
    // k-dataset
    "Datasets constitute a crucial aspect of NLP and machine learning research. Examining datasets can yield "
    "valuable insights into their properties and features. Your task is to assess whether the given sentence from "
    "an NLP research paper describes new knowledge about a dataset, such as its new properties or characteristics "
    "or describes new knowledge concerning properties or characteristics of datasets in general. Respond with "
    "\"yes\" if the sentence presents novel knowledge about the datasets; otherwise, respond with \"no.\" Use only "
    "a yes or no format for your answers.",
    // k-language
    "In NLP research, every paper plays a role in advancing the field. Your task is to assess whether the given "
    "sentence from an NLP research paper presents new knowledge about language, such as a new property or "
    "characteristic of language. Respond with \"yes\" if the sentence describes novel knowledge about language; "
    "otherwise, respond with \"no.\" Use only a yes or no format for your answers.",
    // k-method
    "NLP Models such as RNNs, LSTMs or LLMs are indispensable for NLP Research. Your task is to determine if the "
    "provided sentence from an NLP research paper describes new knowledge or analysis about such existing NLP "
    "models or methods like RNNs, LSTMs, or LLMs. However, the sentence should not propose new models or methods. "
    "Respond with \"yes\" if the sentence presents new knowledge about NLP models; otherwise, respond with \"no.\"",
    // k-people
    "In NLP research, every paper plays a role in advancing the field. Your task is to assess whether the given "
    "sentence from an NLP research paper presents new knowledge about people, humankind, society or human "
    "civilization. Respond with \"yes\" if the sentence describes novel knowledge about people, humankind, society "
    "or human civilization; otherwise, respond with \"no.\" Use only a yes or no format for your answers.",
    // k-task
    "Central to NLP research are tasks such as Machine Translation, Named Entity Recognition, Language Modeling, "
    "etc. Your task is to assess whether the provided sentence from an NLP research paper describes new knowledge "
    "about any of such existing NLP tasks, including new knowledge about their properties or characteristics. "
    "However, the sentence should not propose a new NLP task. Respond with \"yes\" if the sentence presents new "
    "knowledge about one or more of these NLP tasks; otherwise, respond with \"no\".",
    // a-dataset
    "Datasets constitute a crucial aspect of NLP research. Your task is to assess whether the given sentence from "
    "an NLP research paper introduces or discusses a new or novel NLP dataset. Respond with \"yes\" if it does; "
    "otherwise, respond with \"no.\"",
    // a-method
    "Algorithms and NLP models such as RNNs, LSTMs or LLMs are indispensable for NLP Research. Your task is to "
    "assess if the provided sentence from an NLP research paper introducing, or proposing a new or novel such NLP "
    "model, algorithm, or technique. This new model could have been built on top of existing models or methods or "
    "could be a completely new model. Respond with \"yes\" if the sentence introduces or proposes a new or novel "
    "NLP model; otherwise, respond with \"no.\"",
    // a-task
    "Central to NLP research are tasks such as machine translation, named entity recognition, sentiment "
    "classification, and more. Your task is to assess if the given sentence from an NLP research paper introduces, "
    "or proposes a new or novel NLP task. This new task could either build upon existing NLP tasks or could be "
    "entirely novel. Respond with \"yes\" if the sentence introduces, or proposes a new or novel NLP task; "
    "otherwise, respond with \"no.\"",
};

struct Shot {
  std::string text;
  bool answer = false;  // true = "yes"
  friend bool operator==(const Shot&, const Shot&) = default;
};

struct PromptTemplate {
  Label label = Label::KTask;
  std::string instruction;
  std::vector<Shot> shots;

  static PromptTemplate for_label(Label l, std::vector<Shot> shots = {}) {
    if (shots.size() > kMaxShots)
      throw UsageError("at most " + std::to_string(kMaxShots) + " demonstrations fit the context budget, got " +
                       std::to_string(shots.size()));
    return PromptTemplate{l, std::string(kInstructions[index_of(l)]), std::move(shots)};
  }
};

/// Instruction, then each demonstration as a Sentence/Answer pair, then the
/// query sentence with an open answer cue.
inline std::string build_prompt(Label label, const std::vector<Shot>& shots, std::string_view sentence) {
  if (shots.size() > kMaxShots)
    throw UsageError("at most " + std::to_string(kMaxShots) + " demonstrations fit the context budget, got " +
                     std::to_string(shots.size()));
  std::string out(kInstructions[index_of(label)]);
  out += "\n\n";
  for (const auto& s : shots) {
    out += "Sentence: ";
    out += s.text;
    out += "\nAnswer: ";
    out += s.answer ? "yes" : "no";
    out += "\n\n";
  }
  out += "Sentence: ";
  out += sentence;
  out += "\nAnswer:";
  return out;
}

inline std::string build_prompt(const PromptTemplate& t, std::string_view sentence) {
  return build_prompt(t.label, t.shots, sentence);
}

enum class Verdict { Asserted, Denied, Abstain };

/// Leading "yes"/"no" word, case-insensitive, after skipping whitespace and
/// punctuation. Anything else abstains.
inline Verdict parse_yes_no(std::string_view response) {
  std::size_t i = 0;
  while (i < response.size()) {
    auto c = static_cast<unsigned char>(response[i]);
    if (std::isalnum(c)) break;
    ++i;
  }
  std::string word;
  while (i < response.size() && std::isalpha(static_cast<unsigned char>(response[i]))) {
    word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(response[i]))));
    ++i;
  }
  if (word == "yes") return Verdict::Asserted;
  if (word == "no") return Verdict::Denied;
  return Verdict::Abstain;
}

}  // namespace contribscope
