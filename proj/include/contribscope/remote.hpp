#pragma once

#include <array>
#include <chrono>
#include <cstdlib>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "error.hpp"
#include "prompt.hpp"
#include "taxonomy.hpp"

namespace contribscope {

inline constexpr const char* kApiKeyEnv = "CONTRIBSCOPE_API_KEY";

struct RemoteEndpoint {
  std::string url;  // e.g. "http://localhost:8080" or "http://host/api"
  int timeout_ms = 30000;
  int retries = 3;
  int backoff_ms = 200;
  std::optional<std::string> api_key;

  static std::optional<std::string> api_key_from_env() {
    if (const char* k = std::getenv(kApiKeyEnv); k && *k) return std::string(k);
    return std::nullopt;
  }
};

struct RemoteResult {
  std::vector<LabelSet> labels;
  std::vector<std::array<std::string, kNumLabels>> raw;  // raw answer per sentence and label
  std::array<bool, kNumLabels> completed{};               // label queried successfully
  std::size_t abstains = 0;                               // counted as denied
};

/// Transport failure after all retries; carries the labels finished so far.
class RemoteError : public TransportError {
 public:
  RemoteError(const std::string& what, RemoteResult partial)
      : TransportError(what), partial_(std::move(partial)) {}
  const RemoteResult& partial() const { return partial_; }

 private:
  RemoteResult partial_;
};

namespace remote_detail {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path without trailing slash
};

inline SplitUrl split_url(const std::string& url) {
  const auto scheme = url.find("://");
  const auto path_at = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  SplitUrl s;
  s.origin = url.substr(0, path_at);
  if (path_at != std::string::npos) s.prefix = url.substr(path_at);
  while (!s.prefix.empty() && s.prefix.back() == '/') s.prefix.pop_back();
  return s;
}

}  // namespace remote_detail

/// Request body for one label over a batch of sentences. The rendered prompts
/// ride along so that thin relays can forward them verbatim.
inline nlohmann::ordered_json classify_request(const PromptTemplate& t, const std::vector<std::string>& sentences) {
  nlohmann::ordered_json j;
  j["sentences"] = sentences;
  j["label"] = render_label(t.label);
  nlohmann::ordered_json shots = nlohmann::ordered_json::array();
  for (const auto& s : t.shots) shots.push_back({{"text", s.text}, {"answer", s.answer ? "yes" : "no"}});
  j["shots"] = std::move(shots);
  nlohmann::ordered_json prompts = nlohmann::ordered_json::array();
  for (const auto& s : sentences) prompts.push_back(build_prompt(t, s));
  j["prompts"] = std::move(prompts);
  return j;
}

/// One yes/no query per (sentence, label), batched per label as
/// POST <url>/classify. Abstaining answers count as denied.
inline RemoteResult remote_classify(const RemoteEndpoint& ep, const std::vector<std::string>& sentences,
                                    const std::array<PromptTemplate, kNumLabels>& templates) {
  RemoteResult r;
  r.labels.assign(sentences.size(), LabelSet{});
  r.raw.assign(sentences.size(), {});
  if (sentences.empty()) {
    r.completed.fill(true);
    return r;
  }

  const auto url = remote_detail::split_url(ep.url);
  httplib::Client cli(url.origin);
  const auto secs = ep.timeout_ms / 1000;
  const auto usecs = (ep.timeout_ms % 1000) * 1000;
  cli.set_connection_timeout(secs, usecs);
  cli.set_read_timeout(secs, usecs);
  cli.set_write_timeout(secs, usecs);
  httplib::Headers headers;
  if (ep.api_key) headers.emplace("Authorization", "Bearer " + *ep.api_key);

  for (Label l : kAllLabels) {
    const auto& t = templates[index_of(l)];
    const std::string body = classify_request(t, sentences).dump();
    std::string last_error;
    std::optional<std::vector<std::string>> answers;
    for (int attempt = 0; attempt <= ep.retries && !answers; ++attempt) {
      if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(ep.backoff_ms * attempt));
      auto res = cli.Post(url.prefix + "/classify", headers, body, "application/json");
      if (!res) {
        last_error = "transport error: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status != 200) {
        last_error = "HTTP status " + std::to_string(res->status);
        continue;
      }
      try {
        auto j = nlohmann::json::parse(res->body);
        auto a = j.at("answers").get<std::vector<std::string>>();
        if (a.size() != sentences.size()) {
          last_error = "answer count mismatch";
          continue;
        }
        answers = std::move(a);
      } catch (const nlohmann::json::exception& e) {
        last_error = std::string("malformed response: ") + e.what();
      }
    }
    if (!answers) {
      throw RemoteError("remote classify failed for label " + render_label(l) + " after " +
                            std::to_string(ep.retries + 1) + " attempts: " + last_error,
                        r);
    }
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      const std::string& a = (*answers)[i];
      r.raw[i][index_of(l)] = a;
      switch (parse_yes_no(a)) {
        case Verdict::Asserted:
          r.labels[i].insert(l);
          break;
        case Verdict::Abstain:
          ++r.abstains;
          break;
        case Verdict::Denied:
          break;
      }
    }
    r.completed[index_of(l)] = true;
  }
  return r;
}

inline std::array<PromptTemplate, kNumLabels> zero_shot_templates() {
  std::array<PromptTemplate, kNumLabels> out;
  for (Label l : kAllLabels) out[index_of(l)] = PromptTemplate::for_label(l);
  return out;
}

}  // namespace contribscope
