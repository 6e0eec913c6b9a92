#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "analyze.hpp"
#include "annotations.hpp"
#include "error.hpp"
#include "evaluate.hpp"
#include "ingest.hpp"
#include "model.hpp"
#include "remote.hpp"
#include "table.hpp"

namespace contribscope {

inline constexpr const char* kToolVersion = "0.1.0";

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> v = {"ingest", "stats", "split", "train", "predict", "eval", "agree", "analyze"};
  return v;
}

inline const std::vector<std::string>& analyses() {
  static const std::vector<std::string> v = {"pmi", "trends", "venues", "converge", "diversity", "citations"};
  return v;
}

/// Everything one run needs. Every field has a default; the whole struct is
/// echoed into the run manifest.
struct RunConfig {
  std::string command;
  std::string analysis;  // for "analyze"

  std::string input;
  std::string metadata;
  std::string papers;  // ingested corpus (JSONL) for stats/analyze
  std::string model;
  std::string split;
  std::string predictions;
  std::string out = "out";

  std::uint64_t seed = 42;
  bool randomize = false;
  std::vector<std::string> venues;  // canonical venue allowlist for ingest

  double threshold = 0.5;
  std::size_t epochs = 20;
  double learning_rate = 5.0;
  double l2 = 1e-6;
  std::uint32_t dim = kDefaultHashDim;
  bool positive_weighting = false;
  bool random_baseline = false;  // predict with the random baseline
  bool exact_match = false;

  std::size_t window = 3;
  std::size_t resamples = kDefaultResamples;
  double level = 0.95;
  std::string reference = "ACL";
  std::string venue;           // citations filter
  std::optional<int> year;     // citations filter
  bool maturity = true;
  std::optional<int> as_of_year;

  std::string endpoint;
  int timeout_ms = 30000;
  int retries = 3;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["analysis"] = analysis;
    j["input"] = input;
    j["metadata"] = metadata;
    j["papers"] = papers;
    j["model"] = model;
    j["split"] = split;
    j["predictions"] = predictions;
    j["out"] = out;
    j["seed"] = seed;
    j["randomize"] = randomize;
    j["venues"] = venues;
    j["threshold"] = threshold;
    j["epochs"] = epochs;
    j["learning_rate"] = learning_rate;
    j["l2"] = l2;
    j["dim"] = dim;
    j["positive_weighting"] = positive_weighting;
    j["random_baseline"] = random_baseline;
    j["exact_match"] = exact_match;
    j["window"] = window;
    j["resamples"] = resamples;
    j["level"] = level;
    j["reference"] = reference;
    j["venue"] = venue;
    j["year"] = year ? nlohmann::ordered_json(*year) : nlohmann::ordered_json(nullptr);
    j["maturity"] = maturity;
    j["as_of_year"] = as_of_year ? nlohmann::ordered_json(*as_of_year) : nlohmann::ordered_json(nullptr);
    j["endpoint"] = endpoint;
    j["timeout_ms"] = timeout_ms;
    j["retries"] = retries;
    return j;
  }

  /// Inverse of to_json; missing keys keep their defaults.
  static RunConfig from_json(const nlohmann::json& j) {
    RunConfig c;
    auto get = [&](const char* key, auto& field) {
      auto it = j.find(key);
      if (it != j.end() && !it->is_null()) field = it->get<std::decay_t<decltype(field)>>();
    };
    auto get_opt = [&](const char* key, std::optional<int>& field) {
      auto it = j.find(key);
      if (it != j.end() && !it->is_null()) field = it->get<int>();
    };
    get("command", c.command);
    get("analysis", c.analysis);
    get("input", c.input);
    get("metadata", c.metadata);
    get("papers", c.papers);
    get("model", c.model);
    get("split", c.split);
    get("predictions", c.predictions);
    get("out", c.out);
    get("seed", c.seed);
    get("randomize", c.randomize);
    get("venues", c.venues);
    get("threshold", c.threshold);
    get("epochs", c.epochs);
    get("learning_rate", c.learning_rate);
    get("l2", c.l2);
    get("dim", c.dim);
    get("positive_weighting", c.positive_weighting);
    get("random_baseline", c.random_baseline);
    get("exact_match", c.exact_match);
    get("window", c.window);
    get("resamples", c.resamples);
    get("level", c.level);
    get("reference", c.reference);
    get("venue", c.venue);
    get_opt("year", c.year);
    get("maturity", c.maturity);
    get_opt("as_of_year", c.as_of_year);
    get("endpoint", c.endpoint);
    get("timeout_ms", c.timeout_ms);
    get("retries", c.retries);
    return c;
  }
};

namespace app_detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Run {
 public:
  Run(RunConfig cfg, std::ostream& log) : cfg_(std::move(cfg)), log_(log) {
    std::filesystem::create_directories(cfg_.out);
  }

  void input(const std::string& role, const std::string& path) {
    const std::string body = read_file(path);
    inputs_.push_back({{"role", role}, {"path", path}, {"bytes", body.size()}, {"fnv1a64", text::hex64(text::fnv1a64(body))}});
  }

  std::string path(const std::string& name) const { return cfg_.out + "/" + name; }

  void write(const std::string& name, const std::string& body) {
    std::ofstream out(path(name), std::ios::binary);
    if (!out) throw DataError("cannot write " + path(name));
    out << body;
    outputs_.push_back({{"file", name}, {"fnv1a64", text::hex64(text::fnv1a64(body))}});
  }

  void write_json(const std::string& name, const nlohmann::ordered_json& j) { write(name, j.dump(2) + "\n"); }

  void write_table(const AnalysisTable& t, const std::string& stem) {
    write(stem + ".csv", t.to_csv());
    write(stem + ".json", t.to_json());
  }

  void finish() {
    nlohmann::ordered_json m;
    m["tool"] = "contribscope";
    m["version"] = kToolVersion;
    m["config"] = cfg_.to_json();
    m["inputs"] = inputs_;
    m["outputs"] = outputs_;
    std::string name = "manifest_" + cfg_.command;
    if (!cfg_.analysis.empty()) name += "_" + cfg_.analysis;
    std::ofstream out(path(name + ".json"), std::ios::binary);
    out << m.dump(2) << "\n";
  }

  const RunConfig& cfg() const { return cfg_; }
  // Diagnostics that are not errors (skipped cells and the like).
  std::ostream& log() { return log_; }

 private:
  RunConfig cfg_;
  std::ostream& log_;
  nlohmann::ordered_json inputs_ = nlohmann::ordered_json::array();
  nlohmann::ordered_json outputs_ = nlohmann::ordered_json::array();
};

inline void require(const std::string& value, const char* flag, const std::string& command) {
  if (value.empty()) throw UsageError(command + " requires " + flag);
}

inline std::string prediction_line(const AnnotatedSentence& row, const std::array<double, kNumLabels>* scores) {
  nlohmann::ordered_json j = annotation_to_json(row);
  if (scores) {
    nlohmann::ordered_json s;
    for (Label l : kAllLabels) s[render_label(l)] = (*scores)[index_of(l)];
    j["scores"] = s;
  }
  return j.dump() + "\n";
}

inline std::vector<PaperRecord> load_corpus(Run& run, const std::string& path) {
  run.input("papers", path);
  auto papers = load_papers(path);
  segment_corpus(papers);
  return papers;
}

inline TrainConfig train_config(const RunConfig& c) {
  TrainConfig t;
  t.features.dim = c.dim;
  t.learning_rate = c.learning_rate;
  t.epochs = c.epochs;
  t.l2 = c.l2;
  t.positive_weighting = c.positive_weighting;
  t.seed = c.seed;
  t.threshold = c.threshold;
  return t;
}

// --- subcommands ---------------------------------------------------------------

inline void cmd_ingest(Run& run) {
  const auto& c = run.cfg();
  require(c.input, "--input", "ingest");
  std::set<Venue> allow;
  for (const auto& v : c.venues) allow.insert(parse_venue_name(v));
  run.input("papers", c.input);
  std::optional<std::string> meta;
  if (!c.metadata.empty()) {
    run.input("metadata", c.metadata);
    meta = c.metadata;
  }
  auto r = ingest(c.input, meta, allow);
  std::string body;
  for (const auto& p : r.papers) body += paper_to_json(p).dump() + "\n";
  run.write("corpus.jsonl", body);
  run.write_json("ingest_report.json", r.report.to_json());
}

inline void cmd_stats(Run& run) {
  const auto& c = run.cfg();
  require(c.input, "--input", "stats");
  std::vector<PaperRecord> papers;
  if (!c.papers.empty()) papers = load_corpus(run, c.papers);
  run.input("annotations", c.input);
  const auto rows = load_annotations(c.input, c.papers.empty() ? nullptr : &papers);
  const auto report = corpus_stats(rows, papers);
  run.write_json("stats.json", report.to_json());
  run.write("stats.txt", report.to_text());
}

inline void cmd_split(Run& run) {
  const auto& c = run.cfg();
  require(c.input, "--input", "split");
  run.input("annotations", c.input);
  const auto rows = load_annotations(c.input);
  run.write_json("split.json", split_corpus(annotated_papers(rows), c.seed).to_json());
}

inline std::optional<SplitManifest> load_split(Run& run, const std::string& path) {
  if (path.empty()) return std::nullopt;
  run.input("split", path);
  try {
    return SplitManifest::from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed split file: ") + e.what());
  }
}

inline void cmd_train(Run& run) {
  const auto& c = run.cfg();
  require(c.input, "--input", "train");
  run.input("annotations", c.input);
  auto rows = load_annotations(c.input);
  if (auto split = load_split(run, c.split)) rows = select_papers(rows, split->train);
  std::vector<AnnotatedSentence> train;
  for (const auto& [k, a] : unique_gold(rows)) train.push_back(*a);
  auto r = train_model(train, train_config(c));
  run.write("model.json", r.model.to_json().dump() + "\n");
  run.write_json("train_report.json", r.report.to_json());
}

inline void cmd_predict(Run& run) {
  const auto& c = run.cfg();
  require(c.input, "--input", "predict");
  const auto papers = load_corpus(run, c.input);
  std::vector<AnnotatedSentence> rows;
  for (const auto& p : papers) {
    for (std::size_t i = 0; i < p.sentences.size(); ++i) rows.push_back({p.paper_id, i, p.sentences[i], {}, std::nullopt});
  }
  std::string body;
  nlohmann::ordered_json report;
  report["sentences"] = rows.size();
  if (!c.endpoint.empty()) {
    RemoteEndpoint ep{c.endpoint, c.timeout_ms, c.retries, 200, RemoteEndpoint::api_key_from_env()};
    std::vector<std::string> texts;
    for (const auto& r : rows) texts.push_back(r.text);
    const auto res = remote_classify(ep, texts, zero_shot_templates());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      rows[i].gold = res.labels[i];
      nlohmann::ordered_json j = annotation_to_json(rows[i]);
      nlohmann::ordered_json raw;
      for (Label l : kAllLabels) raw[render_label(l)] = res.raw[i][index_of(l)];
      j["raw"] = raw;
      body += j.dump() + "\n";
    }
    report["backend"] = "remote";
    report["abstains_counted_as_denied"] = res.abstains;
  } else if (c.random_baseline) {
    const auto pred = random_predict(rows.size(), c.seed);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      rows[i].gold = pred[i];
      body += prediction_line(rows[i], nullptr);
    }
    report["backend"] = "random";
  } else {
    require(c.model, "--model (or --endpoint / --random)", "predict");
    run.input("model", c.model);
    auto model = MultiLabelModel::load(c.model);
    model.set_threshold(c.threshold);
    for (auto& r : rows) {
      const auto p = model.predict_one(r.text);
      r.gold = p.labels;
      body += prediction_line(r, &p.scores);
    }
    report["backend"] = "native";
  }
  run.write("predictions.jsonl", body);
  run.write_json("predict_report.json", report);
}

inline void cmd_eval(Run& run) {
  const auto& c = run.cfg();
  require(c.input, "--input", "eval");
  run.input("annotations", c.input);
  auto rows = load_annotations(c.input);
  if (auto split = load_split(run, c.split)) rows = select_papers(rows, split->test);
  std::vector<const AnnotatedSentence*> gold_rows;
  for (const auto& [k, a] : unique_gold(rows)) gold_rows.push_back(a);
  if (gold_rows.empty()) throw DataError("no gold sentences to evaluate");
  std::vector<LabelSet> gold;
  for (const auto* a : gold_rows) gold.push_back(a->gold);

  EvalReport report;
  auto add = [&](const std::string& name, const std::vector<LabelSet>& pred) {
    SystemScores s{name, macro_prf1(gold, pred), std::nullopt};
    if (c.exact_match) s.exact_match = exact_match_ratio(gold, pred);
    report.systems.push_back(std::move(s));
  };
  std::optional<std::vector<LabelSet>> primary;
  if (!c.model.empty()) {
    run.input("model", c.model);
    auto model = MultiLabelModel::load(c.model);
    model.set_threshold(c.threshold);
    std::vector<LabelSet> pred;
    for (const auto* a : gold_rows) pred.push_back(model.predict_one(a->text).labels);
    add("native", pred);
    primary = pred;
  }
  if (!c.predictions.empty()) {
    run.input("predictions", c.predictions);
    const auto prow = load_annotations(c.predictions);
    std::map<std::pair<std::string, std::size_t>, LabelSet> by_key;
    for (const auto& p : prow) by_key[{p.paper_id, p.sentence_index}] = p.gold;
    std::vector<LabelSet> pred;
    for (const auto* a : gold_rows) {
      auto it = by_key.find({a->paper_id, a->sentence_index});
      if (it == by_key.end())
        throw DataError("no prediction for " + a->paper_id + " sentence " + std::to_string(a->sentence_index));
      pred.push_back(it->second);
    }
    add("predictions", pred);
    if (!primary) primary = pred;
  }
  const auto random = random_predict(gold.size(), c.seed);
  add("random", random);
  if (primary) {
    report.mcnemar_vs = {"random", mcnemar(decision_correctness(gold, *primary), decision_correctness(gold, random))};
  }
  run.write_json("eval.json", report.to_json());
  run.write("eval.txt", report.to_text());
}

inline void cmd_agree(Run& run) {
  const auto& c = run.cfg();
  require(c.input, "--input", "agree");
  run.input("annotations", c.input);
  const auto rows = load_annotations(c.input);
  const auto report = agreement(rows, c.level, c.resamples, c.seed);
  run.write_json("agreement.json", report.to_json());
  run.write("agreement.txt", report.to_text());
}

inline void cmd_analyze(Run& run) {
  const auto& c = run.cfg();
  require(c.input, "--input", "analyze");
  run.input("labels", c.input);
  const auto rows = load_annotations(c.input);
  if (c.analysis == "pmi") {
    std::vector<LabelSet> statements;
    for (const auto& [k, a] : unique_gold(rows)) statements.push_back(a->gold);
    run.write_table(pmi_table(pmi_matrix(statements)), "pmi");
    return;
  }
  require(c.papers, "--papers", "analyze " + c.analysis);
  const auto papers = load_corpus(run, c.papers);
  const auto corpus = join_labels(papers, rows);
  if (c.analysis == "trends") {
    const auto ts = yearly_type_share(corpus);
    run.write_table(trend_table(ts, "trends"), "trends");
    const std::string rolled = "trends_rolling_w" + std::to_string(c.window);
    run.write_table(trend_table(rolling_mean(ts, c.window), rolled), rolled);
  } else if (c.analysis == "venues") {
    run.write_table(venue_table(venue_profiles(corpus)), "venues");
  } else if (c.analysis == "converge") {
    const Venue ref = parse_venue_name(c.reference);
    const auto s = venue_similarity_series(venue_year_distributions(corpus), ref);
    for (const auto& msg : s.skipped) run.log() << "skipped " << msg << "\n";
    run.write_table(similarity_table(s), "converge_" + venue_name(ref));
  } else if (c.analysis == "diversity") {
    run.write_table(diversity_table(unique_types_per_paper(corpus)), "diversity");
  } else if (c.analysis == "citations") {
    CitationFilter f;
    if (!c.venue.empty()) f.venue = parse_venue_name(c.venue);
    f.year = c.year;
    f.maturity = c.maturity;
    f.as_of_year = c.as_of_year;
    const std::string stem = "citations_" + (f.venue ? venue_name(*f.venue) : std::string("all")) + "_" +
                             (f.year ? std::to_string(*f.year) : std::string("all"));
    run.write_table(citation_table(citation_stats(corpus, f)), stem);
  } else {
    throw UsageError("unknown analysis '" + c.analysis + "'");
  }
}

inline int exit_code_for(const std::exception& e, const char** kind) {
  if (dynamic_cast<const UsageError*>(&e)) {
    *kind = "usage";
    return 1;
  }
  if (dynamic_cast<const TransportError*>(&e)) {
    *kind = "transport";
    return 3;
  }
  *kind = "data";
  return 2;
}

inline std::string one_line(std::string s) {
  for (auto& ch : s) {
    if (ch == '\n' || ch == '\r') ch = ' ';
    if (ch == '"') ch = '\'';
  }
  return s;
}

}  // namespace app_detail

/// Run one subcommand. Returns the process exit status (0 ok, 1 usage,
/// 2 data error, 3 transport error); failures print a single
/// `error: kind=... code=... message="..."` line on `err`.
inline int execute(RunConfig cfg, std::ostream& err = std::cerr) {
  using namespace app_detail;
  try {
    // The drawn seed goes into the manifest; the echoed config then replays
    // deterministically.
    if (cfg.randomize) {
      cfg.seed = std::random_device{}();
      cfg.randomize = false;
    }
    const auto& cmds = subcommands();
    if (std::find(cmds.begin(), cmds.end(), cfg.command) == cmds.end())
      throw UsageError("unknown subcommand '" + cfg.command + "'");
    if (cfg.command == "analyze") {
      const auto& an = analyses();
      if (std::find(an.begin(), an.end(), cfg.analysis) == an.end())
        throw UsageError("unknown analysis '" + cfg.analysis + "'");
    }
    Run run(cfg, err);
    if (cfg.command == "ingest") cmd_ingest(run);
    else if (cfg.command == "stats") cmd_stats(run);
    else if (cfg.command == "split") cmd_split(run);
    else if (cfg.command == "train") cmd_train(run);
    else if (cfg.command == "predict") cmd_predict(run);
    else if (cfg.command == "eval") cmd_eval(run);
    else if (cfg.command == "agree") cmd_agree(run);
    else cmd_analyze(run);
    run.finish();
    return 0;
  } catch (const std::exception& e) {
    const char* kind = "data";
    const int code = exit_code_for(e, &kind);
    err << "error: kind=" << kind << " code=" << code << " message=\"" << one_line(e.what()) << "\"\n";
    return code;
  }
}

}  // namespace contribscope
