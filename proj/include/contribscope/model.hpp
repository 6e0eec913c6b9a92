#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <future>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "annotations.hpp"
#include "error.hpp"
#include "features.hpp"
#include "rng.hpp"
#include "taxonomy.hpp"

namespace contribscope {

inline constexpr int kModelFormatVersion = 1;

struct TrainConfig {
  FeatureConfig features;
  double learning_rate = 5.0;
  std::size_t epochs = 20;
  std::size_t batch_size = 32;
  double l2 = 1e-6;
  bool positive_weighting = false;  // weight positives by negatives/positives
  std::uint64_t seed = 42;
  double threshold = 0.5;
  bool parallel = true;  // train the eight labels concurrently

  void validate() const {
    if (features.dim == 0) throw UsageError("hash dimension must be positive");
    if (!(learning_rate > 0.0)) throw UsageError("learning rate must be positive");
    if (l2 < 0.0 || learning_rate * l2 >= 1.0) throw UsageError("l2 must satisfy 0 <= l2 < 1/learning_rate");
    if (batch_size == 0) throw UsageError("batch size must be positive");
    if (!(threshold > 0.0 && threshold < 1.0)) throw UsageError("threshold must lie in (0, 1)");
  }
};

// --- logistic pieces shared by training and the gradient check -------------

/// log(1 + exp(-z)) for a positive target, log(1 + exp(z)) otherwise.
inline double logistic_loss(double z, bool positive) {
  const double m = positive ? -z : z;
  return m > 0 ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m));
}

inline double sigmoid(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

/// d logistic_loss / dz.
inline double logistic_loss_dz(double z, bool positive) { return sigmoid(z) - (positive ? 1.0 : 0.0); }

inline double sparse_dot(const std::vector<double>& w, const FeatureVector& x) {
  double s = 0.0;
  for (const auto& [i, v] : x.entries) s += w[i] * v;
  return s;
}

struct LinearClassifier {
  std::vector<double> weights;
  double bias = 0.0;

  double margin(const FeatureVector& x) const { return sparse_dot(weights, x) + bias; }
  friend bool operator==(const LinearClassifier&, const LinearClassifier&) = default;
};

struct Objective {
  double loss = 0.0;
  std::vector<double> grad_weights;
  double grad_bias = 0.0;
};

/// Regularized per-label objective
///   L = (1/N) sum_i c_i * logistic_loss(w.x_i + b, y_i) + (l2/2) |w|^2
/// with c_i = positive_weight for positive targets and 1 otherwise, and its
/// dense gradient.
inline Objective label_objective(const LinearClassifier& clf, std::span<const FeatureVector> xs,
                                 std::span<const std::uint8_t> targets, double l2, double positive_weight = 1.0) {
  Objective out;
  out.grad_weights.assign(clf.weights.size(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const bool y = targets[i] != 0;
    const double c = y ? positive_weight : 1.0;
    const double z = clf.margin(xs[i]);
    out.loss += c * logistic_loss(z, y) * inv_n;
    const double dz = c * logistic_loss_dz(z, y) * inv_n;
    for (const auto& [j, v] : xs[i].entries) out.grad_weights[j] += dz * v;
    out.grad_bias += dz;
  }
  double sq = 0.0;
  for (std::size_t j = 0; j < clf.weights.size(); ++j) {
    sq += clf.weights[j] * clf.weights[j];
    out.grad_weights[j] += l2 * clf.weights[j];
  }
  out.loss += 0.5 * l2 * sq;
  return out;
}

// --- model --------------------------------------------------------------------

struct LabelTrainStats {
  std::size_t positives = 0;
  double positive_weight = 1.0;
  double initial_loss = 0.0;
  double final_loss = 0.0;
};

struct TrainReport {
  std::size_t examples = 0;
  std::array<LabelTrainStats, kNumLabels> labels{};

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["examples"] = examples;
    nlohmann::ordered_json per;
    for (Label l : kAllLabels) {
      const auto& s = labels[index_of(l)];
      per[render_label(l)] = {{"positives", s.positives},
                              {"positive_weight", s.positive_weight},
                              {"initial_loss", s.initial_loss},
                              {"final_loss", s.final_loss}};
    }
    j["labels"] = per;
    return j;
  }
};

struct Prediction {
  LabelSet labels;
  std::array<double, kNumLabels> scores{};
};

/// Eight independent L2-regularized logistic classifiers over hashed n-gram
/// features (binary relevance).
class MultiLabelModel {
 public:
  MultiLabelModel() = default;
  explicit MultiLabelModel(TrainConfig cfg) : config_(std::move(cfg)) {
    for (auto& c : classifiers_) c.weights.assign(config_.features.dim, 0.0);
  }

  const TrainConfig& config() const { return config_; }
  double threshold() const { return config_.threshold; }
  void set_threshold(double t) { config_.threshold = t; }
  LinearClassifier& classifier(Label l) { return classifiers_[index_of(l)]; }
  const LinearClassifier& classifier(Label l) const { return classifiers_[index_of(l)]; }

  /// Logistic score with the margin clamped to [-30, 30], so scores stay
  /// strictly inside (0, 1).
  double score(Label l, const FeatureVector& x) const {
    const double z = std::clamp(classifier(l).margin(x), -30.0, 30.0);
    return sigmoid(z);
  }

  Prediction predict_one(std::string_view sentence) const { return predict_features(featurize(sentence, config_.features)); }

  Prediction predict_features(const FeatureVector& x) const {
    Prediction p;
    for (Label l : kAllLabels) {
      const double s = score(l, x);
      p.scores[index_of(l)] = s;
      if (s >= config_.threshold) p.labels.insert(l);
    }
    return p;
  }

  std::vector<Prediction> predict(const std::vector<std::string>& sentences) const {
    std::vector<Prediction> out;
    out.reserve(sentences.size());
    for (const auto& s : sentences) out.push_back(predict_one(s));
    return out;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["format"] = "contribscope-model";
    j["format_version"] = kModelFormatVersion;
    const auto& c = config_;
    j["config"] = {{"dim", c.features.dim},
                   {"unigrams", c.features.unigrams},
                   {"bigrams", c.features.bigrams},
                   {"l2_normalize", c.features.l2_normalize},
                   {"learning_rate", c.learning_rate},
                   {"epochs", c.epochs},
                   {"batch_size", c.batch_size},
                   {"l2", c.l2},
                   {"positive_weighting", c.positive_weighting},
                   {"seed", c.seed}};
    j["threshold"] = c.threshold;
    nlohmann::ordered_json cls = nlohmann::ordered_json::array();
    for (Label l : kAllLabels) {
      const auto& clf = classifier(l);
      nlohmann::ordered_json w = nlohmann::ordered_json::array();
      for (std::size_t i = 0; i < clf.weights.size(); ++i) {
        if (clf.weights[i] != 0.0) w.push_back({i, clf.weights[i]});
      }
      cls.push_back({{"label", render_label(l)}, {"bias", clf.bias}, {"weights", std::move(w)}});
    }
    j["classifiers"] = std::move(cls);
    return j;
  }

  static MultiLabelModel from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "contribscope-model") throw DataError("not a contribscope model file");
    const int version = j.value("format_version", -1);
    if (version != kModelFormatVersion)
      throw DataError("unsupported model format version " + std::to_string(version) + " (expected " +
                      std::to_string(kModelFormatVersion) + ")");
    TrainConfig c;
    const auto& jc = j.at("config");
    c.features.dim = jc.at("dim").get<std::uint32_t>();
    c.features.unigrams = jc.at("unigrams").get<bool>();
    c.features.bigrams = jc.at("bigrams").get<bool>();
    c.features.l2_normalize = jc.at("l2_normalize").get<bool>();
    c.learning_rate = jc.at("learning_rate").get<double>();
    c.epochs = jc.at("epochs").get<std::size_t>();
    c.batch_size = jc.at("batch_size").get<std::size_t>();
    c.l2 = jc.at("l2").get<double>();
    c.positive_weighting = jc.at("positive_weighting").get<bool>();
    c.seed = jc.at("seed").get<std::uint64_t>();
    c.threshold = j.at("threshold").get<double>();
    c.validate();
    MultiLabelModel m(c);
    const auto& cls = j.at("classifiers");
    if (!cls.is_array() || cls.size() != kNumLabels) throw DataError("model must hold exactly 8 classifiers");
    for (const auto& jc2 : cls) {
      auto& clf = m.classifier(parse_label(jc2.at("label").get<std::string>()));
      clf.bias = jc2.at("bias").get<double>();
      for (const auto& e : jc2.at("weights")) {
        const auto idx = e.at(0).get<std::size_t>();
        if (idx >= clf.weights.size()) throw DataError("weight index out of range in model file");
        const double v = e.at(1).get<double>();
        if (!std::isfinite(v)) throw DataError("non-finite weight in model file");
        clf.weights[idx] = v;
      }
    }
    return m;
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out << to_json().dump() << '\n';
  }

  static MultiLabelModel load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open model file " + path);
    try {
      return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("malformed model file: ") + e.what());
    }
  }

  friend bool operator==(const MultiLabelModel& a, const MultiLabelModel& b) {
    return a.classifiers_ == b.classifiers_ && a.config_.threshold == b.config_.threshold;
  }

 private:
  TrainConfig config_;
  std::array<LinearClassifier, kNumLabels> classifiers_;
};

namespace model_detail {

// Full objective evaluated sparsely: weights are scale * v.
inline double sparse_objective(const std::vector<double>& v, double scale, double bias,
                               const std::vector<FeatureVector>& xs, const std::vector<std::uint8_t>& ys, double l2,
                               double positive_weight) {
  double loss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const bool y = ys[i] != 0;
    const double z = scale * sparse_dot(v, xs[i]) + bias;
    loss += (y ? positive_weight : 1.0) * logistic_loss(z, y);
  }
  loss /= static_cast<double>(xs.size());
  double sq = 0.0;
  for (double x : v) sq += x * x;
  return loss + 0.5 * l2 * scale * scale * sq;
}

// Mini-batch gradient descent on label_objective. L2 shrinkage is applied
// through a global scale factor so each step only touches the features
// present in the batch.
inline LabelTrainStats train_label(LinearClassifier& clf, const std::vector<FeatureVector>& xs,
                                   const std::vector<std::uint8_t>& ys, const TrainConfig& cfg, std::uint64_t seed) {
  LabelTrainStats st;
  st.positives = static_cast<std::size_t>(std::count(ys.begin(), ys.end(), std::uint8_t{1}));
  const std::size_t negatives = ys.size() - st.positives;
  if (cfg.positive_weighting && st.positives > 0)
    st.positive_weight = static_cast<double>(negatives) / static_cast<double>(st.positives);

  std::vector<double>& v = clf.weights;
  std::fill(v.begin(), v.end(), 0.0);
  double scale = 1.0;
  double bias = 0.0;
  st.initial_loss = sparse_objective(v, scale, bias, xs, ys, cfg.l2, st.positive_weight);

  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  const double eta = cfg.learning_rate;
  const double decay = 1.0 - eta * cfg.l2;
  std::vector<double> dz;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle(order, rng);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const double inv_b = 1.0 / static_cast<double>(end - start);
      dz.assign(end - start, 0.0);
      double grad_bias = 0.0;
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t i = order[k];
        const bool y = ys[i] != 0;
        const double z = scale * sparse_dot(v, xs[i]) + bias;
        dz[k - start] = (y ? st.positive_weight : 1.0) * logistic_loss_dz(z, y) * inv_b;
        grad_bias += dz[k - start];
      }
      scale *= decay;
      const double step = eta / scale;
      for (std::size_t k = start; k < end; ++k) {
        for (const auto& [j, x] : xs[order[k]].entries) v[j] -= step * dz[k - start] * x;
      }
      bias -= eta * grad_bias;
      if (scale < 1e-6) {
        for (auto& x : v) x *= scale;
        scale = 1.0;
      }
    }
  }
  for (auto& x : v) x *= scale;
  clf.bias = bias;
  st.final_loss = sparse_objective(v, 1.0, bias, xs, ys, cfg.l2, st.positive_weight);
  return st;
}

}  // namespace model_detail

struct TrainResult {
  MultiLabelModel model;
  TrainReport report;
};

/// Train one classifier per label on binary present/absent targets. Each
/// label draws its batch order from its own seeded stream, so labels do not
/// influence one another.
inline TrainResult train_model(const std::vector<AnnotatedSentence>& train, const TrainConfig& cfg) {
  cfg.validate();
  if (train.empty()) throw DataError("training set is empty");
  std::vector<FeatureVector> xs;
  xs.reserve(train.size());
  for (const auto& a : train) xs.push_back(featurize(a.text, cfg.features));

  TrainResult r{MultiLabelModel(cfg), {}};
  r.report.examples = train.size();
  auto run = [&](Label l) {
    std::vector<std::uint8_t> ys(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) ys[i] = train[i].gold.contains(l) ? 1 : 0;
    r.report.labels[index_of(l)] =
        model_detail::train_label(r.model.classifier(l), xs, ys, cfg, derive_seed(cfg.seed, index_of(l)));
  };
  if (cfg.parallel) {
    std::vector<std::future<void>> jobs;
    for (Label l : kAllLabels) jobs.push_back(std::async(std::launch::async, run, l));
    for (auto& j : jobs) j.get();
  } else {
    for (Label l : kAllLabels) run(l);
  }
  return r;
}

/// Uniform random baseline: each label is included independently with
/// probability 1/2.
inline std::vector<LabelSet> random_predict(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<LabelSet> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(LabelSet::from_mask(static_cast<std::uint8_t>(rng() >> 56)));
  return out;
}

}  // namespace contribscope
