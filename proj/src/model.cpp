#include "ablp/model.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <iterator>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "ablp/parallel.hpp"
#include "ablp/seeding.hpp"

namespace ablp {

using nlohmann::json;

std::string_view to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::forest: return "forest";
    case ClassifierKind::tree: return "tree";
    case ClassifierKind::logistic: return "logistic";
  }
  return "?";
}

ClassifierKind parse_classifier_kind(std::string_view name) {
  for (auto kind : {ClassifierKind::forest, ClassifierKind::tree, ClassifierKind::logistic}) {
    if (to_string(kind) == name) return kind;
  }
  throw std::invalid_argument("unknown classifier '" + std::string(name) + "'");
}

ClassifierKind kind_of(const Hyperparameters& params) {
  switch (params.index()) {
    case 0: return ClassifierKind::forest;
    case 1: return ClassifierKind::tree;
    default: return ClassifierKind::logistic;
  }
}

Hyperparameters default_hyperparameters(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::forest: return ForestParams{};
    case ClassifierKind::tree: return TreeParams{};
    case ClassifierKind::logistic: return LogisticParams{};
  }
  throw std::logic_error("unknown classifier kind");
}

double DecisionTree::leaf_value(std::span<const NodeId> x) const {
  std::size_t at = 0;
  while (nodes[at].feature >= 0) {
    const auto& node = nodes[at];
    at = static_cast<double>(x[static_cast<std::size_t>(node.feature)]) <= node.threshold
             ? static_cast<std::size_t>(node.left)
             : static_cast<std::size_t>(node.right);
  }
  return nodes[at].value;
}

namespace {

double sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double softplus(double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))); }

class TreeBuilder {
 public:
  TreeBuilder(FeatureView rows, std::span<const std::uint8_t> labels, int max_depth, int min_leaf,
              std::size_t subsample, std::uint64_t seed)
      : rows_(rows),
        labels_(labels),
        max_depth_(max_depth),
        min_leaf_(static_cast<std::size_t>(std::max(1, min_leaf))),
        subsample_(subsample),
        engine_(seed),
        features_(rows.width) {
    for (std::size_t f = 0; f < features_.size(); ++f) features_[f] = f;
  }

  DecisionTree grow(bool bootstrap) {
    const std::size_t n = rows_.rows();
    work_.resize(n);
    if (bootstrap) {
      for (auto& idx : work_) idx = static_cast<std::size_t>(uniform_below(engine_, n));
    } else {
      for (std::size_t i = 0; i < n; ++i) work_[i] = i;
    }
    tree_.nodes.clear();
    build(0, n, 0);
    return std::move(tree_);
  }

 private:
  int build(std::size_t begin, std::size_t end, int depth) {
    const std::size_t n = end - begin;
    std::size_t positives = 0;
    for (std::size_t i = begin; i < end; ++i) positives += labels_[work_[i]];

    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.push_back({-1, 0.0, -1, -1, static_cast<double>(positives) / static_cast<double>(n)});
    if (positives == 0 || positives == n) return id;
    if (max_depth_ > 0 && depth >= max_depth_) return id;
    if (n < 2 * min_leaf_) return id;

    // Candidate features: all of them in index order, or a fresh sample.
    std::size_t candidates = features_.size();
    if (subsample_ < features_.size()) {
      for (std::size_t i = 0; i < subsample_; ++i) {
        const auto j = i + static_cast<std::size_t>(uniform_below(engine_, features_.size() - i));
        std::swap(features_[i], features_[j]);
      }
      candidates = subsample_;
    }

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_purity = -1.0;
    for (std::size_t c = 0; c < candidates; ++c) {
      const std::size_t f = features_[c];
      column_.clear();
      for (std::size_t i = begin; i < end; ++i) column_.emplace_back(rows_.row(work_[i])[f], labels_[work_[i]]);
      std::sort(column_.begin(), column_.end());
      if (column_.front().first == column_.back().first) continue;

      // Maximizing sum of (p^2 + q^2) / size over both sides minimizes the
      // weighted Gini impurity.
      double left_pos = 0.0;
      for (std::size_t k = 0; k + 1 < n; ++k) {
        left_pos += column_[k].second;
        if (column_[k].first == column_[k + 1].first) continue;
        const std::size_t nl = k + 1;
        const std::size_t nr = n - nl;
        if (nl < min_leaf_ || nr < min_leaf_) continue;
        const double left_neg = static_cast<double>(nl) - left_pos;
        const double right_pos = static_cast<double>(positives) - left_pos;
        const double right_neg = static_cast<double>(nr) - right_pos;
        const double purity = (left_pos * left_pos + left_neg * left_neg) / static_cast<double>(nl) +
                              (right_pos * right_pos + right_neg * right_neg) / static_cast<double>(nr);
        if (purity > best_purity) {
          best_purity = purity;
          best_feature = static_cast<int>(f);
          best_threshold = (static_cast<double>(column_[k].first) + static_cast<double>(column_[k + 1].first)) / 2.0;
        }
      }
    }
    if (best_feature < 0) return id;

    const auto f = static_cast<std::size_t>(best_feature);
    const auto mid = std::stable_partition(work_.begin() + static_cast<std::ptrdiff_t>(begin),
                                           work_.begin() + static_cast<std::ptrdiff_t>(end),
                                           [&](std::size_t idx) {
                                             return static_cast<double>(rows_.row(idx)[f]) <= best_threshold;
                                           });
    const auto split_at = static_cast<std::size_t>(mid - work_.begin());
    const int left = build(begin, split_at, depth + 1);
    const int right = build(split_at, end, depth + 1);
    auto& node = tree_.nodes[static_cast<std::size_t>(id)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = left;
    node.right = right;
    return id;
  }

  FeatureView rows_;
  std::span<const std::uint8_t> labels_;
  int max_depth_;
  std::size_t min_leaf_;
  std::size_t subsample_;
  Engine engine_;
  std::vector<std::size_t> features_;
  std::vector<std::size_t> work_;
  std::vector<std::pair<NodeId, std::uint8_t>> column_;
  DecisionTree tree_;
};

std::vector<DecisionTree> train_trees(FeatureView rows, std::span<const std::uint8_t> labels,
                                      const ForestParams& params, std::uint64_t seed, std::size_t threads) {
  if (params.tree_count < 1) throw std::invalid_argument("tree_count must be >= 1");
  if (params.min_leaf < 1) throw std::invalid_argument("min_leaf must be >= 1");
  if (params.max_depth < 0) throw std::invalid_argument("max_depth must be >= 0");
  std::size_t subsample = params.feature_subsample > 0
                              ? static_cast<std::size_t>(params.feature_subsample)
                              : static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(rows.width))));
  subsample = std::clamp<std::size_t>(subsample, 1, rows.width);

  std::vector<DecisionTree> trees(static_cast<std::size_t>(params.tree_count));
  parallel_for(trees.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      TreeBuilder builder(rows, labels, params.max_depth, params.min_leaf, subsample, derive_seed(seed, t));
      trees[t] = builder.grow(params.bootstrap);
    }
  });
  return trees;
}

LogisticModel train_logistic(FeatureView rows, std::span<const std::uint8_t> labels, const LogisticParams& params,
                             std::vector<double>& losses) {
  if (!(params.learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
  if (params.epochs < 0) throw std::invalid_argument("epochs must be >= 0");
  if (params.l2 < 0.0) throw std::invalid_argument("l2 must be >= 0");

  const std::size_t n = rows.rows();
  const std::size_t k = rows.width;
  LogisticModel m{std::vector<double>(k, 0.0), std::vector<double>(k, 1.0), std::vector<double>(k, 0.0), 0.0};

  for (std::size_t i = 0; i < n; ++i) {
    const auto r = rows.row(i);
    for (std::size_t j = 0; j < k; ++j) m.mean[j] += r[j];
  }
  for (auto& mu : m.mean) mu /= static_cast<double>(n);
  std::vector<double> var(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = rows.row(i);
    for (std::size_t j = 0; j < k; ++j) var[j] += (r[j] - m.mean[j]) * (r[j] - m.mean[j]);
  }
  for (std::size_t j = 0; j < k; ++j) {
    const double sd = std::sqrt(var[j] / static_cast<double>(n));
    m.scale[j] = sd > 0.0 ? sd : 1.0;
  }

  std::vector<double> z(n * k);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = rows.row(i);
    for (std::size_t j = 0; j < k; ++j) z[i * k + j] = (r[j] - m.mean[j]) / m.scale[j];
  }

  std::vector<double> grad(k);
  auto step = [&](bool update) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_bias = 0.0;
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double t = m.bias;
      for (std::size_t j = 0; j < k; ++j) t += m.weights[j] * z[i * k + j];
      const double y = labels[i];
      loss += softplus(t) - y * t;
      const double residual = sigmoid(t) - y;
      grad_bias += residual;
      for (std::size_t j = 0; j < k; ++j) grad[j] += residual * z[i * k + j];
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    loss *= inv_n;
    for (double w : m.weights) loss += 0.5 * params.l2 * w * w;
    if (update) {
      for (std::size_t j = 0; j < k; ++j) m.weights[j] -= params.learning_rate * (grad[j] * inv_n + params.l2 * m.weights[j]);
      m.bias -= params.learning_rate * grad_bias * inv_n;
    }
    return loss;
  };
  losses.clear();
  for (int epoch = 0; epoch < params.epochs; ++epoch) losses.push_back(step(true));
  losses.push_back(step(false));
  return m;
}

}  // namespace

Classifier::Classifier(Hyperparameters params, std::size_t feature_length, std::uint64_t seed, ModelPayload payload)
    : params_(std::move(params)), feature_length_(feature_length), seed_(seed), payload_(std::move(payload)) {
  if (feature_length_ == 0) throw ModelError("feature_length must be positive");
  const bool logistic = kind() == ClassifierKind::logistic;
  if (logistic != std::holds_alternative<LogisticModel>(payload_)) throw ModelError("payload does not match classifier kind");
  if (auto* trees = std::get_if<std::vector<DecisionTree>>(&payload_)) {
    if (trees->empty()) throw ModelError("model has no trees");
    if (kind() == ClassifierKind::tree && trees->size() != 1) throw ModelError("tree model must hold exactly one tree");
    for (const auto& tree : *trees) {
      const auto count = static_cast<int>(tree.nodes.size());
      if (count == 0) throw ModelError("empty tree");
      for (int i = 0; i < count; ++i) {
        const auto& node = tree.nodes[static_cast<std::size_t>(i)];
        if (node.feature >= static_cast<int>(feature_length_)) throw ModelError("tree feature index out of range");
        if (node.feature >= 0 && (node.left <= i || node.right <= i || node.left >= count || node.right >= count)) {
          throw ModelError("tree child index out of range");
        }
        if (!(node.value >= 0.0 && node.value <= 1.0)) throw ModelError("leaf value outside [0,1]");
      }
    }
  } else {
    const auto& m = std::get<LogisticModel>(payload_);
    if (m.mean.size() != feature_length_ || m.scale.size() != feature_length_ || m.weights.size() != feature_length_) {
      throw ModelError("logistic parameter count does not match feature_length");
    }
  }
}

double Classifier::predict_score(std::span<const NodeId> x) const {
  if (x.size() != feature_length_) {
    throw ModelError("feature length mismatch: model expects " + std::to_string(feature_length_) + ", got " +
                     std::to_string(x.size()));
  }
  if (const auto* m = std::get_if<LogisticModel>(&payload_)) {
    double t = m->bias;
    for (std::size_t j = 0; j < x.size(); ++j) t += m->weights[j] * ((x[j] - m->mean[j]) / m->scale[j]);
    return sigmoid(t);
  }
  const auto& trees = std::get<std::vector<DecisionTree>>(payload_);
  if (kind() == ClassifierKind::tree) return trees.front().leaf_value(x);
  std::size_t votes = 0;
  for (const auto& tree : trees) votes += tree.leaf_value(x) >= 0.5 ? 1 : 0;
  return static_cast<double>(votes) / static_cast<double>(trees.size());
}

int Classifier::predict_label(std::span<const NodeId> x, double epsilon) const {
  return predict_score(x) >= epsilon ? 1 : 0;
}

std::vector<double> Classifier::predict_scores(FeatureView rows, std::size_t threads) const {
  if (rows.width != feature_length_) {
    throw ModelError("feature length mismatch: model expects " + std::to_string(feature_length_) + ", got " +
                     std::to_string(rows.width));
  }
  std::vector<double> scores(rows.rows());
  parallel_for(scores.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) scores[i] = predict_score(rows.row(i));
  });
  return scores;
}

Classifier train(FeatureView rows, std::span<const std::uint8_t> labels, const Hyperparameters& params,
                 std::uint64_t seed, std::size_t threads) {
  if (rows.width == 0) throw DataError("feature rows are empty");
  if (rows.values.size() % rows.width != 0) throw DataError("ragged feature rows");
  if (rows.rows() != labels.size()) throw DataError("row count does not match label count");
  std::size_t positives = 0;
  for (auto y : labels) {
    if (y > 1) throw DataError("labels must be 0 or 1");
    positives += y;
  }
  if (positives == 0 || positives == labels.size()) throw DataError("training data must contain both classes");

  if (const auto* lp = std::get_if<LogisticParams>(&params)) {
    std::vector<double> losses;
    auto weights = train_logistic(rows, labels, *lp, losses);
    Classifier model(params, rows.width, seed, std::move(weights));
    model.set_loss_history(std::move(losses));
    return model;
  }
  ForestParams forest;
  if (const auto* fp = std::get_if<ForestParams>(&params)) {
    forest = *fp;
  } else {
    const auto& tp = std::get<TreeParams>(params);
    forest = ForestParams{1, tp.max_depth, tp.min_leaf, static_cast<int>(rows.width), false};
  }
  return Classifier(params, rows.width, seed, train_trees(rows, labels, forest, seed, threads));
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

json params_to_json(const Hyperparameters& params) {
  return std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ForestParams>) {
          return {{"tree_count", p.tree_count}, {"max_depth", p.max_depth}, {"min_leaf", p.min_leaf},
                  {"feature_subsample", p.feature_subsample}, {"bootstrap", p.bootstrap}};
        } else if constexpr (std::is_same_v<T, TreeParams>) {
          return {{"max_depth", p.max_depth}, {"min_leaf", p.min_leaf}};
        } else {
          return {{"learning_rate", p.learning_rate}, {"epochs", p.epochs}, {"l2", p.l2}};
        }
      },
      params);
}

Hyperparameters params_from_json(ClassifierKind kind, const json& j) {
  switch (kind) {
    case ClassifierKind::forest:
      return ForestParams{j.at("tree_count").get<int>(), j.at("max_depth").get<int>(), j.at("min_leaf").get<int>(),
                          j.at("feature_subsample").get<int>(), j.at("bootstrap").get<bool>()};
    case ClassifierKind::tree:
      return TreeParams{j.at("max_depth").get<int>(), j.at("min_leaf").get<int>()};
    case ClassifierKind::logistic:
      return LogisticParams{j.at("learning_rate").get<double>(), j.at("epochs").get<int>(), j.at("l2").get<double>()};
  }
  throw ModelError("unknown classifier kind");
}

json config_to_json(const FeatureConfig& c) {
  return {{"a", c.a}, {"b", c.b}, {"strategy", std::string(to_string(c.strategy))},
          {"seed", c.seed}, {"mask_pair_edge", c.mask_pair_edge}};
}

FeatureConfig config_from_json(const json& j) {
  FeatureConfig c;
  c.a = j.at("a").get<int>();
  c.b = j.at("b").get<int>();
  c.strategy = parse_strategy(j.at("strategy").get<std::string>());
  c.seed = j.at("seed").get<std::uint64_t>();
  c.mask_pair_edge = j.at("mask_pair_edge").get<bool>();
  c.validate();
  return c;
}

json payload_to_json(const ModelPayload& payload) {
  if (const auto* m = std::get_if<LogisticModel>(&payload)) {
    return {{"mean", m->mean}, {"scale", m->scale}, {"weights", m->weights}, {"bias", m->bias}};
  }
  json trees = json::array();
  for (const auto& tree : std::get<std::vector<DecisionTree>>(payload)) {
    json feature = json::array(), threshold = json::array(), left = json::array(), right = json::array(),
         value = json::array();
    for (const auto& node : tree.nodes) {
      feature.push_back(node.feature);
      threshold.push_back(node.threshold);
      left.push_back(node.left);
      right.push_back(node.right);
      value.push_back(node.value);
    }
    trees.push_back({{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right}, {"value", value}});
  }
  return {{"trees", trees}};
}

ModelPayload payload_from_json(ClassifierKind kind, const json& j) {
  if (kind == ClassifierKind::logistic) {
    return LogisticModel{j.at("mean").get<std::vector<double>>(), j.at("scale").get<std::vector<double>>(),
                         j.at("weights").get<std::vector<double>>(), j.at("bias").get<double>()};
  }
  std::vector<DecisionTree> trees;
  for (const auto& t : j.at("trees")) {
    const auto feature = t.at("feature").get<std::vector<int>>();
    const auto threshold = t.at("threshold").get<std::vector<double>>();
    const auto left = t.at("left").get<std::vector<int>>();
    const auto right = t.at("right").get<std::vector<int>>();
    const auto value = t.at("value").get<std::vector<double>>();
    const std::size_t count = feature.size();
    if (threshold.size() != count || left.size() != count || right.size() != count || value.size() != count) {
      throw ModelError("tree arrays have inconsistent lengths");
    }
    DecisionTree tree;
    tree.nodes.reserve(count);
    for (std::size_t i = 0; i < count; ++i) tree.nodes.push_back({feature[i], threshold[i], left[i], right[i], value[i]});
    trees.push_back(std::move(tree));
  }
  return trees;
}

}  // namespace

std::string save_model(const Classifier& model) {
  json doc;
  doc["version"] = kModelFormatVersion;
  doc["kind"] = std::string(to_string(model.kind()));
  doc["hyperparameters"] = params_to_json(model.hyperparameters());
  doc["feature_length"] = model.feature_length();
  doc["seed"] = model.seed();
  doc["featurize_config"] = model.featurize_config() ? config_to_json(*model.featurize_config()) : json(nullptr);
  doc["payload"] = payload_to_json(model.payload());
  return doc.dump() + "\n";
}

void save_model(const Classifier& model, std::ostream& out) { out << save_model(model); }

Classifier load_model(std::string_view document) {
  try {
    const json doc = json::parse(document);
    if (!doc.is_object()) throw ModelError("model document is not a JSON object");
    const auto version = doc.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw ModelError("unsupported model format version " + std::to_string(version));
    }
    const auto kind = parse_classifier_kind(doc.at("kind").get<std::string>());
    Classifier model(params_from_json(kind, doc.at("hyperparameters")), doc.at("feature_length").get<std::size_t>(),
                     doc.at("seed").get<std::uint64_t>(), payload_from_json(kind, doc.at("payload")));
    if (const auto& fc = doc.at("featurize_config"); !fc.is_null()) {
      const auto config = config_from_json(fc);
      if (config.row_length() != model.feature_length()) {
        throw ModelError("featurize_config does not match feature_length");
      }
      model.set_featurize_config(config);
    }
    return model;
  } catch (const ModelError&) {
    throw;
  } catch (const std::exception& e) {
    throw ModelError(std::string("invalid model document: ") + e.what());
  }
}

Classifier load_model(std::istream& in) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return load_model(text);
}

}  // namespace ablp
