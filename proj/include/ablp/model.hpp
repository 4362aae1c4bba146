#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ablp/featurize.hpp"
#include "ablp/types.hpp"

namespace ablp {

enum class ClassifierKind { forest, tree, logistic };

std::string_view to_string(ClassifierKind kind);
ClassifierKind parse_classifier_kind(std::string_view name);

/// Bagged CART trees. max_depth 0 means unbounded; feature_subsample 0 means
/// floor(sqrt(feature_length)).
struct ForestParams {
  int tree_count = 100;
  int max_depth = 0;
  int min_leaf = 1;
  int feature_subsample = 0;
  bool bootstrap = true;
  friend bool operator==(const ForestParams&, const ForestParams&) = default;
};

struct TreeParams {
  int max_depth = 0;
  int min_leaf = 1;
  friend bool operator==(const TreeParams&, const TreeParams&) = default;
};

/// Full-batch gradient descent on standardized features.
struct LogisticParams {
  double learning_rate = 0.1;
  int epochs = 200;
  double l2 = 0.0;
  friend bool operator==(const LogisticParams&, const LogisticParams&) = default;
};

using Hyperparameters = std::variant<ForestParams, TreeParams, LogisticParams>;

ClassifierKind kind_of(const Hyperparameters& params);
Hyperparameters default_hyperparameters(ClassifierKind kind);

/// Axis-aligned binary tree; a node with feature < 0 is a leaf whose value is
/// the positive-class fraction of the training rows that reached it.
struct DecisionTree {
  struct Node {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
    friend bool operator==(const Node&, const Node&) = default;
  };
  std::vector<Node> nodes;

  double leaf_value(std::span<const NodeId> x) const;
  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;
};

struct LogisticModel {
  std::vector<double> mean;
  std::vector<double> scale;
  std::vector<double> weights;
  double bias = 0.0;
  friend bool operator==(const LogisticModel&, const LogisticModel&) = default;
};

using ModelPayload = std::variant<std::vector<DecisionTree>, LogisticModel>;

/// Trained scoring function: feature row -> [0, 1].
class Classifier {
 public:
  Classifier(Hyperparameters params, std::size_t feature_length, std::uint64_t seed, ModelPayload payload);

  ClassifierKind kind() const { return kind_of(params_); }
  const Hyperparameters& hyperparameters() const { return params_; }
  std::size_t feature_length() const { return feature_length_; }
  std::uint64_t seed() const { return seed_; }
  const ModelPayload& payload() const { return payload_; }

  /// Featurization settings the model was trained with, when known.
  const std::optional<FeatureConfig>& featurize_config() const { return featurize_config_; }
  void set_featurize_config(const FeatureConfig& config) { featurize_config_ = config; }

  /// Per-epoch training loss (logistic only; empty otherwise). Not persisted.
  const std::vector<double>& loss_history() const { return loss_history_; }
  void set_loss_history(std::vector<double> losses) { loss_history_ = std::move(losses); }

  /// Forest: fraction of trees voting positive (leaf value >= 0.5).
  /// Tree: leaf positive fraction. Logistic: sigmoid of the linear score.
  /// Throws ModelError when x.size() != feature_length().
  double predict_score(std::span<const NodeId> x) const;
  int predict_label(std::span<const NodeId> x, double epsilon = 0.5) const;
  std::vector<double> predict_scores(FeatureView rows, std::size_t threads = 1) const;

 private:
  Hyperparameters params_;
  std::size_t feature_length_;
  std::uint64_t seed_;
  ModelPayload payload_;
  std::optional<FeatureConfig> featurize_config_;
  std::vector<double> loss_history_;
};

/// Deterministic in (rows, labels, params, seed); `threads` does not affect
/// the result. Throws DataError on ragged input or single-class labels.
Classifier train(FeatureView rows, std::span<const std::uint8_t> labels, const Hyperparameters& params,
                 std::uint64_t seed, std::size_t threads = 1);

inline constexpr int kModelFormatVersion = 1;

/// Versioned JSON model document.
std::string save_model(const Classifier& model);
void save_model(const Classifier& model, std::ostream& out);
/// Throws ModelError on malformed, truncated or wrong-version documents.
Classifier load_model(std::string_view document);
Classifier load_model(std::istream& in);

}  // namespace ablp
