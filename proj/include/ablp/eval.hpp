#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ablp/featurize.hpp"
#include "ablp/graph.hpp"
#include "ablp/model.hpp"

namespace ablp {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct MetricsReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  ConfusionCounts counts;
  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

/// Throws std::invalid_argument on length mismatch or labels outside {0,1}.
ConfusionCounts confusion(std::span<const std::uint8_t> y_true, std::span<const std::uint8_t> y_pred);

/// Precision and recall are 0 on a zero denominator; F1 is 0 when P + R = 0.
MetricsReport metrics(const ConfusionCounts& counts);

/// Harmonic mean of precision and recall (0 when both are 0).
double f1_score(double precision, double recall);

struct ClassifierSpec {
  Hyperparameters hyperparameters = ForestParams{};
  std::uint64_t seed = 42;
};

struct BalanceSpec {
  /// Negatives kept per positive; nullopt keeps the natural imbalance.
  std::optional<double> negative_ratio = 1.0;
  std::uint64_t seed = 42;
};

struct SplitSpec {
  double test_fraction = 0.25;
  std::uint64_t seed = 42;
};

struct RunOptions {
  std::size_t threads = 1;
  /// Also score every dataset row the model was not trained on (the
  /// unbalanced population).
  bool evaluate_holdout = false;
};

struct ExperimentResult {
  MetricsReport test;
  std::optional<MetricsReport> holdout;
  Split split;
  std::vector<double> test_scores;
  Classifier model;
};

/// featurize -> balance -> split -> train -> score test rows -> metrics.
ExperimentResult run_experiment(const Graph& g, const FeatureConfig& config, const ClassifierSpec& classifier,
                                const BalanceSpec& balancing, const SplitSpec& splitting,
                                const RunOptions& options = {});

struct SweepSpec {
  int a_max = 5;
  int b_max = 5;
  std::vector<StrategyKind> strategies{StrategyKind::degree, StrategyKind::betweenness, StrategyKind::random};
  std::vector<std::uint64_t> seeds{42};
  Hyperparameters classifier = ForestParams{};
  std::optional<double> negative_ratio = 1.0;
  double test_fraction = 0.25;
  bool mask_pair_edge = false;
  std::size_t threads = 1;
};

struct SweepRecord {
  int a = 0;
  int b = 0;
  StrategyKind strategy = StrategyKind::degree;
  std::uint64_t seed = 0;
  MetricsReport metrics;
  double wall_ms = 0.0;
  std::optional<std::string> error;
};

struct SweepResult {
  std::vector<SweepRecord> records;
};

/// Cell seed `s` drives featurization, balancing, splitting and training.
/// A failing cell is recorded with its error and the sweep continues.
SweepResult sweep(const Graph& g, const SweepSpec& spec);

enum class Metric { precision, recall, f1 };
Metric parse_metric(std::string_view name);
double metric_value(const MetricsReport& report, Metric metric);

/// Columns a,b,strategy,seed,precision,recall,f1,tp,fp,fn,tn,wall_ms.
/// With include_timing false the wall_ms field is left empty, making the
/// output a pure function of the inputs.
void export_csv(const SweepResult& result, std::ostream& out, bool include_timing = true);

/// SVG grid per strategy: rows a ascending downward, columns b ascending
/// rightward, each cell showing the seed-averaged metric.
void render_heatmap(const SweepResult& result, Metric metric, std::ostream& out);

}  // namespace ablp
