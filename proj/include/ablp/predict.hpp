#pragma once

#include <cstddef>
#include <vector>

#include "ablp/featurize.hpp"
#include "ablp/graph.hpp"
#include "ablp/model.hpp"

namespace ablp {

enum class CompletionMode { iterative, noniterative };

struct CompletionConfig {
  double epsilon = 0.5;
  CompletionMode mode = CompletionMode::iterative;
  std::size_t max_steps = 10;
  std::size_t threads = 1;
};

struct ScoredEdge {
  NodeId u = 0;
  NodeId v = 0;
  double score = 0.0;
  friend bool operator==(const ScoredEdge&, const ScoredEdge&) = default;
};

/// One batch of added edges per step, in candidate-pair order.
struct CompletionTrace {
  std::vector<std::vector<ScoredEdge>> batches;
  Graph final_graph;

  std::size_t added_count() const;
};

/// Scores every non-edge (u > v, candidate order) of `g` with features taken
/// from `g` itself. Throws ModelError when the model's feature length does not
/// match `features`.
std::vector<ScoredEdge> score_non_edges(const Graph& g, const Classifier& model, const FeatureConfig& features,
                                        std::size_t threads = 1);

/// Scores all non-edges of the input once and adds those with score >= epsilon.
CompletionTrace complete_noniterative(const Graph& g, const Classifier& model, const CompletionConfig& cfg,
                                      const FeatureConfig& features);

/// Repeats rescoring against the grown graph until a step adds nothing or
/// max_steps steps have run. The model is never retrained.
CompletionTrace complete_iterative(const Graph& g, const Classifier& model, const CompletionConfig& cfg,
                                   const FeatureConfig& features);

/// Dispatches on cfg.mode.
CompletionTrace complete(const Graph& g, const Classifier& model, const CompletionConfig& cfg,
                         const FeatureConfig& features);

}  // namespace ablp
