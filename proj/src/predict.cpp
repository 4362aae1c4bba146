#include "ablp/predict.hpp"

#include <stdexcept>
#include <string>

#include "ablp/parallel.hpp"

namespace ablp {

std::size_t CompletionTrace::added_count() const {
  std::size_t n = 0;
  for (const auto& batch : batches) n += batch.size();
  return n;
}

namespace {

void check_inputs(const Classifier& model, const CompletionConfig& cfg, const FeatureConfig& features) {
  features.validate();
  if (model.feature_length() != features.row_length()) {
    throw ModelError("model feature_length " + std::to_string(model.feature_length()) +
                     " does not match featurization (a=" + std::to_string(features.a) +
                     ", b=" + std::to_string(features.b) + " gives " + std::to_string(features.row_length()) + ")");
  }
  if (!(cfg.epsilon >= 0.0 && cfg.epsilon <= 1.0)) throw std::invalid_argument("epsilon must be in [0, 1]");
}

// One application of the operator: score against `state`, add the batch.
std::vector<ScoredEdge> step(Graph& state, const Classifier& model, const CompletionConfig& cfg,
                             const FeatureConfig& features) {
  std::vector<ScoredEdge> batch;
  for (const auto& edge : score_non_edges(state, model, features, cfg.threads)) {
    if (edge.score >= cfg.epsilon) batch.push_back(edge);
  }
  for (const auto& edge : batch) state.add_edge(edge.u, edge.v);
  return batch;
}

}  // namespace

std::vector<ScoredEdge> score_non_edges(const Graph& g, const Classifier& model, const FeatureConfig& features,
                                        std::size_t threads) {
  if (model.feature_length() != features.row_length()) {
    throw ModelError("model feature_length does not match featurization");
  }
  std::vector<ScoredEdge> candidates;
  for (const auto& [u, v] : candidate_pairs(g)) {
    if (!g.has_edge(u, v)) candidates.push_back({u, v, 0.0});
  }
  const FeatureExtractor extractor(g, features);
  parallel_for(candidates.size(), threads, [&](std::size_t begin, std::size_t end) {
    auto scratch = extractor.make_scratch();
    std::vector<NodeId> row(features.row_length());
    for (std::size_t i = begin; i < end; ++i) {
      extractor.extract_into(candidates[i].u, candidates[i].v, row, scratch);
      candidates[i].score = model.predict_score(row);
    }
  });
  return candidates;
}

CompletionTrace complete_noniterative(const Graph& g, const Classifier& model, const CompletionConfig& cfg,
                                      const FeatureConfig& features) {
  check_inputs(model, cfg, features);
  CompletionTrace trace;
  trace.final_graph = g;
  trace.batches.push_back(step(trace.final_graph, model, cfg, features));
  return trace;
}

CompletionTrace complete_iterative(const Graph& g, const Classifier& model, const CompletionConfig& cfg,
                                   const FeatureConfig& features) {
  check_inputs(model, cfg, features);
  CompletionTrace trace;
  trace.final_graph = g;
  for (std::size_t i = 0; i < cfg.max_steps; ++i) {
    auto batch = step(trace.final_graph, model, cfg, features);
    if (batch.empty()) break;
    trace.batches.push_back(std::move(batch));
  }
  return trace;
}

CompletionTrace complete(const Graph& g, const Classifier& model, const CompletionConfig& cfg,
                         const FeatureConfig& features) {
  return cfg.mode == CompletionMode::iterative ? complete_iterative(g, model, cfg, features)
                                               : complete_noniterative(g, model, cfg, features);
}

}  // namespace ablp
