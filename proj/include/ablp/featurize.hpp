#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ablp/centrality.hpp"
#include "ablp/graph.hpp"
#include "ablp/types.hpp"

namespace ablp {

/// Parameters of the a,b neighborhood: `a` neighbors per expanded node,
/// `b` expansion rounds after the first level.
struct FeatureConfig {
  int a = 1;
  int b = 0;
  StrategyKind strategy = StrategyKind::degree;
  /// Ignore the (u, v) edge itself while building the pair's neighborhoods.
  bool mask_pair_edge = false;
  std::uint64_t seed = 42;

  Strategy neighbor_strategy() const { return {strategy, seed}; }
  /// Neighbor slots for one root: a + a*a*b.
  std::size_t block_length() const;
  /// Full row: both blocks plus the pair itself.
  std::size_t row_length() const { return 2 * block_length() + 2; }
  /// Throws std::invalid_argument unless a >= 1 and b >= 0.
  void validate() const;

  friend bool operator==(const FeatureConfig&, const FeatureConfig&) = default;
};

struct PairRow {
  std::vector<NodeId> x;
  int y = 0;
  NodeId u = 0;
  NodeId v = 0;
};

/// Builds feature rows for pairs of one fixed graph. Neighbor orderings are
/// computed once at construction; extraction is thread-safe given one
/// Scratch per thread.
class FeatureExtractor {
 public:
  class Scratch {
   public:
    explicit Scratch(std::size_t node_count) : stamp_(node_count + 1, 0) {}

   private:
    friend class FeatureExtractor;
    std::vector<std::uint32_t> stamp_;
    std::uint32_t generation_ = 0;
  };

  FeatureExtractor(const Graph& g, const FeatureConfig& config);
  FeatureExtractor(const Graph& g, const FeatureConfig& config, const CentralityTable& table);

  const FeatureConfig& config() const { return config_; }
  Scratch make_scratch() const { return Scratch(graph_->node_count()); }

  PairRow extract(NodeId u, NodeId v) const;
  /// Writes the row into `out` (size row_length()) and returns the label.
  int extract_into(NodeId u, NodeId v, std::span<NodeId> out, Scratch& scratch) const;

 private:
  void build_block(NodeId root, NodeId partner, std::span<NodeId> out, Scratch& scratch) const;

  const Graph* graph_;
  FeatureConfig config_;
  NeighborOrder order_;
};

/// Single pair; `table` is required for ranked strategies.
PairRow create_pair_features(const Graph& g, NodeId u, NodeId v, const FeatureConfig& config,
                             const CentralityTable* table);

/// Labeled feature rows, stored row-major.
struct Dataset {
  FeatureConfig config;
  std::size_t width = 0;
  std::vector<NodeId> features;
  std::vector<std::uint8_t> labels;
  std::vector<std::pair<NodeId, NodeId>> pairs;
  std::size_t positive_count = 0;
  std::size_t negative_count = 0;

  std::size_t rows() const { return labels.size(); }
  std::span<const NodeId> row(std::size_t i) const {
    return std::span<const NodeId>(features).subspan(i * width, width);
  }
  FeatureView view() const { return {features, width}; }
  /// Rows at the given indices, in the given order.
  Dataset subset(std::span<const std::size_t> indices) const;
};

/// One row per candidate pair, in candidate_pairs() order. Output does not
/// depend on `threads`.
Dataset build_dataset(const Graph& g, const FeatureConfig& config, std::size_t threads = 1);

/// Keeps all positives and a uniform sample of floor(ratio * positives)
/// negatives (capped at what exists). Row order is preserved.
Dataset balance(const Dataset& d, double negative_ratio, std::uint64_t seed);

struct Split {
  Dataset train;
  Dataset test;
  double test_fraction = 0.25;
  std::uint64_t seed = 0;
};

/// Stratified random partition. Each class contributes round(count * f)
/// rows to the test side, clamped so both sides keep at least one row.
Split split(const Dataset& d, double test_fraction, std::uint64_t seed);

/// CSV with header "u,v,y,f1..fK": original labels for u and v, internal IDs
/// in the feature columns.
void write_dataset_csv(const Dataset& d, const Graph& g, std::ostream& out);

}  // namespace ablp
