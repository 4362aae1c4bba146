#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ablp/graph.hpp"

namespace ablp {

enum class Measure { degree, betweenness, closeness };

/// One score per node; values[0] is unused.
struct CentralityTable {
  Measure measure = Measure::degree;
  std::vector<double> values;
  bool normalized = false;

  double at(NodeId v) const { return values.at(v); }
  friend bool operator==(const CentralityTable&, const CentralityTable&) = default;
};

CentralityTable degree_centrality(const Graph& g);

/// Unnormalized betweenness over unordered (s, t) pairs.
CentralityTable betweenness_centrality(const Graph& g);

/// (r - 1) / sum of distances to the r - 1 other nodes of v's component;
/// 0 for isolated nodes.
CentralityTable closeness_centrality(const Graph& g);

CentralityTable compute_centrality(const Graph& g, Measure measure);

enum class StrategyKind { random, degree, betweenness, closeness };

struct Strategy {
  StrategyKind kind = StrategyKind::degree;
  std::uint64_t seed = 42;  // only consulted by StrategyKind::random

  bool ranked() const { return kind != StrategyKind::random; }
  friend bool operator==(const Strategy&, const Strategy&) = default;
};

std::optional<Measure> measure_of(StrategyKind kind);
std::string_view to_string(StrategyKind kind);
std::string_view to_string(Measure measure);
/// Throws std::invalid_argument for unknown names.
StrategyKind parse_strategy(std::string_view name);
Measure parse_measure(std::string_view name);

/// adj(v) permuted by the strategy: ranked kinds sort by descending score with
/// ties broken by ascending ID; random shuffles with a seed derived from
/// (strategy.seed, v).
std::vector<NodeId> ordered_neighbors(const Graph& g, NodeId v, const Strategy& strategy,
                                      const CentralityTable* table);

/// Ordered neighbor lists for every node of a graph, computed once.
class NeighborOrder {
 public:
  NeighborOrder(const Graph& g, const Strategy& strategy);
  /// Uses a precomputed table (must match the strategy's measure).
  NeighborOrder(const Graph& g, const Strategy& strategy, const CentralityTable& table);

  std::span<const NodeId> of(NodeId v) const { return order_.at(v); }
  std::size_t node_count() const { return order_.size() - 1; }

 private:
  std::vector<std::vector<NodeId>> order_;
};

}  // namespace ablp
