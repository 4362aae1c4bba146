#include "ablp/centrality.hpp"

#include <algorithm>
#include <stdexcept>

#include "ablp/seeding.hpp"

namespace ablp {

namespace {

// Per-source BFS used by betweenness; also yields the visiting order.
struct ShortestPathDag {
  std::vector<NodeId> order;
  std::vector<double> sigma;
  std::vector<long> distance;
};

}  // namespace

CentralityTable degree_centrality(const Graph& g) {
  CentralityTable table{Measure::degree, std::vector<double>(g.node_count() + 1, 0.0), false};
  for (NodeId v = 1; v <= g.node_count(); ++v) table.values[v] = static_cast<double>(g.degree(v));
  return table;
}

CentralityTable betweenness_centrality(const Graph& g) {
  const std::size_t n = g.node_count();
  CentralityTable table{Measure::betweenness, std::vector<double>(n + 1, 0.0), false};

  ShortestPathDag dag;
  dag.sigma.resize(n + 1);
  dag.distance.resize(n + 1);
  std::vector<double> delta(n + 1);
  std::vector<NodeId> queue;
  queue.reserve(n);

  for (NodeId s = 1; s <= n; ++s) {
    std::fill(dag.sigma.begin(), dag.sigma.end(), 0.0);
    std::fill(dag.distance.begin(), dag.distance.end(), -1);
    std::fill(delta.begin(), delta.end(), 0.0);
    dag.order.clear();
    queue.clear();

    dag.sigma[s] = 1.0;
    dag.distance[s] = 0;
    queue.push_back(s);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const NodeId v = queue[head];
      dag.order.push_back(v);
      for (NodeId w : g.neighbors(v)) {
        if (dag.distance[w] < 0) {
          dag.distance[w] = dag.distance[v] + 1;
          queue.push_back(w);
        }
        if (dag.distance[w] == dag.distance[v] + 1) dag.sigma[w] += dag.sigma[v];
      }
    }

    // Dependency accumulation in reverse BFS order; predecessors of w are the
    // neighbors one level closer to s.
    for (auto it = dag.order.rbegin(); it != dag.order.rend(); ++it) {
      const NodeId w = *it;
      for (NodeId v : g.neighbors(w)) {
        if (dag.distance[v] == dag.distance[w] - 1) {
          delta[v] += dag.sigma[v] / dag.sigma[w] * (1.0 + delta[w]);
        }
      }
      if (w != s) table.values[w] += delta[w];
    }
  }
  // Every unordered pair was counted from both endpoints.
  for (auto& value : table.values) value /= 2.0;
  return table;
}

CentralityTable closeness_centrality(const Graph& g) {
  const std::size_t n = g.node_count();
  CentralityTable table{Measure::closeness, std::vector<double>(n + 1, 0.0), false};
  std::vector<long> distance(n + 1);
  std::vector<NodeId> queue;
  queue.reserve(n);

  for (NodeId s = 1; s <= n; ++s) {
    std::fill(distance.begin(), distance.end(), -1);
    queue.assign(1, s);
    distance[s] = 0;
    long total = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const NodeId v = queue[head];
      total += distance[v];
      for (NodeId w : g.neighbors(v)) {
        if (distance[w] < 0) {
          distance[w] = distance[v] + 1;
          queue.push_back(w);
        }
      }
    }
    if (total > 0) table.values[s] = static_cast<double>(queue.size() - 1) / static_cast<double>(total);
  }
  return table;
}

CentralityTable compute_centrality(const Graph& g, Measure measure) {
  switch (measure) {
    case Measure::degree: return degree_centrality(g);
    case Measure::betweenness: return betweenness_centrality(g);
    case Measure::closeness: return closeness_centrality(g);
  }
  throw std::logic_error("unknown measure");
}

std::optional<Measure> measure_of(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::degree: return Measure::degree;
    case StrategyKind::betweenness: return Measure::betweenness;
    case StrategyKind::closeness: return Measure::closeness;
    case StrategyKind::random: return std::nullopt;
  }
  return std::nullopt;
}

std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::random: return "random";
    case StrategyKind::degree: return "degree";
    case StrategyKind::betweenness: return "betweenness";
    case StrategyKind::closeness: return "closeness";
  }
  return "?";
}

std::string_view to_string(Measure measure) {
  switch (measure) {
    case Measure::degree: return "degree";
    case Measure::betweenness: return "betweenness";
    case Measure::closeness: return "closeness";
  }
  return "?";
}

StrategyKind parse_strategy(std::string_view name) {
  for (auto kind : {StrategyKind::random, StrategyKind::degree, StrategyKind::betweenness, StrategyKind::closeness}) {
    if (to_string(kind) == name) return kind;
  }
  throw std::invalid_argument("unknown strategy '" + std::string(name) + "'");
}

Measure parse_measure(std::string_view name) {
  const auto kind = parse_strategy(name);
  if (auto measure = measure_of(kind)) return *measure;
  throw std::invalid_argument("unknown centrality measure '" + std::string(name) + "'");
}

std::vector<NodeId> ordered_neighbors(const Graph& g, NodeId v, const Strategy& strategy,
                                      const CentralityTable* table) {
  const auto adj = g.neighbors(v);
  std::vector<NodeId> out(adj.begin(), adj.end());

  if (!strategy.ranked()) {
    Engine engine(derive_seed(strategy.seed, v));
    shuffle(std::span<NodeId>(out), engine);
    return out;
  }
  if (table == nullptr) throw std::invalid_argument("ranked strategy requires a centrality table");
  if (measure_of(strategy.kind) != table->measure) {
    throw std::invalid_argument("centrality table measure does not match strategy");
  }
  if (table->values.size() != g.node_count() + 1) {
    throw std::invalid_argument("centrality table size does not match graph");
  }
  // adj is ascending, so a stable sort keeps ascending IDs among equal scores.
  std::stable_sort(out.begin(), out.end(),
                   [&](NodeId x, NodeId y) { return table->values[x] > table->values[y]; });
  return out;
}

NeighborOrder::NeighborOrder(const Graph& g, const Strategy& strategy) : order_(g.node_count() + 1) {
  std::optional<CentralityTable> table;
  if (auto measure = measure_of(strategy.kind)) table = compute_centrality(g, *measure);
  for (NodeId v = 1; v <= g.node_count(); ++v) {
    order_[v] = ordered_neighbors(g, v, strategy, table ? &*table : nullptr);
  }
}

NeighborOrder::NeighborOrder(const Graph& g, const Strategy& strategy, const CentralityTable& table)
    : order_(g.node_count() + 1) {
  for (NodeId v = 1; v <= g.node_count(); ++v) order_[v] = ordered_neighbors(g, v, strategy, &table);
}

}  // namespace ablp
