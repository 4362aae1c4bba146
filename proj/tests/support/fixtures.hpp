#pragma once

// Graph generators shared by the unit and acceptance suites.

#include <algorithm>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "ablp/graph.hpp"
#include "ablp/seeding.hpp"

namespace ablp::testing {

inline Graph path_graph(std::size_t n) {
  Graph g(n);
  for (NodeId v = 1; v < n; ++v) g.add_edge(v, v + 1);
  return g;
}

inline Graph complete_graph(std::size_t n, NodeId offset = 0, std::size_t total = 0) {
  Graph g(std::max(total, n + offset));
  for (NodeId u = 1; u <= n; ++u) {
    for (NodeId v = u + 1; v <= n; ++v) g.add_edge(u + offset, v + offset);
  }
  return g;
}

/// Center is node 1, leaves 2..leaves+1.
inline Graph star_graph(std::size_t leaves) {
  Graph g(leaves + 1);
  for (NodeId v = 2; v <= leaves + 1; ++v) g.add_edge(1, v);
  return g;
}

/// Two disjoint K_k: nodes 1..k and k+1..2k.
inline Graph two_cliques(std::size_t k) {
  Graph g(2 * k);
  for (NodeId base : {NodeId{0}, static_cast<NodeId>(k)}) {
    for (NodeId u = 1; u <= k; ++u) {
      for (NodeId v = u + 1; v <= k; ++v) g.add_edge(base + u, base + v);
    }
  }
  return g;
}

/// G(n, p) with a fixed seed.
inline Graph random_graph(std::size_t n, double p, std::uint64_t seed) {
  Graph g(n);
  Engine engine(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (NodeId u = 1; u <= n; ++u) {
    for (NodeId v = u + 1; v <= n; ++v) {
      if (coin(engine) < p) g.add_edge(u, v);
    }
  }
  return g;
}

/// Exactly m distinct edges drawn uniformly over n nodes.
inline Graph random_graph_m(std::size_t n, std::size_t m, std::uint64_t seed) {
  Graph g(n);
  Engine engine(seed);
  while (g.edge_count() < m) {
    const auto u = static_cast<NodeId>(uniform_below(engine, n) + 1);
    const auto v = static_cast<NodeId>(uniform_below(engine, n) + 1);
    if (u != v) g.add_edge(u, v);
  }
  return g;
}

/// Ego-network-like graph: overlapping dense circles plus sparse background,
/// trimmed or topped up to exactly m edges. Not real data.
inline Graph circles_graph(std::size_t n, std::size_t m, std::size_t circles, std::uint64_t seed) {
  Engine engine(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<std::vector<NodeId>> members(circles);
  for (NodeId v = 1; v <= n; ++v) {
    members[uniform_below(engine, circles)].push_back(v);
    if (coin(engine) < 0.25) members[uniform_below(engine, circles)].push_back(v);
  }
  std::set<std::pair<NodeId, NodeId>> edges;
  for (const auto& circle : members) {
    for (std::size_t i = 0; i < circle.size(); ++i) {
      for (std::size_t j = i + 1; j < circle.size(); ++j) {
        if (circle[i] != circle[j] && coin(engine) < 0.35) {
          edges.emplace(std::min(circle[i], circle[j]), std::max(circle[i], circle[j]));
        }
      }
    }
  }
  std::vector<std::pair<NodeId, NodeId>> list(edges.begin(), edges.end());
  shuffle(std::span<std::pair<NodeId, NodeId>>(list), engine);
  if (list.size() > m) list.resize(m);
  Graph g(n, list);
  while (g.edge_count() < m) {
    const auto u = static_cast<NodeId>(uniform_below(engine, n) + 1);
    const auto v = static_cast<NodeId>(uniform_below(engine, n) + 1);
    if (u != v) g.add_edge(u, v);
  }
  return g;
}

}  // namespace ablp::testing
