#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ablp/types.hpp"

namespace ablp {

/// Undirected, unweighted simple graph over internal IDs 1..node_count.
///
/// Adjacency lists are kept sorted ascending. Each node carries the label it
/// had in the source file (or its decimal ID when built programmatically).
class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t node_count);
  Graph(std::size_t node_count, std::span<const std::pair<NodeId, NodeId>> edges);

  std::size_t node_count() const { return adjacency_.empty() ? 0 : adjacency_.size() - 1; }
  std::size_t edge_count() const { return edge_count_; }

  /// Sorted neighbor IDs of v. Throws std::out_of_range for invalid v.
  std::span<const NodeId> neighbors(NodeId v) const;
  std::size_t degree(NodeId v) const { return neighbors(v).size(); }

  /// Throws std::out_of_range when either ID is not in 1..n.
  bool has_edge(NodeId u, NodeId v) const;

  /// Inserts {u,v}. Returns false if the edge already existed.
  /// Throws std::invalid_argument for u == v, std::out_of_range for bad IDs.
  bool add_edge(NodeId u, NodeId v);

  const std::string& label(NodeId v) const;
  std::optional<NodeId> find(const std::string& label) const;
  void set_labels(std::vector<std::string> labels);

  /// All edges as (u, v) with u < v, ordered by u then v.
  std::vector<std::pair<NodeId, NodeId>> edges() const;

  bool valid_id(NodeId v) const { return v >= 1 && v <= node_count(); }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  void check(NodeId v) const;

  std::vector<std::vector<NodeId>> adjacency_;  // index 0 unused
  std::vector<std::string> labels_;             // index 0 unused
  std::unordered_map<std::string, NodeId> by_label_;
  std::size_t edge_count_ = 0;
};

struct GraphStats {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  double avg_degree = 0.0;
};

GraphStats stats(const Graph& g);
GraphStats stats(std::size_t nodes, std::size_t edges);

struct LoadResult {
  Graph graph;
  std::size_t skipped_self_loops = 0;
  std::size_t duplicate_edges = 0;
};

/// Reads whitespace-separated label pairs, one edge per line. Lines starting
/// with '#' (after optional whitespace) and blank lines are ignored. Labels
/// are remapped to 1..n in order of first appearance.
LoadResult load_edge_list(std::istream& in);
LoadResult load_edge_list_file(const std::string& path);

/// Writes "label label" lines, one per edge. Line order is chosen so that
/// reloading a graph without isolated nodes yields identical IDs.
void write_edge_list(const Graph& g, std::ostream& out);

/// Every unordered pair once, as (u, v) with u > v, in the order
/// u = 2..n, v = 1..u-1.
std::vector<std::pair<NodeId, NodeId>> candidate_pairs(const Graph& g);

constexpr std::size_t pair_count(std::size_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }

}  // namespace ablp
