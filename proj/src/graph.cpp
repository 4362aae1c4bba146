#include "ablp/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace ablp {

Graph::Graph(std::size_t node_count) : adjacency_(node_count + 1), labels_(node_count + 1) {
  for (std::size_t v = 1; v <= node_count; ++v) {
    labels_[v] = std::to_string(v);
    by_label_.emplace(labels_[v], static_cast<NodeId>(v));
  }
}

Graph::Graph(std::size_t node_count, std::span<const std::pair<NodeId, NodeId>> edges)
    : Graph(node_count) {
  for (const auto& [u, v] : edges) add_edge(u, v);
}

void Graph::check(NodeId v) const {
  if (!valid_id(v)) {
    throw std::out_of_range("node id " + std::to_string(v) + " outside 1.." +
                            std::to_string(node_count()));
  }
}

std::span<const NodeId> Graph::neighbors(NodeId v) const {
  check(v);
  return adjacency_[v];
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  check(u);
  check(v);
  const auto& shorter = adjacency_[u].size() <= adjacency_[v].size() ? adjacency_[u] : adjacency_[v];
  const NodeId other = &shorter == &adjacency_[u] ? v : u;
  return std::binary_search(shorter.begin(), shorter.end(), other);
}

bool Graph::add_edge(NodeId u, NodeId v) {
  check(u);
  check(v);
  if (u == v) throw std::invalid_argument("self-loop " + std::to_string(u));
  auto& nu = adjacency_[u];
  auto pos = std::lower_bound(nu.begin(), nu.end(), v);
  if (pos != nu.end() && *pos == v) return false;
  nu.insert(pos, v);
  auto& nv = adjacency_[v];
  nv.insert(std::lower_bound(nv.begin(), nv.end(), u), u);
  ++edge_count_;
  return true;
}

const std::string& Graph::label(NodeId v) const {
  check(v);
  return labels_[v];
}

std::optional<NodeId> Graph::find(const std::string& label) const {
  auto it = by_label_.find(label);
  if (it == by_label_.end()) return std::nullopt;
  return it->second;
}

void Graph::set_labels(std::vector<std::string> labels) {
  if (labels.size() != node_count()) throw std::invalid_argument("label count does not match node count");
  labels_.assign(1, std::string());
  by_label_.clear();
  for (auto& label : labels) {
    if (!by_label_.emplace(label, static_cast<NodeId>(labels_.size())).second) {
      throw std::invalid_argument("duplicate label '" + label + "'");
    }
    labels_.push_back(std::move(label));
  }
}

std::vector<std::pair<NodeId, NodeId>> Graph::edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  out.reserve(edge_count_);
  for (NodeId u = 1; u <= node_count(); ++u) {
    for (NodeId v : adjacency_[u]) {
      if (v > u) out.emplace_back(u, v);
    }
  }
  return out;
}

GraphStats stats(std::size_t nodes, std::size_t edges) {
  GraphStats s{nodes, edges, 0.0};
  if (nodes > 0) s.avg_degree = 2.0 * static_cast<double>(edges) / static_cast<double>(nodes);
  return s;
}

GraphStats stats(const Graph& g) { return stats(g.node_count(), g.edge_count()); }

LoadResult load_edge_list(std::istream& in) {
  std::vector<std::string> labels;
  std::unordered_map<std::string, NodeId> ids;
  std::vector<std::pair<NodeId, NodeId>> raw;
  LoadResult result;

  auto intern = [&](const std::string& label) {
    auto [it, inserted] = ids.emplace(label, static_cast<NodeId>(labels.size() + 1));
    if (inserted) labels.push_back(label);
    return it->second;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;

    std::istringstream fields(line);
    std::string a, b, extra;
    if (!(fields >> a >> b)) throw ParseError(line_no, "expected two node labels");
    if (fields >> extra) throw ParseError(line_no, "unexpected extra field '" + extra + "'");
    if (a == b) {
      ++result.skipped_self_loops;
      continue;
    }
    const NodeId u = intern(a);
    const NodeId v = intern(b);
    raw.emplace_back(u, v);
  }
  if (in.bad()) throw DataError("read error");

  Graph g(labels.size());
  for (const auto& [u, v] : raw) {
    if (!g.add_edge(u, v)) ++result.duplicate_edges;
  }
  g.set_labels(std::move(labels));
  result.graph = std::move(g);
  return result;
}

LoadResult load_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return load_edge_list(in);
}

void write_edge_list(const Graph& g, std::ostream& out) {
  // Lead with one edge per node, ordered so that the loader's first-appearance
  // numbering reproduces the current IDs, then write everything else.
  const auto n = static_cast<NodeId>(g.node_count());
  std::vector<char> seen(n + 1, 0);
  std::vector<std::pair<NodeId, NodeId>> lines;
  std::set<std::pair<NodeId, NodeId>> written;
  auto emit = [&](NodeId first, NodeId second) {
    lines.emplace_back(first, second);
    written.emplace(std::min(first, second), std::max(first, second));
    seen[first] = seen[second] = 1;
  };
  for (NodeId k = 1; k <= n; ++k) {
    if (seen[k] || g.degree(k) == 0) continue;
    const auto adj = g.neighbors(k);
    const auto known = std::find_if(adj.begin(), adj.end(), [&](NodeId w) { return seen[w] != 0; });
    if (known != adj.end()) {
      emit(*known, k);
    } else if (k < n && g.has_edge(k, k + 1)) {
      emit(k, k + 1);
    } else {
      emit(k, adj.front());
    }
  }
  for (const auto& e : g.edges()) {
    if (!written.contains(e)) lines.push_back(e);
  }
  for (const auto& [u, v] : lines) out << g.label(u) << ' ' << g.label(v) << '\n';
}

std::vector<std::pair<NodeId, NodeId>> candidate_pairs(const Graph& g) {
  const auto n = static_cast<NodeId>(g.node_count());
  std::vector<std::pair<NodeId, NodeId>> pairs;
  pairs.reserve(pair_count(n));
  for (NodeId u = 2; u <= n; ++u) {
    for (NodeId v = 1; v < u; ++v) pairs.emplace_back(u, v);
  }
  return pairs;
}

}  // namespace ablp
