#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "domkl/errors.hpp"

namespace domkl {

using NodeId = std::size_t;
using Edge = std::pair<NodeId, NodeId>;  // stored with first < second

/// Undirected simple graph over nodes 0..K-1. Immutable once built.
class Graph {
 public:
  Graph() = default;

  /// Throws ParameterError on self-loops, duplicates or out-of-range ids.
  Graph(std::size_t num_nodes, const std::vector<Edge>& edges)
      : adjacency_(num_nodes) {
    if (num_nodes == 0) throw ParameterError("graph needs at least one node");
    std::set<Edge> seen;
    for (auto [a, b] : edges) {
      if (a >= num_nodes || b >= num_nodes)
        throw ParameterError("edge endpoint out of range");
      if (a == b) throw ParameterError("self-loop on node " + std::to_string(a));
      Edge e = std::minmax(a, b);
      if (!seen.insert(e).second)
        throw ParameterError("duplicate edge {" + std::to_string(e.first) + "," +
                             std::to_string(e.second) + "}");
      edges_.push_back(e);
      adjacency_[a].push_back(b);
      adjacency_[b].push_back(a);
    }
    std::sort(edges_.begin(), edges_.end());
    for (auto& n : adjacency_) std::sort(n.begin(), n.end());
  }

  std::size_t num_nodes() const noexcept { return adjacency_.size(); }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::vector<NodeId>& neighbors(NodeId k) const { return adjacency_.at(k); }
  std::size_t degree(NodeId k) const { return adjacency_.at(k).size(); }

  bool has_edge(NodeId a, NodeId b) const {
    const auto& n = adjacency_.at(a);
    return std::binary_search(n.begin(), n.end(), b);
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.num_nodes() == b.num_nodes() && a.edges_ == b.edges_;
  }

 private:
  std::vector<Edge> edges_;
  std::vector<std::vector<NodeId>> adjacency_;
};

inline Graph complete_graph(std::size_t k) {
  std::vector<Edge> e;
  for (NodeId a = 0; a < k; ++a)
    for (NodeId b = a + 1; b < k; ++b) e.emplace_back(a, b);
  return Graph(k, e);
}

inline Graph path_graph(std::size_t k) {
  std::vector<Edge> e;
  for (NodeId a = 0; a + 1 < k; ++a) e.emplace_back(a, a + 1);
  return Graph(k, e);
}

/// Node 0 is the hub.
inline Graph star_graph(std::size_t k) {
  std::vector<Edge> e;
  for (NodeId a = 1; a < k; ++a) e.emplace_back(0, a);
  return Graph(k, e);
}

inline Graph cycle_graph(std::size_t k) {
  std::vector<Edge> e;
  for (NodeId a = 0; a < k; ++a) e.emplace_back(a, (a + 1) % k);
  return Graph(k, e);
}

/// Erdos-Renyi G(K, p): every unordered pair is drawn independently, in
/// lexicographic pair order, from a generator seeded with `seed`.
inline Graph generate_er(std::size_t num_nodes, double connection_prob, std::uint64_t seed) {
  if (num_nodes < 2) throw ParameterError("generate_er: num_nodes must be >= 2");
  if (!(connection_prob > 0.0 && connection_prob <= 1.0))
    throw ParameterError("generate_er: connection_prob must lie in (0, 1]");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Edge> e;
  for (NodeId a = 0; a < num_nodes; ++a)
    for (NodeId b = a + 1; b < num_nodes; ++b)
      if (unif(rng) < connection_prob) e.emplace_back(a, b);
  return Graph(num_nodes, e);
}

/// Component label per node; labels are 0.. in order of first appearance.
inline std::vector<std::size_t> connected_components(const Graph& g) {
  constexpr auto unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> label(g.num_nodes(), unset);
  std::size_t next = 0;
  for (NodeId s = 0; s < g.num_nodes(); ++s) {
    if (label[s] != unset) continue;
    std::queue<NodeId> q;
    q.push(s);
    label[s] = next;
    while (!q.empty()) {
      NodeId u = q.front();
      q.pop();
      for (NodeId v : g.neighbors(u))
        if (label[v] == unset) {
          label[v] = next;
          q.push(v);
        }
    }
    ++next;
  }
  return label;
}

inline std::size_t num_components(const Graph& g) {
  auto labels = connected_components(g);
  return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

inline bool is_connected(const Graph& g) { return num_components(g) == 1; }

/// Acyclic iff every component is a tree.
inline bool is_forest(const Graph& g) {
  return g.num_edges() + num_components(g) == g.num_nodes();
}

struct SampledGraph {
  Graph graph;
  std::size_t attempts = 0;
};

/// Rejection-samples a connected G(K, p); attempt i uses seed + i.
inline SampledGraph sample_connected_er(std::size_t num_nodes, double connection_prob,
                                        std::uint64_t seed, std::size_t max_attempts) {
  if (max_attempts < 1) throw ParameterError("sample_connected_er: max_attempts must be >= 1");
  for (std::size_t i = 0; i < max_attempts; ++i) {
    Graph g = generate_er(num_nodes, connection_prob, seed + i);
    if (is_connected(g)) return {std::move(g), i + 1};
  }
  throw SamplingError("no connected graph after " + std::to_string(max_attempts) + " attempts",
                      max_attempts);
}

/// Edge-list text: optional "# nodes K" header, then one "k l" pair per line.
/// Without the header the node count is 1 + the largest index seen.
inline Graph read_edge_list(std::istream& in) {
  std::vector<Edge> edges;
  std::size_t declared = 0, max_index = 0, line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first[0] == '#') {
      std::string key;
      if (ls >> key && key == "nodes" && !(ls >> declared))
        throw ParseError("edge list: bad node count", line_no);
      continue;
    }
    long long a = 0, b = 0;
    std::istringstream fs(first);
    if (!(fs >> a) || !(ls >> b) || a < 0 || b < 0)
      throw ParseError("edge list: expected two non-negative node indices", line_no);
    std::string rest;
    if (ls >> rest) throw ParseError("edge list: trailing token '" + rest + "'", line_no);
    edges.emplace_back(static_cast<NodeId>(a), static_cast<NodeId>(b));
    max_index = std::max({max_index, static_cast<std::size_t>(a), static_cast<std::size_t>(b)});
  }
  std::size_t n = declared ? declared : (edges.empty() ? 0 : max_index + 1);
  return Graph(n, edges);
}

inline Graph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open edge list '" + path + "'");
  return read_edge_list(in);
}

inline void write_edge_list(std::ostream& out, const Graph& g) {
  out << "# nodes " << g.num_nodes() << '\n';
  for (auto [a, b] : g.edges()) out << a << ' ' << b << '\n';
}

}  // namespace domkl
