#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace beepnet {

using NodeId = uint32_t;

// Simple undirected graph over dense node ids 0..n-1, stored in CSR form
// with per-node sorted neighbor lists.  No self-loops, no parallel edges.
class Graph {
 public:
  Graph() = default;

  // Builds a graph from an edge list.  Edges may appear in any orientation
  // and duplicates are merged; self-loops and out-of-range endpoints throw.
  static Graph from_edges(NodeId n, std::vector<std::pair<NodeId, NodeId>> edges) {
    for (auto& [u, v] : edges) {
      if (u >= n || v >= n) throw std::invalid_argument("graph: edge endpoint out of range");
      if (u == v) throw std::invalid_argument("graph: self-loop");
      if (u > v) std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    Graph g;
    g.n_ = n;
    std::vector<uint32_t> deg(n, 0);
    for (auto [u, v] : edges) {
      ++deg[u];
      ++deg[v];
    }
    g.offsets_.assign(n + 1, 0);
    for (NodeId v = 0; v < n; ++v) g.offsets_[v + 1] = g.offsets_[v] + deg[v];
    g.adj_.resize(g.offsets_[n]);
    std::vector<uint32_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    for (auto [u, v] : edges) {
      g.adj_[cursor[u]++] = v;
      g.adj_[cursor[v]++] = u;
    }
    for (NodeId v = 0; v < n; ++v)
      std::sort(g.adj_.begin() + g.offsets_[v], g.adj_.begin() + g.offsets_[v + 1]);
    return g;
  }

  NodeId node_count() const { return n_; }

  uint64_t edge_count() const { return adj_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId v) const {
    check_node(v);
    return {adj_.data() + offsets_[v], adj_.data() + offsets_[v + 1]};
  }

  uint32_t degree(NodeId v) const {
    check_node(v);
    return offsets_[v + 1] - offsets_[v];
  }

  bool has_edge(NodeId u, NodeId v) const {
    check_node(u);
    check_node(v);
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  // Calls f(u, v) once per edge with u < v, in lexicographic order.
  template <class F>
  void for_each_edge(F&& f) const {
    for (NodeId u = 0; u < n_; ++u)
      for (NodeId v : neighbors(u))
        if (u < v) f(u, v);
  }

  // Structural self-check; throws std::logic_error on a broken invariant.
  // Generators call this in tests to certify their output.
  void validate() const {
    if (offsets_.size() != static_cast<size_t>(n_) + 1)
      throw std::logic_error("graph: offset table size");
    for (NodeId v = 0; v < n_; ++v) {
      auto nb = neighbors(v);
      for (size_t i = 0; i < nb.size(); ++i) {
        if (nb[i] >= n_) throw std::logic_error("graph: neighbor out of range");
        if (nb[i] == v) throw std::logic_error("graph: self-loop");
        if (i > 0 && nb[i - 1] >= nb[i]) throw std::logic_error("graph: neighbors not sorted unique");
        if (!has_edge(nb[i], v)) throw std::logic_error("graph: asymmetric adjacency");
      }
    }
  }

  // Plain-text edge list: first line "n <count>", then one "u v" line per
  // edge with u < v, pairs sorted lexicographically.
  std::string to_edge_list() const {
    std::ostringstream out;
    out << "n " << n_ << "\n";
    for_each_edge([&](NodeId u, NodeId v) { out << u << " " << v << "\n"; });
    return out.str();
  }

  static Graph parse_edge_list(std::istream& in) {
    std::string line;
    NodeId n = 0;
    bool have_header = false;
    std::vector<std::pair<NodeId, NodeId>> edges;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      if (!have_header) {
        std::string tag;
        if (!(ls >> tag >> n) || tag != "n")
          throw std::invalid_argument("edge list: expected header 'n <count>'");
        have_header = true;
        continue;
      }
      NodeId u, v;
      if (!(ls >> u >> v)) throw std::invalid_argument("edge list: malformed edge line");
      edges.emplace_back(u, v);
    }
    if (!have_header) throw std::invalid_argument("edge list: missing header");
    return from_edges(n, std::move(edges));
  }

  static Graph parse_edge_list(const std::string& text) {
    std::istringstream in(text);
    return parse_edge_list(in);
  }

 private:
  void check_node(NodeId v) const {
    if (v >= n_) throw std::invalid_argument("graph: node id out of range");
  }

  NodeId n_ = 0;
  std::vector<uint32_t> offsets_{0};
  std::vector<NodeId> adj_;
};

inline uint32_t ceil_log2(uint64_t x) {
  if (x == 0) throw std::invalid_argument("ceil_log2: zero");
  uint32_t j = 0;
  while ((uint64_t{1} << j) < x) ++j;
  return j;
}

}  // namespace beepnet
