#pragma once

#include <cstdint>
#include <istream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "beepnet/graph.hpp"
#include "beepnet/rng.hpp"

namespace beepnet {

inline Graph make_clique(NodeId n) {
  if (n == 0) throw std::invalid_argument("make_clique: n must be positive");
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(static_cast<size_t>(n) * (n - 1) / 2);
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v) edges.emplace_back(u, v);
  return Graph::from_edges(n, std::move(edges));
}

// n/2 disjoint edges: {0,1}, {2,3}, ...
inline Graph make_disjoint_pairs(NodeId n) {
  if (n == 0 || n % 2 != 0) throw std::invalid_argument("make_disjoint_pairs: n must be positive and even");
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(n / 2);
  for (NodeId u = 0; u + 1 < n; u += 2) edges.emplace_back(u, u + 1);
  return Graph::from_edges(n, std::move(edges));
}

inline Graph make_path(NodeId n) {
  if (n == 0) throw std::invalid_argument("make_path: n must be positive");
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId u = 0; u + 1 < n; ++u) edges.emplace_back(u, u + 1);
  return Graph::from_edges(n, std::move(edges));
}

// Erdos-Renyi G(n, p), each potential edge kept independently with
// probability p, fully determined by the seed.
inline Graph make_gnp(NodeId n, double p, uint64_t seed) {
  if (n == 0) throw std::invalid_argument("make_gnp: n must be positive");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("make_gnp: p outside [0,1]");
  NodeRng rng(seed, 0x67'6e'70);  // dedicated stream id for graph sampling
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (rng.bernoulli(p)) edges.emplace_back(u, v);
  return Graph::from_edges(n, std::move(edges));
}

// Returns g plus all edges between the node sets a and b.  The sets must be
// disjoint; re-adding existing edges is a no-op.
inline Graph connect_bipartite(const Graph& g, std::span<const NodeId> a, std::span<const NodeId> b) {
  std::vector<bool> in_a(g.node_count(), false);
  for (NodeId u : a) {
    if (u >= g.node_count()) throw std::invalid_argument("connect_bipartite: node out of range");
    in_a[u] = true;
  }
  for (NodeId v : b) {
    if (v >= g.node_count()) throw std::invalid_argument("connect_bipartite: node out of range");
    if (in_a[v]) throw std::invalid_argument("connect_bipartite: sides overlap");
  }
  std::vector<std::pair<NodeId, NodeId>> edges;
  g.for_each_edge([&](NodeId u, NodeId v) { edges.emplace_back(u, v); });
  for (NodeId u : a)
    for (NodeId v : b) edges.emplace_back(u, v);
  return Graph::from_edges(g.node_count(), std::move(edges));
}

// A graph together with the adversarial wakeup schedule and group labels
// used by the hard-instance replays.  Wake rounds denote the round of a
// node's first action.
struct LBScenario {
  Graph graph;
  std::vector<uint64_t> wake_round;
  std::vector<std::string> group_label;
  uint32_t k = 0;
  uint32_t ell = 0;
  double p = 0.0;
  uint32_t m = 0;
  double p_prime = 0.0;
  uint32_t q = 0;
};

// Case 1 family: k-1 cliques C_i, each the disjoint union of k sub-cliques
// C_i(j) of clique_scale nodes (the whole C_i is one clique); k cliques U_j
// of clique_scale nodes; U_j is completely bipartite to C_i(j) for every i.
// C_i wakes in round i, every U_j wakes in round ell.
inline LBScenario make_lb_case1(uint32_t k, uint32_t clique_scale, double p, uint32_t ell) {
  if (k < 2) throw std::invalid_argument("make_lb_case1: k must be at least 2");
  if (clique_scale == 0) throw std::invalid_argument("make_lb_case1: clique_scale must be positive");
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("make_lb_case1: p outside (0,1]");
  if (ell == 0) throw std::invalid_argument("make_lb_case1: ell must be positive");

  const uint32_t s = clique_scale;
  const NodeId n = (k - 1) * k * s + k * s;
  LBScenario sc;
  sc.k = k;
  sc.ell = ell;
  sc.p = p;
  sc.q = k / 4;
  sc.wake_round.resize(n);
  sc.group_label.resize(n);

  // node layout: C_1(1..k), C_2(1..k), ..., C_{k-1}(1..k), then U_1..U_k
  auto c_node = [&](uint32_t i, uint32_t j, uint32_t t) {
    return (i - 1) * k * s + (j - 1) * s + t;
  };
  auto u_node = [&](uint32_t j, uint32_t t) { return (k - 1) * k * s + (j - 1) * s + t; };

  std::vector<std::pair<NodeId, NodeId>> edges;
  for (uint32_t i = 1; i <= k - 1; ++i) {
    NodeId lo = c_node(i, 1, 0), hi = c_node(i, k, s - 1);
    for (NodeId u = lo; u <= hi; ++u)
      for (NodeId v = u + 1; v <= hi; ++v) edges.emplace_back(u, v);
    for (uint32_t j = 1; j <= k; ++j)
      for (uint32_t t = 0; t < s; ++t) {
        NodeId c = c_node(i, j, t);
        sc.wake_round[c] = i;
        sc.group_label[c] = "C_" + std::to_string(i) + "(" + std::to_string(j) + ")";
      }
  }
  for (uint32_t j = 1; j <= k; ++j) {
    for (uint32_t t = 0; t < s; ++t) {
      NodeId u = u_node(j, t);
      sc.wake_round[u] = ell;
      sc.group_label[u] = "U_" + std::to_string(j);
      for (uint32_t t2 = t + 1; t2 < s; ++t2) edges.emplace_back(u, u_node(j, t2));
      for (uint32_t i = 1; i <= k - 1; ++i)
        for (uint32_t t2 = 0; t2 < s; ++t2) edges.emplace_back(u, c_node(i, j, t2));
    }
  }
  sc.graph = Graph::from_edges(n, std::move(edges));
  return sc;
}

// Case 2 family: m-1 cliques C_i and k cliques U_j, all of clique_scale
// nodes.  U_j neighbors U_i for i in {max(1,j-q)..j-1} with q = floor(k/4),
// and U_j neighbors every existing C_h with h >= j while j < m.  C_i wakes
// in round i, U_j wakes in round ell+j.
inline LBScenario make_lb_case2(uint32_t k, uint32_t clique_scale, double p, double p_prime,
                                uint32_t ell, uint32_t m) {
  if (k < 8) throw std::invalid_argument("make_lb_case2: k must be at least 8");
  if (m < 2) throw std::invalid_argument("make_lb_case2: m must be at least 2");
  if (clique_scale == 0) throw std::invalid_argument("make_lb_case2: clique_scale must be positive");
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("make_lb_case2: p outside (0,1]");
  if (!(p_prime > 0.0 && p_prime <= 1.0)) throw std::invalid_argument("make_lb_case2: p_prime outside (0,1]");
  if (ell == 0) throw std::invalid_argument("make_lb_case2: ell must be positive");

  const uint32_t s = clique_scale;
  const uint32_t q = k / 4;
  const NodeId n = (m - 1) * s + k * s;
  LBScenario sc;
  sc.k = k;
  sc.ell = ell;
  sc.p = p;
  sc.m = m;
  sc.p_prime = p_prime;
  sc.q = q;
  sc.wake_round.resize(n);
  sc.group_label.resize(n);

  auto c_node = [&](uint32_t i, uint32_t t) { return (i - 1) * s + t; };
  auto u_node = [&](uint32_t j, uint32_t t) { return (m - 1) * s + (j - 1) * s + t; };

  std::vector<std::pair<NodeId, NodeId>> edges;
  for (uint32_t i = 1; i <= m - 1; ++i)
    for (uint32_t t = 0; t < s; ++t) {
      NodeId c = c_node(i, t);
      sc.wake_round[c] = i;
      sc.group_label[c] = "C_" + std::to_string(i);
      for (uint32_t t2 = t + 1; t2 < s; ++t2) edges.emplace_back(c, c_node(i, t2));
    }
  for (uint32_t j = 1; j <= k; ++j)
    for (uint32_t t = 0; t < s; ++t) {
      NodeId u = u_node(j, t);
      sc.wake_round[u] = static_cast<uint64_t>(ell) + j;
      sc.group_label[u] = "U_" + std::to_string(j);
      for (uint32_t t2 = t + 1; t2 < s; ++t2) edges.emplace_back(u, u_node(j, t2));
      uint32_t lo = (j > q) ? j - q : 1;
      for (uint32_t i = lo; i < j; ++i)
        for (uint32_t t2 = 0; t2 < s; ++t2) edges.emplace_back(u, u_node(i, t2));
      if (j < m)
        for (uint32_t h = j; h <= m - 1; ++h)
          for (uint32_t t2 = 0; t2 < s; ++t2) edges.emplace_back(u, c_node(h, t2));
    }
  sc.graph = Graph::from_edges(n, std::move(edges));
  return sc;
}

// Scenario text format: the graph edge list with extra comment lines
// "# wake <node> <round>" and "# label <node> <string>".
inline std::string to_scenario_text(const LBScenario& sc) {
  std::ostringstream out;
  out << "n " << sc.graph.node_count() << "\n";
  for (NodeId v = 0; v < sc.graph.node_count(); ++v)
    out << "# wake " << v << " " << sc.wake_round[v] << "\n";
  for (NodeId v = 0; v < sc.graph.node_count(); ++v)
    out << "# label " << v << " " << sc.group_label[v] << "\n";
  sc.graph.for_each_edge([&](NodeId u, NodeId v) { out << u << " " << v << "\n"; });
  return out.str();
}

// Parses the scenario text format.  Construction parameters (k, ell, ...)
// are not stored in the file; only graph, wake rounds and labels round-trip.
inline LBScenario parse_scenario_text(std::istream& in) {
  std::string line;
  NodeId n = 0;
  bool have_header = false;
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::vector<std::pair<NodeId, uint64_t>> wakes;
  std::vector<std::pair<NodeId, std::string>> labels;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line);
      std::string hash, kind;
      ls >> hash >> kind;
      if (kind == "wake") {
        NodeId v;
        uint64_t r;
        if (!(ls >> v >> r)) throw std::invalid_argument("scenario: malformed wake line");
        wakes.emplace_back(v, r);
      } else if (kind == "label") {
        NodeId v;
        std::string lab;
        if (!(ls >> v >> lab)) throw std::invalid_argument("scenario: malformed label line");
        labels.emplace_back(v, lab);
      }
      continue;
    }
    std::istringstream ls(line);
    if (!have_header) {
      std::string tag;
      if (!(ls >> tag >> n) || tag != "n") throw std::invalid_argument("scenario: expected header 'n <count>'");
      have_header = true;
      continue;
    }
    NodeId u, v;
    if (!(ls >> u >> v)) throw std::invalid_argument("scenario: malformed edge line");
    edges.emplace_back(u, v);
  }
  if (!have_header) throw std::invalid_argument("scenario: missing header");
  LBScenario sc;
  sc.graph = Graph::from_edges(n, std::move(edges));
  sc.wake_round.assign(n, 0);
  sc.group_label.assign(n, "");
  for (auto& [v, r] : wakes) {
    if (v >= n) throw std::invalid_argument("scenario: wake node out of range");
    sc.wake_round[v] = r;
  }
  for (auto& [v, lab] : labels) {
    if (v >= n) throw std::invalid_argument("scenario: label node out of range");
    sc.group_label[v] = lab;
  }
  return sc;
}

inline LBScenario parse_scenario_text(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario_text(in);
}

}  // namespace beepnet
