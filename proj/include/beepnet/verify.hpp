#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "beepnet/engine.hpp"
#include "beepnet/graph.hpp"
#include "beepnet/rng.hpp"
#include "beepnet/topology.hpp"

namespace beepnet {

inline bool is_independent(const Graph& g, std::span<const NodeId> nodes) {
  std::vector<uint8_t> in_set(g.node_count(), 0);
  for (NodeId v : nodes) {
    if (v >= g.node_count()) throw std::invalid_argument("node out of range");
    in_set[v] = 1;
  }
  for (NodeId v : nodes)
    for (NodeId u : g.neighbors(v))
      if (in_set[u]) return false;
  return true;
}

// Independent and maximal: every node is in the set or adjacent to it.
inline bool is_mis(const Graph& g, std::span<const NodeId> nodes) {
  std::vector<uint8_t> in_set(g.node_count(), 0);
  for (NodeId v : nodes) {
    if (v >= g.node_count()) throw std::invalid_argument("node out of range");
    in_set[v] = 1;
  }
  for (NodeId v : nodes)
    for (NodeId u : g.neighbors(v))
      if (in_set[u]) return false;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (in_set[v]) continue;
    bool covered = false;
    for (NodeId u : g.neighbors(v))
      if (in_set[u]) { covered = true; break; }
    if (!covered) return false;
  }
  return true;
}

inline std::vector<NodeId> mis_nodes(std::span<const Status> statuses) {
  std::vector<NodeId> out;
  for (NodeId v = 0; v < statuses.size(); ++v)
    if (statuses[v] == Status::Mis) out.push_back(v);
  return out;
}

// A configuration is stable when every node either is an anchored MIS node
// (all of its neighbours are inactive) or has an anchored MIS neighbour.
// Sleeping or competing nodes always make the configuration unstable.
inline bool is_stable_configuration(const Graph& g,
                                    std::span<const Status> statuses) {
  const NodeId n = g.node_count();
  if (statuses.size() != n)
    throw std::invalid_argument("status vector size mismatch");
  std::vector<uint8_t> anchored(n, 0);
  for (NodeId v = 0; v < n; ++v) {
    if (statuses[v] != Status::Mis) continue;
    bool all_inactive = true;
    for (NodeId u : g.neighbors(v))
      if (statuses[u] != Status::Inactive) { all_inactive = false; break; }
    if (!all_inactive) continue;
    anchored[v] = 1;
    for (NodeId u : g.neighbors(v)) anchored[u] = 1;
  }
  for (NodeId v = 0; v < n; ++v)
    if (!anchored[v]) return false;
  return true;
}

struct RunResult {
  uint64_t seed = 0;
  std::string algorithm;
  std::string graph;
  uint32_t n = 0;
  uint64_t horizon = 0;
  uint64_t rounds_executed = 0;
  bool converged = false;
  std::optional<uint64_t> convergence_round;
  uint32_t mis_size = 0;
  uint64_t safety_violation_rounds = 0;
  uint64_t persistent_violations = 0;
  uint64_t max_violation_streak = 0;
  std::optional<uint64_t> max_k;
};

inline std::string run_result_csv_header() {
  return "seed,algorithm,graph,n,horizon,converged,convergence_round,"
         "mis_size,safety_violations,max_k";
}

inline std::string to_csv_row(const RunResult& r) {
  std::ostringstream os;
  os << r.seed << ',' << r.algorithm << ',' << r.graph << ',' << r.n << ','
     << r.horizon << ',' << (r.converged ? 1 : 0) << ',';
  if (r.convergence_round) os << *r.convergence_round;
  os << ',' << r.mis_size << ',' << r.safety_violation_rounds << ',';
  if (r.max_k) os << *r.max_k;
  return os.str();
}

// Streaming per-round analysis of a run: tracks the convergence round,
// rounds with adjacent MIS nodes, how long each such violation persists,
// and the largest priority value reported by any awake node.
class RunSummarizer {
 public:
  explicit RunSummarizer(const Graph& g, uint64_t persist_threshold = 64)
      : graph_(&g), persist_threshold_(persist_threshold) {}

  void observe(uint64_t t, std::span<const Status> statuses) {
    if (statuses.size() != graph_->node_count())
      throw std::invalid_argument("status vector size mismatch");
    if (rounds_seen_ > 0 && t != last_t_ + 1)
      throw std::invalid_argument("rounds must be observed consecutively");
    const bool changed =
        rounds_seen_ == 0 ||
        !std::equal(statuses.begin(), statuses.end(), last_.begin());
    if (changed) {
      last_.assign(statuses.begin(), statuses.end());
      change_round_ = t;
      stable_ = is_stable_configuration(*graph_, last_);
      refresh_violations(t);
    }
    if (!open_violations_.empty()) ++violation_rounds_;
    last_t_ = t;
    ++rounds_seen_;
  }

  void observe_priority(uint64_t k) {
    if (!max_k_ || k > *max_k_) max_k_ = k;
  }

  bool currently_stable() const { return stable_; }

  // Rounds for which the configuration has been both unchanged and stable.
  uint64_t stable_streak() const {
    if (rounds_seen_ == 0 || !stable_) return 0;
    return last_t_ + 1 - change_round_;
  }

  uint64_t rounds_seen() const { return rounds_seen_; }
  const std::vector<Status>& last_statuses() const { return last_; }

  RunResult finalize() const {
    RunResult r;
    r.rounds_executed = rounds_seen_;
    r.converged = rounds_seen_ > 0 && stable_;
    if (r.converged) r.convergence_round = change_round_;
    r.mis_size = static_cast<uint32_t>(
        std::count(last_.begin(), last_.end(), Status::Mis));
    r.safety_violation_rounds = violation_rounds_;
    r.persistent_violations = persistent_violations_;
    r.max_violation_streak = max_violation_streak_;
    for (const auto& [edge, start] : open_violations_) {
      const uint64_t streak = last_t_ + 1 - start;
      r.max_violation_streak = std::max(r.max_violation_streak, streak);
      if (streak >= persist_threshold_) ++r.persistent_violations;
    }
    r.max_k = max_k_;
    return r;
  }

 private:
  void refresh_violations(uint64_t t) {
    std::set<std::pair<NodeId, NodeId>> current;
    for (NodeId v = 0; v < graph_->node_count(); ++v) {
      if (last_[v] != Status::Mis) continue;
      for (NodeId u : graph_->neighbors(v))
        if (u > v && last_[u] == Status::Mis) current.emplace(v, u);
    }
    for (auto it = open_violations_.begin(); it != open_violations_.end();) {
      if (current.count(it->first)) {
        ++it;
        continue;
      }
      const uint64_t streak = t - it->second;
      max_violation_streak_ = std::max(max_violation_streak_, streak);
      if (streak >= persist_threshold_) ++persistent_violations_;
      it = open_violations_.erase(it);
    }
    for (const auto& e : current) open_violations_.emplace(e, t);
  }

  const Graph* graph_;
  uint64_t persist_threshold_;
  uint64_t rounds_seen_ = 0;
  uint64_t last_t_ = 0;
  uint64_t change_round_ = 0;
  std::vector<Status> last_;
  bool stable_ = false;
  std::map<std::pair<NodeId, NodeId>, uint64_t> open_violations_;
  uint64_t violation_rounds_ = 0;
  uint64_t persistent_violations_ = 0;
  uint64_t max_violation_streak_ = 0;
  std::optional<uint64_t> max_k_;
};

// Smallest round T such that the statuses stay constant from T through the
// end of the trace and the final configuration is stable.
inline std::optional<uint64_t> convergence_round(
    const Graph& g, const std::vector<RoundTrace>& traces) {
  RunSummarizer summ(g);
  for (const auto& tr : traces) summ.observe(tr.t, tr.statuses);
  return summ.finalize().convergence_round;
}

// Per-round snapshot of every node's probability of beeping in the round
// about to be executed.
struct PotentialProbe {
  uint64_t first_round = 0;
  std::vector<std::vector<double>> rows;

  void record(uint64_t t, std::vector<double> row) {
    if (rows.empty()) first_round = t;
    else if (t != first_round + rows.size())
      throw std::invalid_argument("probe rounds must be consecutive");
    rows.push_back(std::move(row));
  }

  bool has_round(uint64_t t) const {
    return t >= first_round && t - first_round < rows.size();
  }

  const std::vector<double>& row_at(uint64_t t) const {
    if (!has_round(t)) throw std::out_of_range("round not recorded");
    return rows[t - first_round];
  }
};

// Sum of beep probabilities over a node set at round t.
inline double beep_potential(const PotentialProbe& probe,
                             std::span<const NodeId> nodes, uint64_t t) {
  const auto& row = probe.row_at(t);
  double sum = 0.0;
  for (NodeId v : nodes) {
    if (v >= row.size()) throw std::invalid_argument("node out of range");
    sum += row[v];
  }
  return sum;
}

// A node is good when at least a third of its still-active neighbours have
// active degree no larger than its own.  Degrees are taken in the subgraph
// induced by the active nodes.
inline std::vector<NodeId> good_nodes(const Graph& g,
                                      std::span<const NodeId> active) {
  const NodeId n = g.node_count();
  std::vector<uint8_t> act(n, 0);
  for (NodeId v : active) {
    if (v >= n) throw std::invalid_argument("node out of range");
    act[v] = 1;
  }
  std::vector<uint32_t> deg(n, 0);
  for (NodeId v = 0; v < n; ++v) {
    if (!act[v]) continue;
    for (NodeId u : g.neighbors(v))
      if (act[u]) ++deg[v];
  }
  std::vector<NodeId> good;
  for (NodeId v = 0; v < n; ++v) {
    if (!act[v]) continue;
    uint32_t low_or_equal = 0;
    for (NodeId u : g.neighbors(v))
      if (act[u] && deg[u] <= deg[v]) ++low_or_equal;
    if (3ull * low_or_equal >= deg[v]) good.push_back(v);
  }
  return good;
}

struct GoodEdgeStats {
  uint64_t active_edges = 0;
  uint64_t good_edges = 0;  // active edges with at least one good endpoint
};

inline GoodEdgeStats good_edge_stats(const Graph& g,
                                     std::span<const NodeId> active) {
  const NodeId n = g.node_count();
  std::vector<uint8_t> act(n, 0), good(n, 0);
  for (NodeId v : active) act[v] = 1;
  for (NodeId v : good_nodes(g, active)) good[v] = 1;
  GoodEdgeStats stats;
  g.for_each_edge([&](NodeId u, NodeId v) {
    if (!act[u] || !act[v]) return;
    ++stats.active_edges;
    if (good[u] || good[v]) ++stats.good_edges;
  });
  return stats;
}

// Monte Carlo mean of the round in which the last of n/2 independent pairs
// breaks symmetry, where each pair breaks with probability 1/2 per round.
inline double pair_symmetry_oracle(uint32_t n, uint32_t trials,
                                   uint64_t seed) {
  if (n == 0 || n % 2 != 0)
    throw std::invalid_argument("n must be positive and even");
  if (trials == 0) throw std::invalid_argument("trials must be positive");
  const uint32_t pairs = n / 2;
  double sum = 0.0;
  for (uint32_t trial = 0; trial < trials; ++trial) {
    NodeRng rng(seed, trial);
    uint64_t round = 0;
    for (uint32_t undecided = pairs; undecided > 0;) {
      ++round;
      uint32_t still = 0;
      for (uint32_t j = 0; j < undecided; ++j)
        if (!rng.bernoulli(0.5)) ++still;
      undecided = still;
    }
    sum += static_cast<double>(round);
  }
  return sum / trials;
}

// Within every group of nodes sharing the same "U..." label, checks that
// all observation histories agree on their first prefix_len entries.
// Histories start at each node's first awake round.
inline bool indistinguishability_check(const LBScenario& scenario,
                                       const std::vector<RoundTrace>& traces,
                                       uint64_t prefix_len) {
  std::map<std::string, std::vector<NodeId>> groups;
  for (NodeId v = 0; v < scenario.group_label.size(); ++v) {
    const std::string& label = scenario.group_label[v];
    if (!label.empty() && label[0] == 'U') groups[label].push_back(v);
  }
  for (const auto& [label, members] : groups) {
    std::vector<Obs> first;
    for (size_t idx = 0; idx < members.size(); ++idx) {
      auto hist = observation_history(traces, members[idx]);
      if (hist.size() < prefix_len)
        throw std::invalid_argument(
            "trace too short for the requested prefix");
      hist.resize(prefix_len);
      if (idx == 0)
        first = std::move(hist);
      else if (hist != first)
        return false;
    }
  }
  return true;
}

}  // namespace beepnet
