#pragma once

#include <concepts>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "beepnet/graph.hpp"
#include "beepnet/rng.hpp"

namespace beepnet {

enum class Action : uint8_t { Listen = 0, Beep = 1 };

enum class Status : uint8_t { Sleeping = 0, Inactive = 1, Competing = 2, Mis = 3 };

inline char status_char(Status s) {
  switch (s) {
    case Status::Sleeping: return 'S';
    case Status::Inactive: return 'I';
    case Status::Competing: return 'C';
    case Status::Mis: return 'M';
  }
  throw std::logic_error("status_char: bad status");
}

inline Status status_from_char(char c) {
  switch (c) {
    case 'S': return Status::Sleeping;
    case 'I': return Status::Inactive;
    case 'C': return Status::Competing;
    case 'M': return Status::Mis;
  }
  throw std::invalid_argument("status_from_char: bad status letter");
}

// Plain: a beeping node learns nothing that round.  SenderCd: a beeping node
// additionally learns whether at least one neighbor beeped concurrently.
enum class FeedbackMode : uint8_t { Plain = 0, SenderCd = 1 };

// AdversarialOnly: nodes wake exactly at their scheduled round.  WakeOnBeep:
// additionally, a sleeping node with a beeping neighbor in round t takes its
// first action in round t+1.
enum class WakeMode : uint8_t { AdversarialOnly = 0, WakeOnBeep = 1 };

struct RoundFeedback {
  bool heard_beep = false;
  bool woke_this_round = false;
};

// Everything recorded about one finished round.  Vectors are indexed by node
// id; sleeping nodes read Listen / false / Sleeping.  Statuses are the
// automata's self-reported labels after the round's state update.
struct RoundTrace {
  uint64_t t = 0;
  std::vector<Action> actions;
  std::vector<uint8_t> heard;
  std::vector<Status> statuses;
};

struct WakeupSchedule {
  static constexpr uint64_t kNever = std::numeric_limits<uint64_t>::max();

  // wake_round[v] is the round of v's first action; kNever means the
  // adversary never wakes v (it may still be woken by a beep).
  std::vector<uint64_t> wake_round;

  static WakeupSchedule all_at(NodeId n, uint64_t round) {
    WakeupSchedule s;
    s.wake_round.assign(n, round);
    return s;
  }

  static WakeupSchedule staggered(NodeId n, uint64_t stride) {
    WakeupSchedule s;
    s.wake_round.resize(n);
    for (NodeId v = 0; v < n; ++v) s.wake_round[v] = static_cast<uint64_t>(v) * stride;
    return s;
  }
};

struct EngineConfig {
  FeedbackMode feedback = FeedbackMode::Plain;
  WakeMode wake_mode = WakeMode::AdversarialOnly;
  // Optional per-node salt mixed into the node's random stream; empty means
  // no salt.  Used to probe that one node's randomness cannot leak to
  // another except through delivered beeps.
  std::vector<uint64_t> node_seed_salt;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class A>
concept NodeAutomaton = std::copyable<A> && requires(A a, const A& ca, RoundFeedback fb, uint64_t t, NodeRng& rng) {
  { a.decide(t, rng) } -> std::same_as<Action>;
  a.absorb(fb, t, rng);
  { ca.status() } -> std::same_as<Status>;
};

template <NodeAutomaton A>
struct SimState {
  Graph graph;
  EngineConfig config;
  WakeupSchedule schedule;
  uint64_t t = 0;
  std::vector<A> automata;
  std::vector<NodeRng> rng;
  // first_action[v]: round of v's first action, kNever while unknown.
  std::vector<uint64_t> first_action;
  std::vector<uint8_t> awake;

  bool is_awake(NodeId v) const { return awake[v] != 0; }
};

// Builds the initial state at t = 0 with every node asleep.  The factory is
// called once per node id to produce that node's automaton.
template <NodeAutomaton A, class Factory>
SimState<A> init(Graph graph, Factory&& factory, WakeupSchedule schedule, EngineConfig config,
                 uint64_t seed) {
  const NodeId n = graph.node_count();
  if (schedule.wake_round.size() != n)
    throw ConfigError("engine: wakeup schedule size does not match graph");
  if (!config.node_seed_salt.empty() && config.node_seed_salt.size() != n)
    throw ConfigError("engine: node seed salt size does not match graph");
  if (config.wake_mode == WakeMode::AdversarialOnly) {
    for (NodeId v = 0; v < n; ++v)
      if (schedule.wake_round[v] == WakeupSchedule::kNever)
        throw ConfigError("engine: adversarial-only wakeup requires a finite wake round for every node");
  }
  SimState<A> st;
  st.graph = std::move(graph);
  st.config = std::move(config);
  st.schedule = std::move(schedule);
  st.automata.reserve(n);
  for (NodeId v = 0; v < n; ++v) st.automata.push_back(factory(v));
  st.rng.reserve(n);
  for (NodeId v = 0; v < n; ++v) {
    uint64_t salt = st.config.node_seed_salt.empty() ? 0 : st.config.node_seed_salt[v];
    st.rng.emplace_back(seed, v, salt);
  }
  st.first_action.assign(n, WakeupSchedule::kNever);
  st.awake.assign(n, 0);
  return st;
}

// Advances the simulation by one round:
//   1. wake nodes whose adversarial wake round is t,
//   2. every awake automaton picks an action,
//   3. per node, compute whether any awake neighbor beeped,
//   4. deliver feedback according to the feedback mode,
//   5. under WakeOnBeep, sleeping nodes with a beeping neighbor wake for t+1,
//   6. awake automata absorb their feedback,
//   7. advance t and emit the round record.
template <NodeAutomaton A>
RoundTrace step(SimState<A>& st) {
  const NodeId n = st.graph.node_count();
  const uint64_t t = st.t;

  for (NodeId v = 0; v < n; ++v)
    if (!st.is_awake(v) && st.schedule.wake_round[v] == t) {
      st.awake[v] = 1;
      st.first_action[v] = t;
    }

  RoundTrace tr;
  tr.t = t;
  tr.actions.assign(n, Action::Listen);
  tr.heard.assign(n, 0);
  tr.statuses.assign(n, Status::Sleeping);

  std::vector<uint8_t> acted(st.awake);
  for (NodeId v = 0; v < n; ++v)
    if (acted[v]) tr.actions[v] = st.automata[v].decide(t, st.rng[v]);

  std::vector<uint8_t> neighbor_beeped(n, 0);
  for (NodeId u = 0; u < n; ++u)
    if (tr.actions[u] == Action::Beep)
      for (NodeId w : st.graph.neighbors(u)) neighbor_beeped[w] = 1;

  for (NodeId v = 0; v < n; ++v) {
    if (!acted[v]) continue;
    bool heard = tr.actions[v] == Action::Listen
                     ? neighbor_beeped[v] != 0
                     : (st.config.feedback == FeedbackMode::SenderCd && neighbor_beeped[v] != 0);
    tr.heard[v] = heard ? 1 : 0;
  }

  if (st.config.wake_mode == WakeMode::WakeOnBeep) {
    for (NodeId v = 0; v < n; ++v)
      if (!st.is_awake(v) && neighbor_beeped[v]) {
        st.awake[v] = 1;
        st.first_action[v] = t + 1;
      }
  }

  for (NodeId v = 0; v < n; ++v) {
    if (!acted[v]) continue;
    RoundFeedback fb{tr.heard[v] != 0, st.first_action[v] == t};
    st.automata[v].absorb(fb, t, st.rng[v]);
    tr.statuses[v] = st.automata[v].status();
  }

  st.t = t + 1;
  return tr;
}

enum class Obs : uint8_t { Beeped = 0, Heard = 1, Silence = 2 };

// Per-round observations of one node since its first participating round:
// Beeped if it beeped, Heard if it listened and heard a beep, Silence
// otherwise.  A node that never woke yields an empty sequence.
inline std::vector<Obs> observation_history(const std::vector<RoundTrace>& traces, NodeId v) {
  std::vector<Obs> h;
  for (const RoundTrace& tr : traces) {
    if (v >= tr.statuses.size()) throw std::invalid_argument("observation_history: node out of range");
    if (tr.statuses[v] == Status::Sleeping && h.empty()) continue;
    if (tr.actions[v] == Action::Beep)
      h.push_back(Obs::Beeped);
    else
      h.push_back(tr.heard[v] ? Obs::Heard : Obs::Silence);
  }
  return h;
}

}  // namespace beepnet
