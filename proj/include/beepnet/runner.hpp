#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "beepnet/engine.hpp"
#include "beepnet/verify.hpp"

namespace beepnet {

template <class A>
concept ReportsBeepProbability = requires(const A& a) {
  { a.beep_probability() } -> std::convertible_to<double>;
};

template <class A>
concept ReportsPrioritySize = requires(const A& a) {
  { a.priority_size() } -> std::convertible_to<uint64_t>;
};

struct RunOptions {
  bool keep_traces = true;
  bool record_potential = false;
  // Stop early once the configuration has been stable and unchanged for
  // this many rounds.  0 disables early stopping.
  uint64_t stop_when_stable_for = 0;
  uint64_t persist_threshold = 64;
};

struct RunOutput {
  std::vector<RoundTrace> traces;
  PotentialProbe probe;
  RunResult result;
};

// Advances the simulation up to `horizon` rounds, feeding every round into
// a RunSummarizer.  Fills the measurement fields of RunOutput::result;
// provenance fields (seed, algorithm, graph, n) are the caller's job.
template <NodeAutomaton A>
RunOutput run(SimState<A>& state, uint64_t horizon,
              const RunOptions& opt = {}) {
  if (horizon == 0) throw std::invalid_argument("horizon must be positive");
  const NodeId n = state.graph.node_count();
  RunSummarizer summ(state.graph, opt.persist_threshold);
  RunOutput out;
  for (uint64_t i = 0; i < horizon; ++i) {
    if constexpr (ReportsBeepProbability<A>) {
      if (opt.record_potential) {
        std::vector<double> row(n, 0.0);
        for (NodeId v = 0; v < n; ++v)
          if (state.is_awake(v) || state.schedule.wake_round[v] == state.t)
            row[v] = state.automata[v].beep_probability();
        out.probe.record(state.t, std::move(row));
      }
    }
    RoundTrace tr = step(state);
    summ.observe(tr.t, tr.statuses);
    if constexpr (ReportsPrioritySize<A>) {
      for (NodeId v = 0; v < n; ++v)
        if (state.is_awake(v))
          summ.observe_priority(state.automata[v].priority_size());
    }
    if (opt.keep_traces) out.traces.push_back(std::move(tr));
    if (opt.stop_when_stable_for > 0 &&
        summ.stable_streak() >= opt.stop_when_stable_for)
      break;
  }
  out.result = summ.finalize();
  out.result.horizon = horizon;
  out.result.n = n;
  return out;
}

}  // namespace beepnet
