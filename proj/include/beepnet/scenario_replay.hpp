#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "beepnet/engine.hpp"
#include "beepnet/protocols/reference.hpp"
#include "beepnet/runner.hpp"
#include "beepnet/topology.hpp"
#include "beepnet/verify.hpp"

namespace beepnet {

// One seeded replay of a lower-bound scenario with every node running the
// reference silence beeper.  The stored wake rounds are used directly as
// first-action rounds.
inline std::vector<RoundTrace> replay_scenario(const LBScenario& sc,
                                               OnBeepRule rule, uint64_t seed,
                                               uint64_t horizon) {
  WakeupSchedule sched;
  sched.wake_round = sc.wake_round;
  EngineConfig ec;
  ec.feedback = FeedbackMode::Plain;
  ec.wake_mode = WakeMode::AdversarialOnly;
  auto st = init<ReferenceSilenceBeeper>(
      sc.graph,
      [&](NodeId) {
        return ReferenceSilenceBeeper(sc.ell, sc.p, rule, sc.m, sc.p_prime);
      },
      sched, ec, seed);
  RunOptions opt;
  opt.keep_traces = true;
  return run(st, horizon, opt).traces;
}

inline uint64_t scenario_auto_horizon(const LBScenario& sc,
                                      uint64_t prefix_len) {
  uint64_t max_wake = 0;
  for (uint64_t w : sc.wake_round) max_wake = std::max(max_wake, w);
  return max_wake + prefix_len + 2;
}

// True iff every node in each "U_<j>" group with j <= max_group (0 = no
// bound) observes no pure-silence round among its first prefix_len
// participating rounds.
inline bool collision_cover_check(const LBScenario& sc,
                                  const std::vector<RoundTrace>& traces,
                                  uint64_t prefix_len, uint32_t max_group) {
  for (NodeId v = 0; v < sc.group_label.size(); ++v) {
    const std::string& label = sc.group_label[v];
    if (label.rfind("U_", 0) != 0) continue;
    if (max_group != 0) {
      const uint32_t j =
          static_cast<uint32_t>(std::stoul(label.substr(2)));
      if (j > max_group) continue;
    }
    auto hist = observation_history(traces, v);
    if (hist.size() < prefix_len)
      throw std::invalid_argument("trace too short for the requested prefix");
    for (uint64_t r = 0; r < prefix_len; ++r)
      if (hist[r] == Obs::Silence) return false;
  }
  return true;
}

struct ScenarioReplayStats {
  uint64_t seeds = 0;
  uint64_t equal_prefix_seeds = 0;
  uint64_t collision_cover_seeds = 0;
  uint64_t prefix_len = 0;

  double equal_fraction() const {
    return seeds ? static_cast<double>(equal_prefix_seeds) / seeds : 0.0;
  }
  double cover_fraction() const {
    return seeds ? static_cast<double>(collision_cover_seeds) / seeds : 0.0;
  }
};

// Replays the scenario once per seed and aggregates the two per-seed
// checks: identical observation prefixes within every U-group, and
// no-silence coverage of the prefix (restricted to U_1..U_{max_cover_group}
// when that bound is nonzero).
inline ScenarioReplayStats replay_scenario_suite(
    const LBScenario& sc, OnBeepRule rule, std::span<const uint64_t> seeds,
    uint64_t prefix_len, uint32_t max_cover_group = 0) {
  ScenarioReplayStats stats;
  stats.prefix_len = prefix_len;
  const uint64_t horizon = scenario_auto_horizon(sc, prefix_len);
  for (uint64_t seed : seeds) {
    const auto traces = replay_scenario(sc, rule, seed, horizon);
    ++stats.seeds;
    if (indistinguishability_check(sc, traces, prefix_len))
      ++stats.equal_prefix_seeds;
    if (collision_cover_check(sc, traces, prefix_len, max_cover_group))
      ++stats.collision_cover_seeds;
  }
  return stats;
}

}  // namespace beepnet
