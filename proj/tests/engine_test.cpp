#include "beepnet/engine.hpp"

#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

#include "beepnet/protocols/alg1.hpp"
#include "beepnet/runner.hpp"
#include "beepnet/topology.hpp"

using namespace beepnet;

namespace {

// Plays back a fixed action string, one letter per participating round
// ('B' beeps, anything else listens), and logs the feedback it receives.
struct Scripted {
  std::string script;
  size_t pos = 0;
  std::vector<uint8_t> heard_log;
  std::vector<uint8_t> woke_log;

  Action decide(uint64_t, NodeRng&) {
    char c = pos < script.size() ? script[pos] : 'L';
    ++pos;
    return c == 'B' ? Action::Beep : Action::Listen;
  }
  void absorb(const RoundFeedback& fb, uint64_t, NodeRng&) {
    heard_log.push_back(fb.heard_beep ? 1 : 0);
    woke_log.push_back(fb.woke_this_round ? 1 : 0);
  }
  Status status() const { return Status::Competing; }
};

template <class F>
SimState<Scripted> scripted_state(const Graph& g, F&& script_for, WakeupSchedule sched,
                                  EngineConfig cfg = {}) {
  return init<Scripted>(
      g, [&](NodeId v) { return Scripted{script_for(v), 0, {}, {}}; }, std::move(sched),
      std::move(cfg), 1);
}

TEST(Engine, TraceShapeAndStatuses) {
  auto g = make_path(3);
  auto st = scripted_state(g, [](NodeId) { return std::string("L"); },
                           WakeupSchedule::all_at(3, 0));
  auto tr = step(st);
  EXPECT_EQ(tr.t, 0u);
  ASSERT_EQ(tr.actions.size(), 3u);
  ASSERT_EQ(tr.heard.size(), 3u);
  ASSERT_EQ(tr.statuses.size(), 3u);
  for (NodeId v = 0; v < 3; ++v) EXPECT_EQ(tr.statuses[v], Status::Competing);
  EXPECT_EQ(st.t, 1u);
}

TEST(Engine, SleepingNodesAreInert) {
  auto g = make_path(2);
  WakeupSchedule sched;
  sched.wake_round = {0, 3};
  auto st = scripted_state(g, [](NodeId v) { return v == 0 ? std::string("BBBB") : std::string("B"); },
                           sched);
  for (int i = 0; i < 3; ++i) {
    auto tr = step(st);
    EXPECT_EQ(tr.actions[1], Action::Listen);
    EXPECT_EQ(tr.heard[1], 0);
    EXPECT_EQ(tr.statuses[1], Status::Sleeping);
    EXPECT_FALSE(st.is_awake(1));
  }
  auto tr = step(st);
  EXPECT_EQ(tr.actions[1], Action::Beep);
  EXPECT_NE(tr.statuses[1], Status::Sleeping);
  EXPECT_EQ(st.first_action[1], 3u);
  ASSERT_EQ(st.automata[1].woke_log.size(), 1u);
  EXPECT_EQ(st.automata[1].woke_log[0], 1);
  // node 0 never saw a wake flag after round 0
  EXPECT_EQ(st.automata[0].woke_log[0], 1);
  EXPECT_EQ(st.automata[0].woke_log[1], 0);
}

TEST(Engine, NoSelfHearing) {
  auto g = make_clique(1);
  for (auto mode : {FeedbackMode::Plain, FeedbackMode::SenderCd}) {
    EngineConfig cfg;
    cfg.feedback = mode;
    auto st = scripted_state(g, [](NodeId) { return std::string("BBB"); },
                             WakeupSchedule::all_at(1, 0), cfg);
    for (int i = 0; i < 3; ++i) {
      auto tr = step(st);
      EXPECT_EQ(tr.heard[0], 0);
    }
  }
}

TEST(Engine, ListenerHearsNeighborOr) {
  // star: 0 is center of a path 1-0-2; only leaves beep
  auto g = Graph::from_edges(3, {{0, 1}, {0, 2}});
  auto st = scripted_state(
      g,
      [](NodeId v) {
        if (v == 1) return std::string("BLL");
        if (v == 2) return std::string("BBL");
        return std::string("LLL");
      },
      WakeupSchedule::all_at(3, 0));
  auto t0 = step(st);
  EXPECT_EQ(t0.heard[0], 1);  // both beeped
  EXPECT_EQ(t0.heard[1], 0);  // plain beeper learns nothing
  EXPECT_EQ(t0.heard[2], 0);
  auto t1 = step(st);
  EXPECT_EQ(t1.heard[0], 1);
  EXPECT_EQ(t1.heard[1], 0);  // 1's only neighbor is the silent center
  auto t2 = step(st);
  EXPECT_EQ(t2.heard[0], 0);
}

TEST(Engine, SenderCdReportsCollisions) {
  auto g = make_clique(2);
  EngineConfig cfg;
  cfg.feedback = FeedbackMode::SenderCd;
  auto st = scripted_state(g, [](NodeId v) { return v == 0 ? std::string("BB") : std::string("BL"); },
                           WakeupSchedule::all_at(2, 0), cfg);
  auto t0 = step(st);
  EXPECT_EQ(t0.heard[0], 1);  // concurrent beep detected by the sender
  EXPECT_EQ(t0.heard[1], 1);
  auto t1 = step(st);
  EXPECT_EQ(t1.heard[0], 0);  // beeping alone
  EXPECT_EQ(t1.heard[1], 1);
}

TEST(Engine, FeedbackMatchesBruteForceRecomputation) {
  std::mt19937 gen(99);
  for (int rep = 0; rep < 6; ++rep) {
    const NodeId n = 12;
    auto g = make_gnp(n, 0.3, 1000 + rep);
    auto mode = rep % 2 == 0 ? FeedbackMode::Plain : FeedbackMode::SenderCd;
    EngineConfig cfg;
    cfg.feedback = mode;
    auto st = scripted_state(
        g,
        [&](NodeId) {
          std::string s;
          for (int i = 0; i < 20; ++i) s += (gen() % 3 == 0) ? 'B' : 'L';
          return s;
        },
        WakeupSchedule::all_at(n, 0), cfg);
    for (int round = 0; round < 20; ++round) {
      auto tr = step(st);
      for (NodeId v = 0; v < n; ++v) {
        bool any = false;
        for (NodeId u : g.neighbors(v)) any = any || tr.actions[u] == Action::Beep;
        bool expect = tr.actions[v] == Action::Listen
                          ? any
                          : (mode == FeedbackMode::SenderCd && any);
        EXPECT_EQ(tr.heard[v] != 0, expect) << "rep " << rep << " round " << round << " node " << v;
      }
    }
  }
}

TEST(Engine, WakeOnBeepPropagatesWithOneRoundDelay) {
  auto g = make_path(3);
  WakeupSchedule sched;
  sched.wake_round = {0, WakeupSchedule::kNever, WakeupSchedule::kNever};
  EngineConfig cfg;
  cfg.wake_mode = WakeMode::WakeOnBeep;
  auto st = scripted_state(g, [](NodeId) { return std::string("BBBB"); }, sched, cfg);

  auto t0 = step(st);
  EXPECT_EQ(t0.statuses[1], Status::Sleeping);
  EXPECT_EQ(t0.statuses[2], Status::Sleeping);
  EXPECT_EQ(st.first_action[1], 1u);
  EXPECT_EQ(st.first_action[2], WakeupSchedule::kNever);

  auto t1 = step(st);
  EXPECT_EQ(t1.actions[1], Action::Beep);
  EXPECT_EQ(t1.statuses[2], Status::Sleeping);
  EXPECT_EQ(st.first_action[2], 2u);

  auto t2 = step(st);
  EXPECT_EQ(t2.actions[2], Action::Beep);
  ASSERT_EQ(st.automata[2].woke_log.size(), 1u);
  EXPECT_EQ(st.automata[2].woke_log[0], 1);
}

TEST(Engine, ConfigValidation) {
  auto g = make_path(2);
  WakeupSchedule bad;
  bad.wake_round = {0};
  EXPECT_THROW(scripted_state(g, [](NodeId) { return std::string("L"); }, bad), ConfigError);

  WakeupSchedule never;
  never.wake_round = {0, WakeupSchedule::kNever};
  EXPECT_THROW(scripted_state(g, [](NodeId) { return std::string("L"); }, never), ConfigError);
  EngineConfig onbeep;
  onbeep.wake_mode = WakeMode::WakeOnBeep;
  EXPECT_NO_THROW(scripted_state(g, [](NodeId) { return std::string("L"); }, never, onbeep));

  EngineConfig salt;
  salt.node_seed_salt = {1, 2, 3};
  EXPECT_THROW(scripted_state(g, [](NodeId) { return std::string("L"); },
                              WakeupSchedule::all_at(2, 0), salt),
               ConfigError);
}

TEST(Engine, StaggeredSchedule) {
  auto s = WakeupSchedule::staggered(4, 3);
  ASSERT_EQ(s.wake_round.size(), 4u);
  EXPECT_EQ(s.wake_round[0], 0u);
  EXPECT_EQ(s.wake_round[3], 9u);
}

std::vector<RoundTrace> run_alg1(const Graph& g, uint64_t seed, uint64_t horizon,
                                 std::vector<uint64_t> salt = {}) {
  EngineConfig cfg;
  cfg.node_seed_salt = std::move(salt);
  auto st = init<Alg1Automaton>(
      g, [&](NodeId) { return Alg1Automaton(g.node_count(), 2); },
      WakeupSchedule::all_at(g.node_count(), 0), cfg, seed);
  std::vector<RoundTrace> traces;
  for (uint64_t i = 0; i < horizon; ++i) traces.push_back(step(st));
  return traces;
}

bool traces_equal(const std::vector<RoundTrace>& a, const std::vector<RoundTrace>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].actions != b[i].actions || a[i].heard != b[i].heard ||
        a[i].statuses != b[i].statuses)
      return false;
  }
  return true;
}

TEST(Engine, DeterministicInSeed) {
  auto g = make_gnp(24, 0.25, 5);
  auto a = run_alg1(g, 42, 400);
  auto b = run_alg1(g, 42, 400);
  auto c = run_alg1(g, 43, 400);
  EXPECT_TRUE(traces_equal(a, b));
  EXPECT_FALSE(traces_equal(a, c));
}

TEST(Engine, NodeStreamsAreIndependent) {
  // two isolated nodes: changing one node's salt must not disturb the other
  auto g = Graph::from_edges(2, {});
  auto base = run_alg1(g, 7, 300, {0, 0});
  auto perturbed = run_alg1(g, 7, 300, {0, 999});
  bool node1_differs = false;
  for (size_t i = 0; i < base.size(); ++i) {
    EXPECT_EQ(base[i].actions[0], perturbed[i].actions[0]) << "round " << i;
    node1_differs = node1_differs || base[i].actions[1] != perturbed[i].actions[1];
  }
  EXPECT_TRUE(node1_differs);
}

TEST(Engine, ObservationHistoryClassification) {
  auto g = make_path(2);
  WakeupSchedule sched;
  sched.wake_round = {0, 2};
  auto st = scripted_state(g, [](NodeId v) { return v == 0 ? std::string("BLLL") : std::string("LB"); },
                           sched);
  std::vector<RoundTrace> traces;
  for (int i = 0; i < 4; ++i) traces.push_back(step(st));

  auto h0 = observation_history(traces, 0);
  ASSERT_EQ(h0.size(), 4u);
  EXPECT_EQ(h0[0], Obs::Beeped);
  EXPECT_EQ(h0[1], Obs::Silence);
  EXPECT_EQ(h0[2], Obs::Silence);
  EXPECT_EQ(h0[3], Obs::Heard);

  auto h1 = observation_history(traces, 1);  // wakes at round 2
  ASSERT_EQ(h1.size(), 2u);
  EXPECT_EQ(h1[0], Obs::Silence);
  EXPECT_EQ(h1[1], Obs::Beeped);
}

TEST(Runner, TraceCountAndEarlyStop) {
  auto g = make_clique(4);
  auto st = init<Alg1Automaton>(
      g, [&](NodeId) { return Alg1Automaton(4, 2); }, WakeupSchedule::all_at(4, 0),
      EngineConfig{}, 3);
  auto out = run(st, 50);
  EXPECT_EQ(out.traces.size(), 50u);
  EXPECT_EQ(out.result.rounds_executed, 50u);

  auto st2 = init<Alg1Automaton>(
      g, [&](NodeId) { return Alg1Automaton(4, 2); }, WakeupSchedule::all_at(4, 0),
      EngineConfig{}, 3);
  RunOptions opt;
  opt.stop_when_stable_for = 20;
  auto out2 = run(st2, 100000, opt);
  EXPECT_LT(out2.result.rounds_executed, 100000u);
  EXPECT_TRUE(out2.result.converged);
  ASSERT_TRUE(out2.result.convergence_round.has_value());
  // stopping earlier must not change the reported convergence round
  auto st3 = init<Alg1Automaton>(
      g, [&](NodeId) { return Alg1Automaton(4, 2); }, WakeupSchedule::all_at(4, 0),
      EngineConfig{}, 3);
  auto full = run(st3, out2.result.rounds_executed + 500);
  EXPECT_EQ(full.result.convergence_round, out2.result.convergence_round);
}

TEST(Runner, PotentialProbeRowsCoverParticipants) {
  auto g = make_clique(3);
  WakeupSchedule sched;
  sched.wake_round = {0, 0, 5};
  auto st = init<Alg1Automaton>(
      g, [&](NodeId) { return Alg1Automaton(8, 1); }, sched, EngineConfig{}, 11);
  RunOptions opt;
  opt.record_potential = true;
  auto out = run(st, 8, opt);
  ASSERT_TRUE(out.probe.has_round(0));
  ASSERT_TRUE(out.probe.has_round(5));
  // inactive countdown: probability 0 while listening
  EXPECT_EQ(out.probe.row_at(0)[0], 0.0);
  EXPECT_EQ(out.probe.row_at(0)[2], 0.0);  // asleep
  EXPECT_EQ(out.probe.row_at(5)[2], 0.0);  // first round, still counting down
}

}  // namespace
