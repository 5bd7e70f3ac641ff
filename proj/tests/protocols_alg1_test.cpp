#include "beepnet/protocols/alg1.hpp"

#include <gtest/gtest.h>

#include "beepnet/runner.hpp"
#include "beepnet/topology.hpp"
#include "beepnet/verify.hpp"
#include "oracles.hpp"

using namespace beepnet;

namespace {

RoundFeedback silence() { return RoundFeedback{false, false}; }
RoundFeedback beep_heard() { return RoundFeedback{true, false}; }

// One decide/absorb cycle against scripted randomness.
Action play(Alg1Automaton& a, oracle::FakeRng& rng, RoundFeedback fb) {
  Action act = a.decide(0, rng);
  a.absorb(fb, 0, rng);
  return act;
}

TEST(Alg1, CtorValidation) {
  EXPECT_THROW(Alg1Automaton(0, 2), std::invalid_argument);
  EXPECT_THROW(Alg1Automaton(8, 0), std::invalid_argument);
  EXPECT_NO_THROW(Alg1Automaton(1, 1));
}

TEST(Alg1, SegmentLengthsWithoutInterference) {
  // N=8, c=2: 18 listening rounds, 3 phases of 6 rounds, then MIS blocks.
  Alg1Automaton a(8, 2);
  oracle::FakeRng rng;
  for (int r = 0; r < 18; ++r) {
    EXPECT_EQ(play(a, rng, silence()), Action::Listen);
    EXPECT_EQ(a.status(), Status::Inactive) << "round " << r;
  }
  for (int r = 0; r < 18; ++r) {
    play(a, rng, silence());
    EXPECT_EQ(a.status(), Status::Competing) << "round " << r;
  }
  rng.units = {0.3};
  play(a, rng, silence());
  EXPECT_EQ(a.status(), Status::Mis);
}

TEST(Alg1, PhaseProbabilitiesDouble) {
  Alg1Automaton a(8, 2);
  EXPECT_DOUBLE_EQ(a.phase_beep_probability(1), 2.0 / 64.0);
  EXPECT_DOUBLE_EQ(a.phase_beep_probability(2), 4.0 / 64.0);
  EXPECT_DOUBLE_EQ(a.phase_beep_probability(3), 8.0 / 64.0);

  Alg1Automaton b(100, 1);  // bound rounded up to 128 via its log
  EXPECT_DOUBLE_EQ(b.phase_beep_probability(1), 2.0 / 800.0);
}

TEST(Alg1, ReportedProbabilityTracksSegments) {
  Alg1Automaton a(8, 2);
  oracle::FakeRng rng;
  EXPECT_DOUBLE_EQ(a.beep_probability(), 0.0);
  for (int r = 0; r < 17; ++r) play(a, rng, silence());
  EXPECT_DOUBLE_EQ(a.beep_probability(), 0.0);
  play(a, rng, silence());  // 18th silent round: advance is now scheduled
  EXPECT_DOUBLE_EQ(a.beep_probability(), 2.0 / 64.0);
  for (int r = 0; r < 6; ++r) play(a, rng, silence());
  EXPECT_DOUBLE_EQ(a.beep_probability(), 4.0 / 64.0);
  for (int r = 0; r < 12; ++r) play(a, rng, silence());
  EXPECT_DOUBLE_EQ(a.beep_probability(), 0.0);  // MIS pending: out of the competition
}

TEST(Alg1, HearingWhileListeningRestarts) {
  Alg1Automaton a(8, 2);
  oracle::FakeRng rng;
  for (int r = 0; r < 20; ++r) play(a, rng, silence());
  ASSERT_EQ(a.status(), Status::Competing);
  play(a, rng, beep_heard());  // listens (scripted rng never beeps)
  EXPECT_EQ(a.status(), Status::Inactive);
  for (int r = 0; r < 17; ++r) {
    play(a, rng, silence());
    EXPECT_EQ(a.status(), Status::Inactive);
  }
  play(a, rng, silence());
  play(a, rng, silence());
  EXPECT_EQ(a.status(), Status::Competing);
}

TEST(Alg1, HearingWhileBeepingDoesNotRestart) {
  Alg1Automaton a(8, 2);
  oracle::FakeRng rng;
  for (int r = 0; r < 18; ++r) play(a, rng, silence());
  rng.units = {0.0};  // force the competition beep
  Action act = a.decide(0, rng);
  ASSERT_EQ(act, Action::Beep);
  a.absorb(beep_heard(), 0, rng);
  EXPECT_EQ(a.status(), Status::Competing);
}

TEST(Alg1, MisBlocksBeepExactlyOnce) {
  Alg1Automaton a(8, 2);
  oracle::FakeRng rng;
  for (int r = 0; r < 36; ++r) play(a, rng, silence());
  for (int block = 0; block < 50; ++block) {
    rng.units = {block % 2 == 0 ? 0.1 : 0.9};
    Action first = play(a, rng, silence());
    Action second = play(a, rng, silence());
    EXPECT_EQ((first == Action::Beep) + (second == Action::Beep), 1) << "block " << block;
  }
  EXPECT_EQ(a.status(), Status::Mis);
}

TEST(Alg1, MisNodeRestartsOnHeardBeep) {
  Alg1Automaton a(8, 2);
  oracle::FakeRng rng;
  for (int r = 0; r < 36; ++r) play(a, rng, silence());
  rng.units = {0.9};  // listen in the first block round
  Action act = a.decide(0, rng);
  ASSERT_EQ(act, Action::Listen);
  a.absorb(beep_heard(), 0, rng);
  EXPECT_EQ(a.status(), Status::Inactive);
}

TEST(Alg1, IsolatedGoldenTimeline) {
  // single node woken at round 5: sleeping 0..4, inactive 5..22,
  // competing 23..40, MIS from 41 on
  for (uint64_t seed : {1u, 2u, 3u}) {
    auto g = Graph::from_edges(1, {});
    WakeupSchedule sched;
    sched.wake_round = {5};
    auto st = init<Alg1Automaton>(
        g, [](NodeId) { return Alg1Automaton(8, 2); }, sched, EngineConfig{}, seed);
    std::vector<Status> got;
    for (int t = 0; t < 60; ++t) got.push_back(step(st).statuses[0]);
    for (int t = 0; t < 60; ++t) {
      Status want = t < 5    ? Status::Sleeping
                    : t < 23 ? Status::Inactive
                    : t < 41 ? Status::Competing
                             : Status::Mis;
      EXPECT_EQ(got[t], want) << "seed " << seed << " t " << t;
    }
  }
}

TEST(Alg1, CliquePairConverges) {
  for (uint64_t seed = 0; seed < 8; ++seed) {
    auto g = make_clique(2);
    auto st = init<Alg1Automaton>(
        g, [](NodeId) { return Alg1Automaton(2, 2); }, WakeupSchedule::all_at(2, 0),
        EngineConfig{}, seed);
    auto out = run(st, 4000);
    EXPECT_TRUE(out.result.converged) << "seed " << seed;
    EXPECT_EQ(out.result.mis_size, 1u) << "seed " << seed;
    EXPECT_EQ(out.result.persistent_violations, 0u);
  }
}

TEST(Alg1, ProbeRowMatchesPhaseProbability) {
  auto g = make_clique(8);
  auto st = init<Alg1Automaton>(
      g, [](NodeId) { return Alg1Automaton(8, 2); }, WakeupSchedule::all_at(8, 0),
      EngineConfig{}, 21);
  RunOptions opt;
  opt.record_potential = true;
  auto out = run(st, 19, opt);
  // all nodes finish the 18-round countdown together; the first competing
  // round carries probability 2/64 per node
  ASSERT_TRUE(out.probe.has_round(18));
  for (NodeId v = 0; v < 8; ++v) EXPECT_DOUBLE_EQ(out.probe.row_at(18)[v], 2.0 / 64.0);
  EXPECT_DOUBLE_EQ(beep_potential(out.probe, std::vector<NodeId>{0, 1, 2, 3}, 18), 8.0 / 64.0);
}

}  // namespace
