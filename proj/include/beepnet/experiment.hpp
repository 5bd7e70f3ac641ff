#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "beepnet/engine.hpp"
#include "beepnet/graph.hpp"
#include "beepnet/protocols/alg1.hpp"
#include "beepnet/protocols/alg2.hpp"
#include "beepnet/protocols/alg3.hpp"
#include "beepnet/protocols/alg4.hpp"
#include "beepnet/runner.hpp"
#include "beepnet/topology.hpp"

namespace beepnet {

enum class Algorithm : uint8_t { Alg1, Alg2, Alg3, Alg4 };

inline std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::Alg1: return "alg1";
    case Algorithm::Alg2: return "alg2";
    case Algorithm::Alg3: return "alg3";
    default: return "alg4";
  }
}

inline Algorithm algorithm_from_name(const std::string& name) {
  if (name == "alg1") return Algorithm::Alg1;
  if (name == "alg2") return Algorithm::Alg2;
  if (name == "alg3") return Algorithm::Alg3;
  if (name == "alg4") return Algorithm::Alg4;
  throw ConfigError("unknown algorithm '" + name + "'");
}

// Graph selector strings:
//   clique | path | pairs
//   gnp:<p>[:<seed>]   p is a float or "<float>/n"; seed defaults to the
//                      run seed, so each run samples its own graph
//   file:<path>        edge-list file; overrides --n
struct GraphSpec {
  enum class Kind : uint8_t { Clique, Path, Pairs, Gnp, File };

  Kind kind = Kind::Clique;
  double gnp_p = 0.0;
  double gnp_numerator = 0.0;
  bool gnp_over_n = false;
  std::optional<uint64_t> gnp_seed;
  std::string path;
  std::string text = "clique";

  static GraphSpec parse(const std::string& s) {
    GraphSpec spec;
    spec.text = s;
    if (s == "clique") {
      spec.kind = Kind::Clique;
    } else if (s == "path") {
      spec.kind = Kind::Path;
    } else if (s == "pairs") {
      spec.kind = Kind::Pairs;
    } else if (s.rfind("gnp:", 0) == 0) {
      spec.kind = Kind::Gnp;
      std::string rest = s.substr(4);
      const size_t colon = rest.find(':');
      std::string p_text = rest.substr(0, colon);
      if (colon != std::string::npos) {
        try {
          spec.gnp_seed = std::stoull(rest.substr(colon + 1));
        } catch (const std::exception&) {
          throw ConfigError("bad gnp seed in '" + s + "'");
        }
      }
      if (p_text.size() > 2 && p_text.substr(p_text.size() - 2) == "/n") {
        spec.gnp_over_n = true;
        p_text = p_text.substr(0, p_text.size() - 2);
      }
      try {
        const double value = std::stod(p_text);
        if (spec.gnp_over_n)
          spec.gnp_numerator = value;
        else
          spec.gnp_p = value;
      } catch (const std::exception&) {
        throw ConfigError("bad gnp probability in '" + s + "'");
      }
      if (!spec.gnp_over_n && (spec.gnp_p < 0.0 || spec.gnp_p > 1.0))
        throw ConfigError("gnp probability must be in [0, 1]");
      if (spec.gnp_over_n && spec.gnp_numerator < 0.0)
        throw ConfigError("gnp numerator must be non-negative");
    } else if (s.rfind("file:", 0) == 0) {
      spec.kind = Kind::File;
      spec.path = s.substr(5);
      if (spec.path.empty()) throw ConfigError("empty graph file path");
    } else {
      throw ConfigError("unknown graph spec '" + s + "'");
    }
    return spec;
  }

  Graph build(uint32_t n, uint64_t run_seed) const {
    if (kind == Kind::File) {
      std::ifstream in(path);
      if (!in) throw ConfigError("cannot open graph file '" + path + "'");
      Graph g = Graph::parse_edge_list(in);
      if (n != 0 && g.node_count() != n)
        throw ConfigError("graph file has " +
                          std::to_string(g.node_count()) +
                          " nodes but --n says " + std::to_string(n));
      return g;
    }
    if (n == 0) throw ConfigError("--n is required for generated graphs");
    switch (kind) {
      case Kind::Clique: return make_clique(n);
      case Kind::Path: return make_path(n);
      case Kind::Pairs: return make_disjoint_pairs(n);
      default: {
        const double p =
            gnp_over_n ? std::min(1.0, gnp_numerator / n) : gnp_p;
        return make_gnp(n, p, gnp_seed.value_or(run_seed));
      }
    }
  }
};

// Wakeup selector strings:
//   all0                  every node wakes at round 0
//   staggered[:<stride>]  node v wakes at round v*stride (default 1)
//   file:<path>           one entry per node per line: a round or "never"
struct WakeSpec {
  enum class Kind : uint8_t { All0, Staggered, File };

  Kind kind = Kind::All0;
  uint64_t stride = 1;
  std::string path;
  std::string text = "all0";

  static WakeSpec parse(const std::string& s) {
    WakeSpec spec;
    spec.text = s;
    if (s == "all0") {
      spec.kind = Kind::All0;
    } else if (s == "staggered") {
      spec.kind = Kind::Staggered;
    } else if (s.rfind("staggered:", 0) == 0) {
      spec.kind = Kind::Staggered;
      try {
        spec.stride = std::stoull(s.substr(10));
      } catch (const std::exception&) {
        throw ConfigError("bad staggered stride in '" + s + "'");
      }
      if (spec.stride == 0)
        throw ConfigError("staggered stride must be at least 1");
    } else if (s.rfind("file:", 0) == 0) {
      spec.kind = Kind::File;
      spec.path = s.substr(5);
      if (spec.path.empty()) throw ConfigError("empty wake file path");
    } else {
      throw ConfigError("unknown wake spec '" + s + "'");
    }
    return spec;
  }

  WakeupSchedule build(uint32_t n) const {
    switch (kind) {
      case Kind::All0: return WakeupSchedule::all_at(n, 0);
      case Kind::Staggered: return WakeupSchedule::staggered(n, stride);
      default: break;
    }
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open wake file '" + path + "'");
    WakeupSchedule sched;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      std::string token;
      while (ls >> token) {
        if (token == "never") {
          sched.wake_round.push_back(WakeupSchedule::kNever);
          continue;
        }
        try {
          sched.wake_round.push_back(std::stoull(token));
        } catch (const std::exception&) {
          throw ConfigError("bad wake round '" + token + "'");
        }
      }
    }
    if (sched.wake_round.size() != n)
      throw ConfigError("wake file lists " +
                        std::to_string(sched.wake_round.size()) +
                        " rounds for " + std::to_string(n) + " nodes");
    return sched;
  }
};

inline FeedbackMode feedback_from_name(const std::string& name) {
  if (name == "plain") return FeedbackMode::Plain;
  if (name == "sender_cd") return FeedbackMode::SenderCd;
  throw ConfigError("unknown feedback mode '" + name + "'");
}

// Seed list syntax: comma-separated entries, each a single value or an
// inclusive range "lo..hi".  "0..4,100" is {0,1,2,3,4,100}.
inline std::vector<uint64_t> parse_seed_list(const std::string& s) {
  std::vector<uint64_t> seeds;
  size_t pos = 0;
  while (pos <= s.size()) {
    size_t comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    const std::string token = s.substr(pos, comma - pos);
    pos = comma + 1;
    auto parse_u64 = [&](const std::string& text) {
      size_t consumed = 0;
      unsigned long long v = 0;
      try {
        v = std::stoull(text, &consumed);
      } catch (const std::exception&) {
        throw ConfigError("bad seed '" + token + "'");
      }
      if (consumed != text.size()) throw ConfigError("bad seed '" + token + "'");
      return static_cast<uint64_t>(v);
    };
    const size_t dots = token.find("..");
    if (dots == std::string::npos) {
      seeds.push_back(parse_u64(token));
      continue;
    }
    const uint64_t lo = parse_u64(token.substr(0, dots));
    const uint64_t hi = parse_u64(token.substr(dots + 2));
    if (hi < lo) throw ConfigError("seed range '" + token + "' is reversed");
    if (hi - lo >= 1000000) throw ConfigError("seed range '" + token + "' is implausibly large");
    for (uint64_t v = lo; v <= hi; ++v) seeds.push_back(v);
  }
  if (seeds.empty()) throw ConfigError("empty seed list");
  return seeds;
}

inline uint64_t default_horizon(uint32_t n) {
  const uint64_t l = std::max<uint64_t>(1, ceil_log2(std::max<uint32_t>(1, n)));
  return 200 * l * l * l;
}

struct ExperimentConfig {
  Algorithm algorithm = Algorithm::Alg1;
  GraphSpec graph;
  WakeSpec wake;
  uint32_t n = 0;
  uint64_t upper_bound = 0;  // alg1's N; 0 means "use n"
  uint32_t c = 0;            // 0 means the per-algorithm default
  std::optional<FeedbackMode> feedback;
  std::optional<bool> wake_on_beep;
  std::optional<uint64_t> horizon;
  uint64_t stable_stop = 0;  // 0 disables early stopping
};

struct ResolvedRunParams {
  FeedbackMode feedback = FeedbackMode::Plain;
  WakeMode wake_mode = WakeMode::AdversarialOnly;
  uint64_t upper_bound = 0;
  uint32_t c = 0;
  uint64_t horizon = 0;
};

// Applies per-algorithm defaults and rejects inconsistent combinations.
inline ResolvedRunParams resolve_params(const ExperimentConfig& cfg,
                                        uint32_t n) {
  ResolvedRunParams rp;
  const Algorithm alg = cfg.algorithm;

  const FeedbackMode fb_default = alg == Algorithm::Alg2
                                      ? FeedbackMode::SenderCd
                                      : FeedbackMode::Plain;
  rp.feedback = cfg.feedback.value_or(fb_default);
  if (alg == Algorithm::Alg2 && rp.feedback != FeedbackMode::SenderCd)
    throw ConfigError("alg2 requires sender_cd feedback");
  if (alg != Algorithm::Alg2 && rp.feedback == FeedbackMode::SenderCd)
    throw ConfigError("sender_cd feedback is only valid with alg2");

  const bool wob_default =
      alg == Algorithm::Alg2 || alg == Algorithm::Alg3;
  const bool wob = cfg.wake_on_beep.value_or(wob_default);
  if ((alg == Algorithm::Alg2 || alg == Algorithm::Alg3) && !wob)
    throw ConfigError(algorithm_name(alg) + " requires wake-on-beep");
  if (alg == Algorithm::Alg4 && wob)
    throw ConfigError("alg4 does not support wake-on-beep");
  rp.wake_mode = wob ? WakeMode::WakeOnBeep : WakeMode::AdversarialOnly;

  if (alg == Algorithm::Alg4 && cfg.wake.kind == WakeSpec::Kind::Staggered)
    throw ConfigError("alg4 requires wake spec all0 or file");

  if (cfg.upper_bound != 0 && alg != Algorithm::Alg1)
    throw ConfigError("--N applies only to alg1");
  if (alg == Algorithm::Alg1) {
    rp.upper_bound = cfg.upper_bound != 0 ? cfg.upper_bound : n;
    if (rp.upper_bound < n)
      throw ConfigError("alg1 requires N >= n");
  }

  if (cfg.c != 0 && alg != Algorithm::Alg1 && alg != Algorithm::Alg3)
    throw ConfigError("--c applies only to alg1 and alg3");
  rp.c = cfg.c != 0 ? cfg.c : (alg == Algorithm::Alg3 ? 3 : 2);

  rp.horizon = cfg.horizon.value_or(default_horizon(n));
  if (rp.horizon == 0) throw ConfigError("horizon must be positive");
  return rp;
}

struct SingleRun {
  Graph graph;
  FeedbackMode feedback = FeedbackMode::Plain;
  RunOutput output;
};

inline SingleRun execute_single(const ExperimentConfig& cfg, uint64_t seed,
                                bool keep_traces = false,
                                bool record_potential = false) {
  SingleRun sr;
  sr.graph = cfg.graph.build(cfg.n, seed);
  const uint32_t n = sr.graph.node_count();
  const ResolvedRunParams rp = resolve_params(cfg, n);
  sr.feedback = rp.feedback;
  WakeupSchedule sched = cfg.wake.build(n);
  EngineConfig ec;
  ec.feedback = rp.feedback;
  ec.wake_mode = rp.wake_mode;

  RunOptions opt;
  opt.keep_traces = keep_traces;
  opt.record_potential = record_potential;
  opt.stop_when_stable_for = cfg.stable_stop;

  switch (cfg.algorithm) {
    case Algorithm::Alg1: {
      auto st = init<Alg1Automaton>(
          sr.graph,
          [&](NodeId) {
            return Alg1Automaton(rp.upper_bound, rp.c);
          },
          sched, ec, seed);
      sr.output = run(st, rp.horizon, opt);
      break;
    }
    case Algorithm::Alg2: {
      auto st = init<Alg2Automaton>(
          sr.graph, [](NodeId) { return Alg2Automaton(); }, sched, ec, seed);
      sr.output = run(st, rp.horizon, opt);
      break;
    }
    case Algorithm::Alg3: {
      auto st = init<Alg3Automaton>(
          sr.graph, [&](NodeId) { return Alg3Automaton(rp.c); }, sched, ec,
          seed);
      sr.output = run(st, rp.horizon, opt);
      break;
    }
    default: {
      auto st = init<Alg4Automaton>(
          sr.graph, [](NodeId) { return Alg4Automaton(); }, sched, ec, seed);
      sr.output = run(st, rp.horizon, opt);
      break;
    }
  }
  sr.output.result.seed = seed;
  sr.output.result.algorithm = algorithm_name(cfg.algorithm);
  sr.output.result.graph = cfg.graph.text;
  return sr;
}

inline unsigned env_thread_cap() {
  if (const char* env = std::getenv("BEEPNET_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end && *end == '\0' && v > 0)
      return static_cast<unsigned>(std::min<unsigned long>(v, 1024));
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

inline std::optional<double> median_convergence(
    std::span<const RunResult> rows) {
  std::vector<uint64_t> vals;
  for (const RunResult& r : rows)
    if (r.convergence_round) vals.push_back(*r.convergence_round);
  if (vals.empty()) return std::nullopt;
  std::sort(vals.begin(), vals.end());
  const size_t mid = vals.size() / 2;
  if (vals.size() % 2 == 1) return static_cast<double>(vals[mid]);
  return (static_cast<double>(vals[mid - 1]) +
          static_cast<double>(vals[mid])) /
         2.0;
}

struct SweepPlan {
  ExperimentConfig base;
  std::vector<uint32_t> ns;      // empty means just base.n
  std::vector<uint64_t> seeds;
};

struct SweepOutcome {
  std::vector<RunResult> rows;  // ordered by (n position, seed position)
  std::vector<std::pair<uint32_t, std::optional<double>>> medians;
};

// Runs the full (n, seed) grid.  Workers pull tasks from a shared counter
// but write into a preallocated slot per task, so the output order is
// independent of scheduling.
inline SweepOutcome run_sweep(const SweepPlan& plan, unsigned threads) {
  std::vector<uint32_t> ns = plan.ns;
  if (ns.empty()) ns.push_back(plan.base.n);
  if (plan.seeds.empty()) throw ConfigError("no seeds given");
  const size_t total = ns.size() * plan.seeds.size();

  SweepOutcome out;
  out.rows.resize(total);
  std::atomic<size_t> cursor{0};
  std::exception_ptr first_error;
  std::mutex error_mu;

  auto worker = [&] {
    for (;;) {
      const size_t idx = cursor.fetch_add(1);
      if (idx >= total) return;
      const uint32_t n = ns[idx / plan.seeds.size()];
      const uint64_t seed = plan.seeds[idx % plan.seeds.size()];
      try {
        ExperimentConfig cfg = plan.base;
        cfg.n = n;
        out.rows[idx] = execute_single(cfg, seed).output.result;
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        cursor.store(total);
        return;
      }
    }
  };

  const unsigned nthreads =
      std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(total)));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (unsigned i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  for (size_t i = 0; i < ns.size(); ++i) {
    std::span<const RunResult> group(out.rows.data() + i * plan.seeds.size(),
                                     plan.seeds.size());
    out.medians.emplace_back(ns[i], median_convergence(group));
  }
  return out;
}

inline void write_sweep_csv(std::ostream& os, const SweepOutcome& out) {
  os << run_result_csv_header() << '\n';
  for (const RunResult& r : out.rows) os << to_csv_row(r) << '\n';
  for (const auto& [n, med] : out.medians) {
    os << "# median n=" << n << " convergence_round=";
    if (med)
      os << *med;
    else
      os << "none";
    os << '\n';
  }
}

}  // namespace beepnet
