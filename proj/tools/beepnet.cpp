#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "beepnet/experiment.hpp"
#include "beepnet/scenario_replay.hpp"
#include "beepnet/trace_io.hpp"
#include "beepnet/verify.hpp"

namespace {

using namespace beepnet;

// Writes to the given path, or to stdout when the path is empty.
class OutputTarget {
 public:
  explicit OutputTarget(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw ConfigError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

struct RunArgs {
  std::string algorithm;
  std::string graph = "clique";
  std::string wake = "all0";
  std::string feedback;
  uint32_t n = 0;
  uint64_t upper_bound = 0;
  uint32_t c = 0;
  uint64_t seed = 0;
  uint64_t horizon = 0;
  uint64_t stable_stop = 0;
  bool wake_on_beep = false;
  std::string csv_path;
  std::string trace_path;
};

void add_common_options(CLI::App* cmd, RunArgs& a, bool required_algorithm) {
  auto* alg = cmd->add_option("--algorithm", a.algorithm,
                              "protocol: alg1|alg2|alg3|alg4");
  if (required_algorithm) alg->required();
  cmd->add_option("--graph", a.graph,
                  "clique|path|pairs|gnp:<p>[:<seed>]|file:<path>");
  cmd->add_option("--wake", a.wake, "all0|staggered[:<stride>]|file:<path>");
  cmd->add_option("--feedback", a.feedback, "plain|sender_cd");
  cmd->add_option("--N", a.upper_bound, "size bound known to alg1");
  cmd->add_option("--c", a.c, "constant for alg1 (default 2) / alg3 (default 3)");
  cmd->add_option("--horizon", a.horizon, "round budget (default 200*ceil(log2 n)^3)");
  cmd->add_option("--stable-stop", a.stable_stop,
                  "stop after this many stable unchanged rounds (0 = never)");
  cmd->add_flag("--wake-on-beep", a.wake_on_beep,
                "beeps wake sleeping neighbors (implied by alg2/alg3)");
  cmd->add_option("--csv", a.csv_path, "CSV output path (default stdout)");
}

ExperimentConfig config_from_args(const RunArgs& a) {
  ExperimentConfig cfg;
  cfg.algorithm = algorithm_from_name(a.algorithm);
  cfg.graph = GraphSpec::parse(a.graph);
  cfg.wake = WakeSpec::parse(a.wake);
  cfg.n = a.n;
  cfg.upper_bound = a.upper_bound;
  cfg.c = a.c;
  if (!a.feedback.empty()) cfg.feedback = feedback_from_name(a.feedback);
  if (a.wake_on_beep) cfg.wake_on_beep = true;
  if (a.horizon != 0) cfg.horizon = a.horizon;
  cfg.stable_stop = a.stable_stop;
  return cfg;
}

int cmd_run(const RunArgs& a) {
  ExperimentConfig cfg = config_from_args(a);
  const bool keep_traces = !a.trace_path.empty();
  SingleRun sr = execute_single(cfg, a.seed, keep_traces);
  {
    OutputTarget csv(a.csv_path);
    csv.stream() << run_result_csv_header() << '\n'
                 << to_csv_row(sr.output.result) << '\n';
  }
  if (keep_traces) {
    std::ofstream tf(a.trace_path, std::ios::binary | std::ios::trunc);
    if (!tf) throw ConfigError("cannot open trace file '" + a.trace_path + "'");
    write_trace(tf, sr.graph, sr.feedback, sr.output.traces);
  }
  const RunResult& r = sr.output.result;
  return (r.converged && r.persistent_violations == 0) ? 0 : 1;
}

int cmd_experiment(const RunArgs& a, const std::vector<uint32_t>& ns,
                   const std::string& seeds) {
  SweepPlan plan;
  plan.base = config_from_args(a);
  plan.ns = ns;
  plan.seeds = parse_seed_list(seeds);
  SweepOutcome out = run_sweep(plan, env_thread_cap());
  {
    OutputTarget csv(a.csv_path);
    write_sweep_csv(csv.stream(), out);
  }
  for (const RunResult& r : out.rows)
    if (!r.converged || r.persistent_violations != 0) return 1;
  return 0;
}

void write_scenario_file(const LBScenario& sc, const std::string& path) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open scenario file '" + path + "'");
  out << to_scenario_text(sc);
}

int cmd_verify_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open trace file '" + path + "'");
  const TraceFile tf = parse_trace(in);
  const TraceCheckReport rep = recheck_trace(tf);
  std::cout << "rounds=" << rep.rounds
            << " feedback_violations=" << rep.feedback_violations
            << " mis_valid=" << (rep.mis_valid ? 1 : 0)
            << " stable=" << (rep.stable ? 1 : 0)
            << " mis_size=" << rep.mis_size << '\n';
  return (rep.feedback_violations == 0 && rep.mis_valid) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic round-based simulator of beeping-network MIS protocols"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from an INI-style file");

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "execute one seeded run");
  add_common_options(run_cmd, run_args, true);
  run_cmd->add_option("--n", run_args.n, "node count for generated graphs");
  run_cmd->add_option("--seed", run_args.seed, "run seed");
  run_cmd->add_option("--trace", run_args.trace_path, "write the round trace here");

  RunArgs exp_args;
  std::vector<uint32_t> exp_ns;
  std::string exp_seeds = "0..9";
  auto* exp_cmd = app.add_subcommand("experiment", "sweep n values and seeds");
  add_common_options(exp_cmd, exp_args, true);
  exp_cmd->add_option("--n", exp_ns, "node counts to sweep");
  exp_cmd->add_option("--seeds", exp_seeds, "seed list, e.g. 0..49 or 1,2,9");

  auto* scen_cmd = app.add_subcommand("scenario", "adversarial lower-bound tools");
  scen_cmd->require_subcommand(1);

  uint32_t pairs_n = 256;
  uint32_t pairs_trials = 100000;
  uint64_t pairs_seed = 1;
  auto* pairs_cmd =
      scen_cmd->add_subcommand("pairs", "mean symmetry-break round of n/2 pairs");
  pairs_cmd->add_option("--n", pairs_n, "node count (even)");
  pairs_cmd->add_option("--trials", pairs_trials, "Monte Carlo trials");
  pairs_cmd->add_option("--seed", pairs_seed, "oracle seed");

  struct Case1Args {
    uint32_t k = 6;
    uint32_t clique_scale = 4;
    double p = 0.9;
    uint64_t ell = 2;
    std::string seeds = "1..500";
    uint64_t prefix = 0;
    double min_fraction = 0.95;
    std::string out_path;
  } c1;
  auto* case1_cmd = scen_cmd->add_subcommand(
      "case1", "silent-after-collision family: prefix equality stats");
  case1_cmd->add_option("--k", c1.k, "clique-count parameter (>= 2)");
  case1_cmd->add_option("--clique-scale", c1.clique_scale, "nodes per sub-clique");
  case1_cmd->add_option("--p", c1.p, "silence-regime beep probability");
  case1_cmd->add_option("--ell", c1.ell, "first possible beep round");
  case1_cmd->add_option("--seeds", c1.seeds, "seed list");
  case1_cmd->add_option("--prefix", c1.prefix, "compared prefix length (default k-1)");
  case1_cmd->add_option("--min-fraction", c1.min_fraction,
                        "required fraction of seeds with equal prefixes");
  case1_cmd->add_option("--scenario-out", c1.out_path, "write the scenario file here");

  struct Case2Args {
    uint32_t k = 8;
    uint32_t clique_scale = 4;
    double p = 0.9;
    double p_prime = 0.9;
    uint64_t ell = 2;
    uint32_t m = 2;
    std::string seeds = "1..100";
    uint64_t prefix = 0;
    double min_fraction = 0.0;
    std::string out_path;
  } c2;
  auto* case2_cmd = scen_cmd->add_subcommand(
      "case2", "beep-after-collisions family: collision-cover stats");
  case2_cmd->add_option("--k", c2.k, "clique-count parameter (>= 8)");
  case2_cmd->add_option("--clique-scale", c2.clique_scale, "nodes per clique");
  case2_cmd->add_option("--p", c2.p, "silence-regime beep probability");
  case2_cmd->add_option("--p-prime", c2.p_prime, "collision-regime beep probability");
  case2_cmd->add_option("--ell", c2.ell, "first possible silence-regime beep round");
  case2_cmd->add_option("--m", c2.m, "collision-regime start round (>= 2)");
  case2_cmd->add_option("--seeds", c2.seeds, "seed list");
  case2_cmd->add_option("--prefix", c2.prefix, "checked prefix length (default q)");
  case2_cmd->add_option("--min-fraction", c2.min_fraction,
                        "required fraction of seeds with full collision cover");
  case2_cmd->add_option("--scenario-out", c2.out_path, "write the scenario file here");

  std::string verify_path;
  auto* verify_cmd =
      app.add_subcommand("verify-trace", "re-check a stored trace file");
  verify_cmd->add_option("path", verify_path, "trace file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(run_args);
    if (exp_cmd->parsed()) return cmd_experiment(exp_args, exp_ns, exp_seeds);
    if (verify_cmd->parsed()) return cmd_verify_trace(verify_path);
    if (pairs_cmd->parsed()) {
      const double mean = pair_symmetry_oracle(pairs_n, pairs_trials, pairs_seed);
      std::cout << "pairs n=" << pairs_n << " trials=" << pairs_trials
                << " mean_last_break_round=" << mean << '\n';
      return 0;
    }
    if (case1_cmd->parsed()) {
      const LBScenario sc = make_lb_case1(c1.k, c1.clique_scale, c1.p, c1.ell);
      write_scenario_file(sc, c1.out_path);
      const auto seeds = parse_seed_list(c1.seeds);
      const uint64_t prefix = c1.prefix != 0 ? c1.prefix : c1.k - 1;
      const auto stats = replay_scenario_suite(sc, OnBeepRule::SilentForever,
                                               seeds, prefix);
      std::cout << "case1 k=" << c1.k << " clique_scale=" << c1.clique_scale
                << " p=" << c1.p << " ell=" << c1.ell
                << " seeds=" << stats.seeds << " prefix=" << prefix
                << " equal_fraction=" << stats.equal_fraction() << '\n';
      return stats.equal_fraction() >= c1.min_fraction ? 0 : 1;
    }
    if (case2_cmd->parsed()) {
      const LBScenario sc = make_lb_case2(c2.k, c2.clique_scale, c2.p,
                                          c2.p_prime, c2.ell, c2.m);
      write_scenario_file(sc, c2.out_path);
      const auto seeds = parse_seed_list(c2.seeds);
      const uint64_t prefix = c2.prefix != 0 ? c2.prefix : sc.q;
      const uint32_t cover_groups = c2.k > sc.q ? c2.k - sc.q : 0;
      const auto stats = replay_scenario_suite(sc, OnBeepRule::BeepAfter,
                                               seeds, prefix, cover_groups);
      std::cout << "case2 k=" << c2.k << " clique_scale=" << c2.clique_scale
                << " p=" << c2.p << " p_prime=" << c2.p_prime
                << " m=" << c2.m << " ell=" << c2.ell
                << " seeds=" << stats.seeds << " prefix=" << prefix
                << " equal_fraction=" << stats.equal_fraction()
                << " cover_fraction=" << stats.cover_fraction() << '\n';
      return stats.cover_fraction() >= c2.min_fraction ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
