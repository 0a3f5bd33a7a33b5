// Command-line front end: single runs, batch fuzzing, trace re-checking and
// the pinned demonstration runs. Exit codes: 0 all checks pass, 1 a property
// was violated, 2 usage or configuration error.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "girafsim/scenario.hpp"

namespace {

using namespace girafsim;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << content;
}

struct RunFlags {
  std::string scenario_path;
  std::string algo, env, mode, values, crashes, policy, backend, wrap;
  std::int64_t n = -1, kstab = -1, source = -1, horizon = -1, dmax = -1, crash_budget = -1,
               round_target = -1;
  std::int64_t seed = -1;
  std::string out, sched_out;
};

Scenario scenario_from_flags(const RunFlags& f) {
  Scenario sc;
  if (!f.scenario_path.empty()) sc = parse_scenario(read_file(f.scenario_path));
  if (!f.algo.empty()) sc.algo = parse_algo_kind(f.algo);
  if (!f.env.empty()) sc.env = parse_env_kind(f.env);
  if (!f.mode.empty()) sc.mode = parse_mode(f.mode);
  if (f.n >= 0) sc.n = static_cast<std::uint32_t>(f.n);
  if (!f.values.empty()) {
    sc.values.clear();
    std::istringstream vs(f.values);
    std::string tok;
    while (std::getline(vs, tok, ',')) sc.values.push_back(std::stoull(tok));
  }
  if (f.kstab >= 0) sc.kstab = static_cast<Round>(f.kstab);
  if (f.source >= 0) sc.stable_source = static_cast<Label>(f.source);
  if (f.horizon >= 0) sc.horizon = static_cast<Round>(f.horizon);
  if (f.seed >= 0) sc.seed = static_cast<std::uint64_t>(f.seed);
  if (f.dmax >= 0) sc.dmax = static_cast<std::uint32_t>(f.dmax);
  if (f.crash_budget >= 0) sc.crash_budget = static_cast<std::uint32_t>(f.crash_budget);
  if (!f.crashes.empty()) {
    sc.crashes.assign(sc.n, std::nullopt);
    if (f.crashes != "-") {
      std::istringstream cs(f.crashes);
      std::string tok;
      while (std::getline(cs, tok, ',')) {
        auto at = tok.find('@');
        if (at == std::string::npos) throw ConfigError("crash entries look like proc@round");
        Label p = static_cast<Label>(std::stoul(tok.substr(0, at)));
        if (p >= sc.n) throw ConfigError("crash label out of range");
        sc.crashes[p] = static_cast<Round>(std::stoul(tok.substr(at + 1)));
      }
    }
  }
  if (!f.policy.empty()) {
    sc.policy = f.policy == "random" ? SourcePolicy::Random : SourcePolicy::Rotate;
  }
  if (!f.backend.empty()) sc.backend = f.backend == "network" ? BackendKind::Network : BackendKind::Oracle;
  if (!f.wrap.empty()) sc.wrap = f.wrap == "relay" ? WrapKind::Relay : WrapKind::Consensus;
  if (f.round_target >= 0) sc.round_target = static_cast<Round>(f.round_target);
  if (!f.out.empty()) sc.out = f.out;
  if (sc.values.empty()) sc.values.assign(sc.n, 0);
  return sc;
}

int cmd_run(const RunFlags& f) {
  Scenario sc = scenario_from_flags(f);
  if ((sc.algo == AlgoKind::ES && sc.env != EnvKind::ES) ||
      (sc.algo == AlgoKind::ESS && sc.env != EnvKind::ESS)) {
    std::cout << "note: termination is not claimed under " << env_kind_name(sc.env)
              << "; safety checks only\n";
  }
  if (!f.sched_out.empty() && (sc.algo == AlgoKind::ES || sc.algo == AlgoKind::ESS)) {
    GenOptions g;
    g.kstab = sc.kstab;
    g.stable_source = sc.stable_source;
    g.policy = sc.policy;
    g.dmax = sc.dmax;
    if (!sc.crashes.empty()) g.crashes = sc.crashes;
    write_file(f.sched_out,
               serialize_schedule(generate_schedule(sc.env, sc.n, sc.horizon, sc.crash_budget, sc.seed, g)));
  }

  RunResult run = run_scenario(sc);
  if (!sc.out.empty()) write_file(sc.out, serialize_trace(run.trace));
  std::cout << "run algo=" << algo_kind_name(sc.algo) << " env=" << env_kind_name(sc.env)
            << " mode=" << mode_name(sc.mode) << " n=" << sc.n << " seed=" << sc.seed << "\n";
  std::cout << run.report.to_text();
  return run.report.all_ok() ? 0 : 1;
}

int cmd_fuzz(const FuzzSpec& spec, std::uint64_t seed, unsigned jobs) {
  FuzzSummary sum = fuzz(spec, seed, jobs);
  std::cout << "fuzz algo=" << algo_kind_name(spec.algo) << " env=" << env_kind_name(spec.env)
            << " seed=" << seed << "\n"
            << sum.to_text();
  return sum.ok() ? 0 : 1;
}

int cmd_check(const std::string& path, const std::string& props_csv) {
  Trace t = parse_trace(read_file(path));
  t.decode_snapshots(std::make_shared<HistoryArena>());
  std::vector<std::string> props;
  if (!props_csv.empty() && props_csv != "all") {
    std::istringstream ps(props_csv);
    std::string tok;
    while (std::getline(ps, tok, ',')) props.push_back(tok);
  }
  CheckReport report = check_trace(t, props);
  std::cout << report.to_text();
  return report.all_ok() ? 0 : 1;
}

int cmd_demo() {
  int rc = 0;
  for (const Scenario& sc : {demo_es_single(), demo_es_pair(), demo_ess_single()}) {
    RunResult run = run_scenario(sc);
    std::cout << "--- demo algo=" << algo_kind_name(sc.algo) << " n=" << sc.n << " ---\n";
    std::cout << serialize_trace(run.trace);
    std::cout << run.report.to_text() << "\n";
    if (!run.report.all_ok()) rc = 1;
  }
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"girafsim: deterministic round-based simulator for anonymous fault-tolerant consensus"};
  app.require_subcommand(1);

  RunFlags rf;
  CLI::App* run = app.add_subcommand("run", "execute one seeded scenario and check it");
  run->add_option("--scenario", rf.scenario_path, "scenario file");
  run->add_option("--algo", rf.algo, "ES | ESS | WEAKSET | EMULATION");
  run->add_option("--env", rf.env, "MS | ES | ESS");
  run->add_option("--mode", rf.mode, "lockstep | skewed");
  run->add_option("--n", rf.n, "process count");
  run->add_option("--values", rf.values, "comma-separated initial values");
  run->add_option("--kstab", rf.kstab, "stabilization round");
  run->add_option("--source", rf.source, "stable source label (ESS)");
  run->add_option("--horizon", rf.horizon, "max round");
  run->add_option("--seed", rf.seed, "run seed");
  run->add_option("--dmax", rf.dmax, "max late delay in rounds");
  run->add_option("--crash-budget", rf.crash_budget, "seeded crash count cap");
  run->add_option("--crashes", rf.crashes, "explicit crashes, proc@round[,...]");
  run->add_option("--policy", rf.policy, "rotate | random source choice");
  run->add_option("--backend", rf.backend, "oracle | network (emulation)");
  run->add_option("--wrap", rf.wrap, "relay | consensus (emulation)");
  run->add_option("--round-target", rf.round_target, "emulated rounds per process");
  run->add_option("--out", rf.out, "write the trace here");
  run->add_option("--sched-out", rf.sched_out, "write the generated schedule here");

  FuzzSpec spec;
  std::string fz_algo = "ES", fz_env = "MS";
  std::int64_t fz_seed = -1;
  std::uint64_t fz_runs = 100;
  unsigned fz_jobs = 0;
  bool fz_lockstep_only = false;
  std::int64_t fz_nmin = 1, fz_nmax = 6, fz_kstab_max = 20;
  CLI::App* fz = app.add_subcommand("fuzz", "batch seeded runs, aggregate violations");
  fz->add_option("--algo", fz_algo, "ES | ESS | WEAKSET | EMULATION");
  fz->add_option("--env", fz_env, "MS | ES | ESS");
  fz->add_option("--runs", fz_runs, "number of runs");
  fz->add_option("--seed", fz_seed, "base seed")->required();
  fz->add_option("--nmin", fz_nmin, "min processes");
  fz->add_option("--nmax", fz_nmax, "max processes");
  fz->add_option("--kstab-max", fz_kstab_max, "max stabilization round");
  fz->add_option("--jobs", fz_jobs, "worker threads (0 = all cores)");
  fz->add_flag("--lockstep-only", fz_lockstep_only, "skip skewed interleavings");

  std::string ck_trace, ck_props = "all";
  CLI::App* ck = app.add_subcommand("check", "replay a stored trace through the property checkers");
  ck->add_option("--trace", ck_trace, "trace file")->required();
  ck->add_option("--props", ck_props, "comma-separated property list, or 'all'");

  app.add_subcommand("demo", "print the pinned hand-derived runs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return cmd_run(rf);
    if (fz->parsed()) {
      spec.algo = parse_algo_kind(fz_algo);
      spec.env = parse_env_kind(fz_env);
      spec.runs = fz_runs;
      spec.n_min = static_cast<std::uint32_t>(fz_nmin);
      spec.n_max = static_cast<std::uint32_t>(fz_nmax);
      spec.kstab_max = static_cast<Round>(fz_kstab_max);
      spec.lockstep_only = fz_lockstep_only;
      return cmd_fuzz(spec, static_cast<std::uint64_t>(fz_seed), fz_jobs);
    }
    if (ck->parsed()) return cmd_check(ck_trace, ck_props);
    return cmd_demo();
  } catch (const girafsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const girafsim::SimAbort& e) {
    std::cerr << "aborted: " << e.what() << "\ntrace prefix:\n" << serialize_trace(e.trace_prefix);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
