// Acceptance suite: one line per criterion, checked at full scale.
//
//   acceptance [--golden-dir DIR] [--only 1,4,9] [--quick] [--jobs N]
//
// --quick divides the run counts by 20 for a fast smoke pass; the recorded
// results come from the full-scale run. Exit code is the number of failed
// criteria.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "girafsim/checkers.hpp"
#include "girafsim/consensus_es.hpp"
#include "girafsim/scenario.hpp"

using namespace girafsim;

namespace {

unsigned g_jobs = 0;
std::uint64_t g_scale = 1;

std::uint64_t scaled(std::uint64_t runs) { return std::max<std::uint64_t>(runs / g_scale, 5); }

struct Criterion {
  int number;
  std::string summary;
  bool pass;
  std::string detail;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// --- criteria 1 and 2: safety fuzz under the moving-source environment ---

Criterion safety_fuzz(int number, AlgoKind algo) {
  FuzzSpec spec;
  spec.algo = algo;
  spec.env = EnvKind::MS;
  spec.n_min = 1;
  spec.n_max = 6;
  spec.runs = scaled(10000);
  FuzzSummary sum = fuzz(spec, 0xA11CE + number, g_jobs);

  Criterion c{number,
              std::string(algo == AlgoKind::ES ? "ES" : "ESS") +
                  " automaton safety under MS: validity, agreement, containment invariants, "
                  "lockstep and skewed",
              sum.ok(), sum.to_text()};
  return c;
}

// --- criterion 3: ES termination ---

Criterion es_termination() {
  FuzzSpec spec;
  spec.algo = AlgoKind::ES;
  spec.env = EnvKind::ES;
  spec.n_min = 1;
  spec.n_max = 6;
  spec.kstab_max = 30;
  spec.runs = scaled(1000);
  spec.lockstep_only = true;
  FuzzSummary sum = fuzz(spec, 0xE57, g_jobs);

  bool pass = sum.ok() && sum.decided_runs == sum.runs;
  std::string detail = sum.to_text();
  if (sum.decided_runs != sum.runs) {
    detail += "  only " + std::to_string(sum.decided_runs) + "/" + std::to_string(sum.runs) + " runs decided\n";
  }
  return Criterion{3, "every correct process decides by stabilization + 8 in lockstep ES runs", pass, detail};
}

// --- criterion 4: ESS termination + windowed counter/leader checks ---

Criterion ess_termination() {
  FuzzSpec spec;
  spec.algo = AlgoKind::ESS;
  spec.env = EnvKind::ESS;
  spec.n_min = 1;
  spec.n_max = 5;
  spec.kstab_max = 20;
  spec.runs = scaled(1000);
  spec.lockstep_only = true;
  FuzzSummary sum = fuzz(spec, 0xE55, g_jobs);

  bool pass = sum.ok() && sum.decided_runs == sum.runs && sum.window_checked_runs > 0;
  std::string detail = sum.to_text();
  return Criterion{4,
                   "all ESS runs decide within 4*K+100; counter growth and leader narrowing hold on "
                   "stabilized windows",
                   pass, detail};
}

// --- criterion 5: mutation test for the containment invariants ---

/// Deliberately broken variant: written becomes the union of the received
/// sets instead of their intersection, so a value can look source-relayed
/// without being so.
class UnionWrittenAutomaton : public Automaton {
 public:
  explicit UnionWrittenAutomaton(Value initial) : st_(es_initialize(initial)) {}

  PayloadPtr initialize(SnapshotSink* snaps) override {
    emit(snaps, SnapPoint::End);
    return make_payload(st_.proposed);
  }

  ComputeOutcome compute(Round k, const Inbox& inbox, SnapshotSink* snaps) override {
    ValueSet written;
    for (const PayloadPtr& p : inbox.round(k)) {
      written.merge(p->value_set());  // mutation: union, not intersection
      st_.proposed.merge(p->value_set());
    }
    st_.written = written;
    emit(snaps, SnapPoint::Mid);
    EsStepResult step = es_finish(st_, k);
    ComputeOutcome out;
    if (step.decision) {
      out.decision = step.decision;
      return out;
    }
    emit(snaps, SnapPoint::End);
    out.message = make_payload(step.message);
    return out;
  }

  SnapshotPtr snapshot() const override {
    EsSnapshot s;
    s.val = st_.val;
    s.written = st_.written;
    s.written_old = st_.written_old;
    s.proposed = st_.proposed;
    return std::make_shared<const Snapshot>(Snapshot(std::move(s)));
  }

 private:
  void emit(SnapshotSink* snaps, SnapPoint pt) {
    if (snaps) snaps->on_snapshot(pt, snapshot());
  }

  EsState st_;
};

Schedule invariant_trap_schedule() {
  // three processes; label 2 is the source every round; the only other
  // timely link is 1 -> 0 at round 3, so process 0 hears a value the source
  // never relayed while process 2 does not
  Schedule s = generate_schedule(EnvKind::MS, 3, 8, 0, 1);
  for (Round k = 1; k <= s.horizon; ++k) {
    for (Label i = 0; i < 3; ++i) {
      for (Label j = 0; j < 3; ++j) s.set_delay(k, i, j, i == j || i == 2 ? 0 : 2);
    }
  }
  s.set_delay(3, 1, 0, 0);
  return s;
}

Criterion mutation_trap() {
  Schedule sched = invariant_trap_schedule();
  if (validate_schedule(sched)) return Criterion{5, "mutation trap", false, "trap schedule invalid\n"};

  SimOptions so;
  std::vector<Value> values = {3, 7, 9};
  TraceMeta meta;
  meta.algo = AlgoKind::ES;
  meta.env = EnvKind::MS;
  meta.n = 3;
  meta.horizon = sched.horizon;
  meta.values = values;

  Trace mutated = run_simulation(
      sched,
      [&](std::size_t i) -> std::unique_ptr<Automaton> { return std::make_unique<UnionWrittenAutomaton>(values[i]); },
      so, nullptr, meta);
  Trace genuine = run_simulation(
      sched,
      [&](std::size_t i) -> std::unique_ptr<Automaton> { return std::make_unique<EsAutomaton>(values[i]); },
      so, nullptr, meta);

  auto trap = check_written_in_all_proposed(mutated);
  auto clean = check_written_in_all_proposed(genuine);
  auto clean2 = check_written_old_in_all_written(genuine);

  // and across seeded adversarial schedules, both checkers catch the mutant
  std::uint64_t caught_l1 = 0, caught_l2 = 0, runs = scaled(200);
  for (std::uint64_t i = 0; i < runs; ++i) {
    std::uint64_t seed = mix_seed(0x37a, i);
    GenOptions g;
    g.policy = SourcePolicy::Random;
    Schedule rs = generate_schedule(EnvKind::MS, 2 + static_cast<std::uint32_t>(i % 4), 18, 0, seed, g);
    std::vector<Value> vals;
    Rng rng(seed);
    for (std::uint32_t p = 0; p < rs.n; ++p) vals.push_back(rng.below(9));
    TraceMeta m;
    m.algo = AlgoKind::ES;
    m.env = EnvKind::MS;
    m.n = rs.n;
    m.horizon = rs.horizon;
    m.values = vals;
    Trace t = run_simulation(
        rs,
        [&](std::size_t p) -> std::unique_ptr<Automaton> {
          return std::make_unique<UnionWrittenAutomaton>(vals[p]);
        },
        SimOptions{}, nullptr, m);
    if (check_written_in_all_proposed(t)) ++caught_l1;
    if (check_written_old_in_all_written(t)) ++caught_l2;
  }

  bool pass = trap.has_value() && !clean && !clean2 && caught_l1 > 0 && caught_l2 > 0;
  std::string detail;
  detail += trap ? "  mutant tripped at round " + std::to_string(trap->round) + ": " + trap->detail + "\n"
                 : "  mutant NOT caught on the crafted schedule\n";
  detail += !clean && !clean2 ? "  genuine automaton passes both invariants on the same schedule\n"
                              : "  genuine automaton unexpectedly flagged\n";
  detail += "  mutant fuzz: containment tripped " + std::to_string(caught_l1) + "/" + std::to_string(runs) +
            ", even-round refinement tripped " + std::to_string(caught_l2) + "/" + std::to_string(runs) + "\n";
  detail += "  (criteria 1-4 above ran the same invariant checkers on every trace)\n";
  return Criterion{5, "skipping the intersection trips the containment checkers; the real automaton passes",
                   pass, detail};
}

// --- criterion 6: weak-set workloads ---

Criterion weakset_fuzz() {
  FuzzSpec spec;
  spec.algo = AlgoKind::Weakset;
  spec.n_min = 1;
  spec.n_max = 5;
  spec.runs = scaled(1000);
  spec.lockstep_only = true;  // the interval contract is a lock-step claim
  FuzzSummary sum = fuzz(spec, 0x5E7, g_jobs);
  return Criterion{6, "randomized add/get workloads satisfy the interval contract; every add completes",
                   sum.ok(), sum.to_text()};
}

// --- criterion 7: register adapter ---

Criterion register_runs() {
  bool rule_exact = register_read_rule({ws_item_of_register_entry(5, 2), ws_item_of_register_entry(9, 1)}) ==
                        Value{5} &&
                    register_read_rule({ws_item_of_register_entry(5, 2), ws_item_of_register_entry(9, 2)}) ==
                        Value{9};

  std::uint64_t runs = scaled(500);
  std::uint64_t failures = 0;
  std::string note;
  for (std::uint64_t i = 0; i < runs; ++i) {
    Rng rng(mix_seed(0x4e6, i));
    Scenario sc;
    sc.algo = AlgoKind::Weakset;
    sc.n = 1 + rng.below32(5);
    sc.horizon = 28 + static_cast<Round>(rng.below(10));
    sc.seed = mix_seed(0x4e6, i);
    sc.crash_budget = rng.below32(sc.n);
    RegRunResult run = run_register_scenario(sc);
    if (!run.report.all_ok()) {
      ++failures;
      if (note.empty()) note = "  first failure seed=" + std::to_string(sc.seed) + "\n" + run.report.to_text();
    }
  }

  bool pass = rule_exact && failures == 0;
  std::string detail = "  runs=" + std::to_string(runs) + " failures=" + std::to_string(failures) +
                       " read-rule-examples=" + (rule_exact ? "exact" : "WRONG") + "\n" + note;
  return Criterion{7, "register reads stay within the regularity envelope; read-rule examples reproduce",
                   pass, detail};
}

// --- criterion 8: emulated environment ---

Criterion emulation_fuzz() {
  FuzzSpec spec;
  spec.algo = AlgoKind::Emulation;
  spec.n_min = 1;
  spec.n_max = 4;
  spec.runs = scaled(1000);
  spec.both_backends = true;
  FuzzSummary sum = fuzz(spec, 0xE3B, g_jobs);
  return Criterion{8,
                   "emulated traces satisfy the moving-source definition over both weak-set backends; "
                   "consensus over the emulation stays safe",
                   sum.ok(), sum.to_text()};
}

// --- criterion 9: pinned golden traces ---

Criterion golden_traces(const std::string& golden_dir) {
  struct Golden {
    Scenario scenario;
    const char* file;
    Label proc;
    Round round;
    Value value;
    std::size_t deciders;
  };
  const std::vector<Golden> goldens = {
      {demo_es_single(), "es_single.trace", 0, 4, 5, 1},
      {demo_es_pair(), "es_pair.trace", 0, 6, 7, 2},
      {demo_ess_single(), "ess_single.trace", 0, 4, 9, 1},
  };

  std::string detail;
  bool pass = true;
  for (const Golden& g : goldens) {
    RunResult run = run_scenario(g.scenario);
    bool facts = run.report.decisions.size() == g.deciders;
    for (const auto& [p, rv] : run.report.decisions) {
      facts = facts && rv.first == g.round && rv.second == g.value;
    }
    std::string produced = serialize_trace(run.trace);
    std::string pinned;
    bool bytes = false;
    try {
      pinned = read_file(golden_dir + "/" + g.file);
      bytes = pinned == produced;
    } catch (const ConfigError&) {
      bytes = false;
    }
    pass = pass && facts && bytes;
    detail += std::string("  ") + g.file + ": decisions " + (facts ? "ok" : "WRONG") + ", bytes " +
              (bytes ? "identical" : "DIFFER") + "\n";
  }
  return Criterion{9, "hand-derived runs are pinned byte-exactly", pass, detail};
}

// --- criterion 10: determinism ---

Criterion determinism() {
  bool pass = true;
  std::string detail;

  std::vector<Scenario> configs;
  {
    Scenario a;
    a.algo = AlgoKind::ESS;
    a.env = EnvKind::ESS;
    a.mode = Mode::Lockstep;
    a.n = 4;
    a.values = {2, 9, 9, 5};
    a.kstab = 7;
    a.horizon = 128;
    a.seed = 4242;
    configs.push_back(a);

    Scenario b;
    b.algo = AlgoKind::ES;
    b.env = EnvKind::MS;
    b.mode = Mode::Skewed;
    b.policy = SourcePolicy::Random;
    b.n = 5;
    b.values = {1, 2, 3, 4, 5};
    b.horizon = 24;
    b.seed = 777;
    b.crash_budget = 4;
    configs.push_back(b);

    Scenario c;
    c.algo = AlgoKind::Weakset;
    c.n = 3;
    c.horizon = 30;
    c.seed = 31;
    c.crash_budget = 2;
    configs.push_back(c);

    Scenario d;
    d.algo = AlgoKind::Emulation;
    d.backend = BackendKind::Network;
    d.wrap = WrapKind::Consensus;
    d.n = 3;
    d.values = {6, 1, 6};
    d.seed = 99;
    d.round_target = 10;
    configs.push_back(d);
  }

  for (std::size_t i = 0; i < configs.size(); ++i) {
    std::string a = serialize_trace(run_scenario(configs[i]).trace);
    std::string b = serialize_trace(run_scenario(configs[i]).trace);
    bool same = a == b;
    pass = pass && same;
    detail += "  config " + std::to_string(i) + ": " + (same ? "byte-identical" : "DIVERGED") + "\n";
  }

  // parallel fuzz aggregation is order-independent
  FuzzSpec spec;
  spec.algo = AlgoKind::ES;
  spec.env = EnvKind::MS;
  spec.runs = scaled(400);
  std::string s1 = fuzz(spec, 123, 2).to_text();
  std::string s2 = fuzz(spec, 123, 1).to_text();
  bool same_summary = s1 == s2;
  pass = pass && same_summary;
  detail += std::string("  parallel vs serial fuzz summary: ") + (same_summary ? "identical" : "DIVERGED") + "\n";

  return Criterion{10, "identical seeds give byte-identical traces and summaries", pass, detail};
}

}  // namespace

int main(int argc, char** argv) {
  std::string golden_dir = "tests/golden";
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--golden-dir" && i + 1 < argc) {
      golden_dir = argv[++i];
    } else if (arg == "--only" && i + 1 < argc) {
      std::istringstream in(argv[++i]);
      std::string tok;
      while (std::getline(in, tok, ',')) only.push_back(std::stoi(tok));
    } else if (arg == "--quick") {
      g_scale = 20;
    } else if (arg == "--jobs" && i + 1 < argc) {
      g_jobs = static_cast<unsigned>(std::stoul(argv[++i]));
    } else {
      std::cerr << "unknown argument: " << arg << "\n";
      return 2;
    }
  }

  auto wanted = [&](int n) { return only.empty() || std::find(only.begin(), only.end(), n) != only.end(); };

  std::vector<Criterion> results;
  if (wanted(1)) results.push_back(safety_fuzz(1, AlgoKind::ES));
  if (wanted(2)) results.push_back(safety_fuzz(2, AlgoKind::ESS));
  if (wanted(3)) results.push_back(es_termination());
  if (wanted(4)) results.push_back(ess_termination());
  if (wanted(5)) results.push_back(mutation_trap());
  if (wanted(6)) results.push_back(weakset_fuzz());
  if (wanted(7)) results.push_back(register_runs());
  if (wanted(8)) results.push_back(emulation_fuzz());
  if (wanted(9)) results.push_back(golden_traces(golden_dir));
  if (wanted(10)) results.push_back(determinism());

  int failed = 0;
  for (const Criterion& c : results) {
    std::cout << "CRITERION " << c.number << " " << (c.pass ? "PASS" : "FAIL") << "  " << c.summary << "\n";
    if (!c.detail.empty()) {
      std::istringstream in(c.detail);
      std::string line;
      while (std::getline(in, line)) {
        if (!line.empty()) std::cout << "    " << line << "\n";
      }
    }
    if (!c.pass) ++failed;
  }
  std::cout << (failed == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL") << " (" << results.size() - failed
            << "/" << results.size() << ")\n";
  return failed;
}
