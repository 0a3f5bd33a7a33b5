#include "girafsim/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <thread>

#include "girafsim/consensus_es.hpp"
#include "girafsim/consensus_ess.hpp"

namespace girafsim {

namespace {

// --- weak-set workloads ------------------------------------------------------

struct WsOpPlan {
  Round round = 1;
  bool is_add = true;
  Value value = 0;
};

std::vector<std::vector<WsOpPlan>> gen_ws_plans(std::uint32_t n, Round horizon, std::uint32_t dmax,
                                                Rng& rng) {
  // adds stop early enough to complete before the horizon
  Round last_add = horizon > dmax + 10 ? horizon - dmax - 10 : 1;
  std::vector<std::vector<WsOpPlan>> plans(n);
  for (Label p = 0; p < n; ++p) {
    std::uint32_t count = 1 + rng.below32(4);
    Round at = 1 + rng.below32(3);
    for (std::uint32_t i = 0; i < count && at < horizon; ++i) {
      WsOpPlan op;
      op.round = at;
      op.is_add = rng.chance(3, 5) && at <= last_add;
      op.value = rng.below(24);
      plans[p].push_back(op);
      at += 2 + rng.below32(5);
    }
    // a trailing read observes what settled
    if (horizon > 2) plans[p].push_back(WsOpPlan{static_cast<Round>(horizon - 1), false, 0});
  }
  return plans;
}

/// Issues planned add/get calls between kernel steps; one pending add per
/// process, later ops wait for completion. Adds deferred past the cutoff are
/// dropped so every issued add has room to complete within the horizon.
class WsWorkloadHook : public SimHook {
 public:
  WsWorkloadHook(std::vector<std::vector<WsOpPlan>> plans, Round add_cutoff)
      : plans_(std::move(plans)), add_cutoff_(add_cutoff), cursor_(plans_.size(), 0),
        next_op_(plans_.size(), 0), open_add_(plans_.size()) {}

  void before_end_of_round(Label p, Round next_round, SimEngine& sim) override {
    auto* ws = dynamic_cast<WsAutomaton*>(&sim.process(p).automaton());
    require(ws != nullptr, "weak-set workload over non-weak-set automaton");
    auto& plan = plans_[p];
    while (cursor_[p] < plan.size() && plan[cursor_[p]].round < next_round) {
      const WsOpPlan& op = plan[cursor_[p]];
      if (op.is_add) {
        if (ws->add_pending()) break;  // serialized adds: wait for the open one
        if (next_round > add_cutoff_) {
          ++cursor_[p];
          continue;
        }
        WsItem item = ws_item_of_value(op.value);
        sim.recorder().add_start(p, next_op_[p], OpTag::Plain, item);
        ws->add(item);
        open_add_[p] = {next_op_[p], item};
      } else {
        sim.recorder().get(p, next_op_[p], OpTag::Plain, ws->get().items());
      }
      ++next_op_[p];
      ++cursor_[p];
    }
  }

  void after_end_of_round(Label p, SimEngine& sim) override {
    auto* ws = dynamic_cast<WsAutomaton*>(&sim.process(p).automaton());
    if (ws && ws->take_add_completion() && open_add_[p]) {
      sim.recorder().add_end(p, open_add_[p]->first, OpTag::Plain, open_add_[p]->second);
      open_add_[p].reset();
    }
  }

 private:
  std::vector<std::vector<WsOpPlan>> plans_;
  Round add_cutoff_;
  std::vector<std::size_t> cursor_;
  std::vector<std::uint32_t> next_op_;
  std::vector<std::optional<std::pair<std::uint32_t, WsItem>>> open_add_;
};

// --- register workload -------------------------------------------------------

struct RegOpPlan {
  Round round = 1;
  bool is_write = true;
  Value value = 0;
};

std::vector<std::vector<RegOpPlan>> gen_reg_plans(std::uint32_t n, Round horizon, std::uint32_t dmax,
                                                  Rng& rng) {
  Round last_write = horizon > dmax + 10 ? horizon - dmax - 10 : 1;
  std::vector<std::vector<RegOpPlan>> plans(n);
  for (Label p = 0; p < n; ++p) {
    std::uint32_t count = 1 + rng.below32(3);
    Round at = 1 + rng.below32(4);
    for (std::uint32_t i = 0; i < count && at < horizon; ++i) {
      RegOpPlan op;
      op.round = at;
      op.is_write = rng.chance(1, 2) && at <= last_write;
      op.value = 1 + rng.below(40);
      plans[p].push_back(op);
      at += 3 + rng.below32(5);
    }
    if (horizon > 2) plans[p].push_back(RegOpPlan{static_cast<Round>(horizon - 1), false, 0});
  }
  return plans;
}

/// Register calls on top of the weak-set: a write snapshots the set, then
/// adds its value tagged with the snapshot size; a read applies the
/// maximal-history read rule. Builds the in-memory operation log the
/// regularity checker consumes.
class RegWorkloadHook : public SimHook {
 public:
  RegWorkloadHook(std::vector<std::vector<RegOpPlan>> plans, Round write_cutoff)
      : plans_(std::move(plans)), write_cutoff_(write_cutoff), cursor_(plans_.size(), 0),
        next_op_(plans_.size(), 0), open_write_(plans_.size()) {}

  void before_end_of_round(Label p, Round next_round, SimEngine& sim) override {
    auto* ws = dynamic_cast<WsAutomaton*>(&sim.process(p).automaton());
    require(ws != nullptr, "register workload over non-weak-set automaton");
    auto& plan = plans_[p];
    while (cursor_[p] < plan.size() && plan[cursor_[p]].round < next_round) {
      const RegOpPlan& op = plan[cursor_[p]];
      if (op.is_write) {
        if (ws->add_pending()) break;
        if (next_round > write_cutoff_) {
          ++cursor_[p];
          continue;
        }
        Tick start = sim.recorder().now();
        std::vector<WsItem> snapshot = ws->get().items();
        sim.recorder().get(p, next_op_[p], OpTag::RegSnap, snapshot);
        WsItem entry = ws_item_of_register_entry(op.value, snapshot.size());
        sim.recorder().add_start(p, next_op_[p], OpTag::Plain, entry);
        ws->add(entry);

        RegOpRecord rec;
        rec.kind = RegOpRecord::Kind::Write;
        rec.proc = p;
        rec.start = start;
        rec.value = op.value;
        rec.history_len = snapshot.size();
        open_write_[p] = {next_op_[p], entry, log_.size()};
        log_.push_back(rec);
      } else {
        Tick at = sim.recorder().now();
        std::vector<WsItem> snapshot = ws->get().items();
        sim.recorder().get(p, next_op_[p], OpTag::RegRead, snapshot);
        std::optional<Value> out = register_read_rule(snapshot);

        RegOpRecord rec;
        rec.kind = RegOpRecord::Kind::Read;
        rec.proc = p;
        rec.start = rec.end = at;
        rec.completed = true;
        rec.read_empty = !out.has_value();
        rec.value = out.value_or(0);
        log_.push_back(rec);
      }
      ++next_op_[p];
      ++cursor_[p];
    }
  }

  void after_end_of_round(Label p, SimEngine& sim) override {
    auto* ws = dynamic_cast<WsAutomaton*>(&sim.process(p).automaton());
    if (ws && ws->take_add_completion() && open_write_[p]) {
      auto [op, item, log_index] = *open_write_[p];
      Tick end = sim.recorder().now();
      sim.recorder().add_end(p, op, OpTag::Plain, item);
      log_[log_index].end = end;
      log_[log_index].completed = true;
      open_write_[p].reset();
    }
  }

  const std::vector<RegOpRecord>& log() const { return log_; }

 private:
  std::vector<std::vector<RegOpPlan>> plans_;
  Round write_cutoff_;
  std::vector<std::size_t> cursor_;
  std::vector<std::uint32_t> next_op_;
  std::vector<std::optional<std::tuple<std::uint32_t, WsItem, std::size_t>>> open_write_;
  std::vector<RegOpRecord> log_;
};

// --- run composition ----------------------------------------------------------

std::uint32_t fairness_gap(const Scenario& sc, std::uint32_t skew_cap) {
  return sc.mode == Mode::Lockstep ? sc.n + 2 : sc.n * (skew_cap + 3) + 4;
}

void add_outcome(CheckReport& report, const std::string& name, const CheckOutcome& out) {
  PropertyResult r;
  r.name = name;
  if (out) {
    r.ok = false;
    r.detail = out->detail;
  }
  report.add(std::move(r));
}

void add_skipped(CheckReport& report, const std::string& name, const std::string& why) {
  PropertyResult r;
  r.name = name;
  r.applicable = false;
  r.detail = why;
  report.add(std::move(r));
}

void collect_decisions(const Trace& t, CheckReport& report) {
  for (const TraceEvent* d : t.decides()) {
    report.decisions.emplace_back(d->proc, std::make_pair(d->round, d->value));
  }
  std::sort(report.decisions.begin(), report.decisions.end());
}

Round env_check_upto(const Trace& t) {
  // after the first decision a halted process may have been the designated
  // source, so the realized guarantee is only claimed on the prefix
  auto first = t.first_decide_round();
  return first ? *first : 0;
}

void consensus_checks(const Scenario& sc, const Trace& t, CheckReport& report) {
  add_outcome(report, "validity", check_validity(t));
  add_outcome(report, "agreement", check_agreement(t));
  add_outcome(report, "state_sanity", check_state_sanity(t));
  add_outcome(report, "written_in_proposed", check_written_in_all_proposed(t));
  add_outcome(report, "written_old_in_written", check_written_old_in_all_written(t));
  add_outcome(report, "decision_window", check_decision_window_converged(t));

  EnvParams ep;
  ep.kstab = t.meta.kstab;
  ep.stable_source = t.meta.stable_source;
  ep.upto = env_check_upto(t);
  add_outcome(report, "env_prefix", validate_trace_env(t, sc.env, ep));

  add_outcome(report, "fairness", check_fairness(t, fairness_gap(sc, 2)));
  add_outcome(report, "reliability", check_reliability(t));

  if (sc.algo == AlgoKind::ES && sc.env == EnvKind::ES) {
    add_outcome(report, "termination", check_termination(t, t.meta.kstab + 8));
  } else if (sc.algo == AlgoKind::ESS && sc.env == EnvKind::ESS) {
    add_outcome(report, "termination", check_termination(t, t.meta.horizon));
  } else {
    add_skipped(report, "termination", "not claimed under " + env_kind_name(sc.env));
  }

  if (sc.algo == AlgoKind::ESS && sc.env == EnvKind::ESS && t.meta.stable_source) {
    EssWindowParams wp;
    wp.source = *t.meta.stable_source;
    wp.kstab = t.meta.kstab;
    if (ess_window_usable(t, wp.kstab)) {
      add_outcome(report, "counter_growth", check_counter_growth(t, wp));
      add_outcome(report, "leader_window", check_leader_window(t, wp));
    } else {
      add_skipped(report, "counter_growth", "stabilized window too short");
      add_skipped(report, "leader_window", "stabilized window too short");
    }
  }
}

Schedule make_schedule(const Scenario& sc) {
  GenOptions g;
  g.kstab = sc.kstab;
  g.stable_source = sc.stable_source;
  g.policy = sc.policy;
  g.dmax = sc.dmax;
  if (!sc.crashes.empty()) g.crashes = sc.crashes;
  Schedule sched = generate_schedule(sc.env, sc.n, sc.horizon, sc.crash_budget, sc.seed, g);
  if (auto v = validate_schedule(sched)) {
    throw HarnessBug("generated schedule invalid at round " + std::to_string(v->round) + ": " + v->rule);
  }
  return sched;
}

}  // namespace

RunResult run_scenario(const Scenario& sc) {
  if (sc.n < 1) throw ConfigError("need at least one process");
  if ((sc.algo == AlgoKind::ES || sc.algo == AlgoKind::ESS ||
       (sc.algo == AlgoKind::Emulation && sc.wrap == WrapKind::Consensus)) &&
      sc.values.size() != sc.n) {
    throw ConfigError("need exactly one initial value per process");
  }

  RunResult out;

  if (sc.algo == AlgoKind::ES || sc.algo == AlgoKind::ESS) {
    Schedule sched = make_schedule(sc);
    SimOptions so;
    so.mode = sc.mode;
    so.seed = sc.seed;

    auto arena = std::make_shared<HistoryArena>();
    AutomatonFactory factory;
    if (sc.algo == AlgoKind::ES) {
      factory = [&sc](std::size_t i) -> std::unique_ptr<Automaton> {
        return std::make_unique<EsAutomaton>(sc.values[i]);
      };
    } else {
      factory = [&sc, arena](std::size_t i) -> std::unique_ptr<Automaton> {
        return std::make_unique<EssAutomaton>(sc.values[i], *arena);
      };
    }
    out.trace = run_simulation(sched, factory, so, nullptr, meta_for(sched, sc.algo, sc.mode, sc.values));
    out.trace.arena_keepalive = arena;
    consensus_checks(sc, out.trace, out.report);
  } else if (sc.algo == AlgoKind::Weakset) {
    Scenario ws = sc;
    ws.env = EnvKind::MS;
    Schedule sched = make_schedule(ws);
    SimOptions so;
    so.mode = sc.mode;
    so.seed = sc.seed;
    so.stop_when_quiet = false;

    Rng plan_rng(mix_seed(sc.seed, 0x3ad5));
    Round cutoff = sc.horizon > sc.dmax + 6 ? sc.horizon - sc.dmax - 6 : 1;
    WsWorkloadHook hook(sc.ws_workload ? gen_ws_plans(sc.n, sc.horizon, sc.dmax, plan_rng)
                                       : std::vector<std::vector<WsOpPlan>>(sc.n),
                        cutoff);
    AutomatonFactory factory = [](std::size_t) -> std::unique_ptr<Automaton> {
      return std::make_unique<WsAutomaton>();
    };
    out.trace =
        run_simulation(sched, factory, so, &hook, meta_for(sched, AlgoKind::Weakset, sc.mode, sc.values));

    if (sc.mode == Mode::Lockstep) {
      add_outcome(out.report, "ws_intervals", check_ws_intervals(out.trace));
    } else {
      // op intervals are only meaningful against the lock-step time base; a
      // process running behind may legitimately answer a get from an older
      // round than a just-completed add elsewhere
      add_skipped(out.report, "ws_intervals", "interval contract is claimed for lockstep runs");
    }
    add_outcome(out.report, "ws_liveness", check_ws_liveness(out.trace));
    add_outcome(out.report, "written_in_proposed", check_written_in_all_proposed(out.trace));
    add_outcome(out.report, "env", validate_trace_env(out.trace, EnvKind::MS));
    add_outcome(out.report, "fairness", check_fairness(out.trace, fairness_gap(sc, 2)));
    add_outcome(out.report, "reliability", check_reliability(out.trace));
  } else {
    // emulation
    EmulationOptions eo;
    eo.n = sc.n;
    eo.seed = sc.seed;
    eo.round_target = sc.round_target;
    eo.crashes = sc.crashes;
    eo.values = sc.values;
    eo.step_budget = static_cast<std::uint64_t>(sc.round_target) * sc.n * 16 + 64;

    AutomatonFactory factory;
    if (sc.wrap == WrapKind::Consensus) {
      factory = [&sc](std::size_t i) -> std::unique_ptr<Automaton> {
        return std::make_unique<EsAutomaton>(sc.values[i]);
      };
    } else {
      factory = [&sc](std::size_t i) -> std::unique_ptr<Automaton> {
        return std::make_unique<RelayAutomaton>(i < sc.values.size() ? sc.values[i] : i);
      };
    }

    if (sc.backend == BackendKind::Oracle) {
      OracleBackend backend(sc.n, mix_seed(sc.seed, 0x0bac));
      out.trace = run_emulation(backend, factory, eo);
    } else {
      NetworkBackend backend(sc.n, sc.seed, static_cast<Round>(eo.step_budget + 8));
      out.trace = run_emulation(backend, factory, eo);
      Trace inner = backend.take_inner_trace();
      add_outcome(out.report, "inner_env", validate_trace_env(inner, EnvKind::MS));
      add_outcome(out.report, "inner_ws_liveness", check_ws_liveness(inner));
    }

    add_outcome(out.report, "env", validate_trace_env(out.trace, EnvKind::MS));
    add_outcome(out.report, "progress", check_progress(out.trace, sc.round_target));
    if (sc.wrap == WrapKind::Consensus) {
      add_outcome(out.report, "validity", check_validity(out.trace));
      add_outcome(out.report, "agreement", check_agreement(out.trace));
    }
  }

  collect_decisions(out.trace, out.report);
  return out;
}

RegRunResult run_register_scenario(const Scenario& sc) {
  Scenario ws = sc;
  ws.env = EnvKind::MS;
  ws.mode = Mode::Lockstep;  // the regularity envelope is a lock-step claim
  Schedule sched = make_schedule(ws);
  SimOptions so;
  so.mode = ws.mode;
  so.seed = sc.seed;
  so.stop_when_quiet = false;

  Rng plan_rng(mix_seed(sc.seed, 0x4e65));
  Round cutoff = sc.horizon > sc.dmax + 6 ? sc.horizon - sc.dmax - 6 : 1;
  RegWorkloadHook hook(gen_reg_plans(sc.n, sc.horizon, sc.dmax, plan_rng), cutoff);
  AutomatonFactory factory = [](std::size_t) -> std::unique_ptr<Automaton> {
    return std::make_unique<WsAutomaton>();
  };

  RegRunResult out;
  out.trace =
      run_simulation(sched, factory, so, &hook, meta_for(sched, AlgoKind::Weakset, ws.mode, sc.values));
  out.log = hook.log();

  add_outcome(out.report, "register_regularity", [&]() -> CheckOutcome {
    if (auto v = register_check(out.log)) {
      return TraceViolation{0, "op " + std::to_string(v->op_index) + ": " + v->reason};
    }
    return std::nullopt;
  }());
  add_outcome(out.report, "ws_intervals", check_ws_intervals(out.trace));
  add_outcome(out.report, "ws_liveness", check_ws_liveness(out.trace));
  add_outcome(out.report, "reliability", check_reliability(out.trace));
  return out;
}

CheckReport check_trace(const Trace& t, const std::vector<std::string>& properties) {
  CheckReport report;
  auto want = [&](const std::string& name) {
    if (properties.empty()) return true;
    return std::find(properties.begin(), properties.end(), name) != properties.end();
  };

  bool consensus = t.meta.algo == AlgoKind::ES || t.meta.algo == AlgoKind::ESS ||
                   (t.meta.algo == AlgoKind::Emulation && !t.meta.values.empty());

  if (consensus) {
    if (want("validity")) add_outcome(report, "validity", check_validity(t));
    if (want("agreement")) add_outcome(report, "agreement", check_agreement(t));
  }
  if (t.meta.algo != AlgoKind::Emulation) {
    if (want("written_in_proposed")) {
      add_outcome(report, "written_in_proposed", check_written_in_all_proposed(t));
    }
    if (want("written_old_in_written")) {
      add_outcome(report, "written_old_in_written", check_written_old_in_all_written(t));
    }
    if (want("state_sanity")) add_outcome(report, "state_sanity", check_state_sanity(t));
  }
  if (want("env")) {
    EnvParams ep;
    ep.kstab = t.meta.kstab;
    ep.stable_source = t.meta.stable_source;
    ep.upto = t.meta.algo == AlgoKind::Emulation ? 0 : env_check_upto(t);
    add_outcome(report, "env", validate_trace_env(t, t.meta.env, ep));
  }
  if (want("reliability")) add_outcome(report, "reliability", check_reliability(t));
  if (t.meta.algo == AlgoKind::Weakset) {
    if (want("ws_intervals")) add_outcome(report, "ws_intervals", check_ws_intervals(t));
    if (want("ws_liveness")) add_outcome(report, "ws_liveness", check_ws_liveness(t));
  }
  collect_decisions(t, report);
  return report;
}

// --- scenario file format -------------------------------------------------------

Scenario parse_scenario(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "#girafsim-scenario v1") throw ConfigError("bad scenario header");

  Scenario sc;
  bool saw_values = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key, val;
    ls >> key;
    std::getline(ls, val);
    while (!val.empty() && val.front() == ' ') val.erase(val.begin());
    if (key == "algo") {
      sc.algo = parse_algo_kind(val);
    } else if (key == "env") {
      sc.env = parse_env_kind(val);
    } else if (key == "mode") {
      sc.mode = parse_mode(val);
    } else if (key == "n") {
      sc.n = static_cast<std::uint32_t>(std::stoul(val));
    } else if (key == "values") {
      sc.values.clear();
      saw_values = true;
      if (val != "-") {
        std::istringstream vs(val);
        std::string tok;
        while (std::getline(vs, tok, ',')) sc.values.push_back(std::stoull(tok));
      }
    } else if (key == "kstab") {
      if (val != "-") sc.kstab = static_cast<Round>(std::stoul(val));
    } else if (key == "source") {
      if (val != "-") sc.stable_source = static_cast<Label>(std::stoul(val));
    } else if (key == "horizon") {
      sc.horizon = static_cast<Round>(std::stoul(val));
    } else if (key == "seed") {
      sc.seed = std::stoull(val);
    } else if (key == "dmax") {
      sc.dmax = static_cast<std::uint32_t>(std::stoul(val));
    } else if (key == "crash_budget") {
      sc.crash_budget = static_cast<std::uint32_t>(std::stoul(val));
    } else if (key == "crashes") {
      sc.crashes.assign(sc.n, std::nullopt);
      if (val != "-") {
        std::istringstream cs(val);
        std::string tok;
        while (std::getline(cs, tok, ',')) {
          auto at = tok.find('@');
          if (at == std::string::npos) throw ConfigError("crash entries look like proc@round");
          Label p = static_cast<Label>(std::stoul(tok.substr(0, at)));
          if (p >= sc.n) throw ConfigError("crash label out of range");
          sc.crashes[p] = static_cast<Round>(std::stoul(tok.substr(at + 1)));
        }
      }
    } else if (key == "policy") {
      if (val == "rotate") {
        sc.policy = SourcePolicy::Rotate;
      } else if (val == "random") {
        sc.policy = SourcePolicy::Random;
      } else {
        throw ConfigError("unknown source policy: " + val);
      }
    } else if (key == "backend") {
      if (val == "oracle") {
        sc.backend = BackendKind::Oracle;
      } else if (val == "network") {
        sc.backend = BackendKind::Network;
      } else {
        throw ConfigError("unknown backend: " + val);
      }
    } else if (key == "wrap") {
      if (val == "relay") {
        sc.wrap = WrapKind::Relay;
      } else if (val == "consensus") {
        sc.wrap = WrapKind::Consensus;
      } else {
        throw ConfigError("unknown wrap: " + val);
      }
    } else if (key == "round_target") {
      sc.round_target = static_cast<Round>(std::stoul(val));
    } else if (key == "wsops") {
      sc.ws_workload = val == "auto";
    } else if (key == "out") {
      sc.out = val == "-" ? "" : val;
    } else {
      throw ConfigError("unknown scenario key: " + key);
    }
  }
  if (!saw_values && sc.values.empty()) sc.values.assign(sc.n, 0);
  return sc;
}

std::string serialize_scenario(const Scenario& sc) {
  std::ostringstream out;
  out << "#girafsim-scenario v1\n";
  out << "algo " << algo_kind_name(sc.algo) << "\n";
  out << "env " << env_kind_name(sc.env) << "\n";
  out << "mode " << mode_name(sc.mode) << "\n";
  out << "n " << sc.n << "\n";
  out << "values ";
  if (sc.values.empty()) {
    out << "-";
  } else {
    for (std::size_t i = 0; i < sc.values.size(); ++i) out << (i ? "," : "") << sc.values[i];
  }
  out << "\n";
  out << "kstab " << (sc.kstab ? std::to_string(*sc.kstab) : "-") << "\n";
  out << "source " << (sc.stable_source ? std::to_string(*sc.stable_source) : "-") << "\n";
  out << "horizon " << sc.horizon << "\n";
  out << "seed " << sc.seed << "\n";
  out << "dmax " << sc.dmax << "\n";
  out << "crash_budget " << sc.crash_budget << "\n";
  out << "crashes ";
  bool any = false;
  for (Label p = 0; p < sc.crashes.size(); ++p) {
    if (sc.crashes[p]) {
      out << (any ? "," : "") << p << "@" << *sc.crashes[p];
      any = true;
    }
  }
  if (!any) out << "-";
  out << "\n";
  out << "policy " << (sc.policy == SourcePolicy::Rotate ? "rotate" : "random") << "\n";
  if (sc.algo == AlgoKind::Emulation) {
    out << "backend " << (sc.backend == BackendKind::Oracle ? "oracle" : "network") << "\n";
    out << "wrap " << (sc.wrap == WrapKind::Relay ? "relay" : "consensus") << "\n";
    out << "round_target " << sc.round_target << "\n";
  }
  if (sc.algo == AlgoKind::Weakset) out << "wsops " << (sc.ws_workload ? "auto" : "none") << "\n";
  out << "out " << (sc.out.empty() ? "-" : sc.out) << "\n";
  return out.str();
}

// --- fuzzing ----------------------------------------------------------------------

std::string FuzzSummary::to_text() const {
  std::ostringstream out;
  out << "runs=" << runs << " failures=" << failures << " decided_runs=" << decided_runs
      << " window_checked=" << window_checked_runs << " max_decide_round=" << max_decide_round << "\n";
  for (const std::string& note : failure_notes) out << "  " << note << "\n";
  out << (ok() ? "FUZZ PASS" : "FUZZ FAIL") << "\n";
  return out.str();
}

namespace {

struct FuzzOutcome {
  bool ok = true;
  bool decided_all = false;
  bool window_checked = false;
  Round max_decide = 0;
  std::string note;
};

Scenario scenario_for_run(const FuzzSpec& spec, std::uint64_t run_seed, std::uint64_t index) {
  Rng rng(run_seed);
  Scenario sc;
  sc.algo = spec.algo;
  sc.env = spec.env;
  sc.seed = run_seed;
  sc.n = spec.n_min + rng.below32(spec.n_max - spec.n_min + 1);
  sc.mode = (!spec.lockstep_only && index % 2 == 1) ? Mode::Skewed : Mode::Lockstep;
  sc.policy = index % 4 < 2 ? SourcePolicy::Random : SourcePolicy::Rotate;
  sc.crash_budget = rng.below32(sc.n);  // up to n-1 crashes

  // narrow value ranges sometimes: equal proposals collapse to one message,
  // which is where anonymity earns its keep
  std::uint64_t value_range = index % 3 == 0 ? 2 : 10;
  sc.values.clear();
  for (std::uint32_t i = 0; i < sc.n; ++i) sc.values.push_back(rng.below(value_range));

  switch (spec.algo) {
    case AlgoKind::ES:
    case AlgoKind::ESS:
      if (spec.env == EnvKind::MS) {
        sc.horizon = 22 + static_cast<Round>(rng.below(12));
      } else if (spec.env == EnvKind::ES) {
        sc.kstab = 1 + static_cast<Round>(rng.below(spec.kstab_max));
        sc.horizon = *sc.kstab + spec.termination_bound_slack + 8;
      } else {
        sc.kstab = 1 + static_cast<Round>(rng.below(spec.kstab_max));
        sc.horizon = 4 * *sc.kstab + 100;
      }
      break;
    case AlgoKind::Weakset:
      sc.horizon = 30 + static_cast<Round>(rng.below(12));
      break;
    case AlgoKind::Emulation:
      sc.n = std::min<std::uint32_t>(sc.n, 4);
      sc.round_target = 8 + static_cast<Round>(rng.below(5));
      sc.backend = (spec.both_backends && index % 2 == 1) ? BackendKind::Network : BackendKind::Oracle;
      sc.wrap = index % 4 < 2 ? WrapKind::Consensus : WrapKind::Relay;
      sc.crashes.assign(sc.n, std::nullopt);
      if (sc.n > 1 && rng.chance(1, 2)) {
        sc.crashes[rng.below32(sc.n)] = 1 + static_cast<Round>(rng.below(sc.round_target));
      }
      break;
  }
  return sc;
}

FuzzOutcome execute_fuzz_run(const Scenario& sc) {
  FuzzOutcome out;
  RunResult run = run_scenario(sc);

  for (const auto& r : run.report.results) {
    if (r.applicable && !r.ok) {
      out.ok = false;
      out.note = "seed=" + std::to_string(sc.seed) + " n=" + std::to_string(sc.n) + " mode=" +
                 mode_name(sc.mode) + " prop=" + r.name + " " + r.detail;
      break;
    }
    if (r.name == "counter_growth" && r.applicable) out.window_checked = true;
  }

  std::set<Label> deciders;
  for (const auto& [p, rv] : run.report.decisions) {
    deciders.insert(p);
    out.max_decide = std::max(out.max_decide, rv.first);
  }
  std::set<Label> crashed;
  for (const TraceEvent& e : run.trace.events) {
    if (e.kind == TraceEventKind::Crash) crashed.insert(e.proc);
  }
  out.decided_all = true;
  for (Label p = 0; p < sc.n; ++p) {
    if (!crashed.count(p) && !deciders.count(p)) out.decided_all = false;
  }
  return out;
}

}  // namespace

FuzzSummary fuzz(const FuzzSpec& spec, std::uint64_t seed, unsigned jobs) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  std::vector<FuzzOutcome> outcomes(spec.runs);
  std::atomic<std::uint64_t> next{0};

  auto worker = [&]() {
    while (true) {
      std::uint64_t i = next.fetch_add(1);
      if (i >= spec.runs) return;
      Scenario sc = scenario_for_run(spec, mix_seed(seed, i), i);
      try {
        outcomes[i] = execute_fuzz_run(sc);
      } catch (const std::exception& e) {
        outcomes[i].ok = false;
        outcomes[i].note = "seed=" + std::to_string(sc.seed) + " exception: " + e.what();
      }
    }
  };

  if (jobs <= 1 || spec.runs < 2) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  FuzzSummary sum;
  sum.runs = spec.runs;
  for (const FuzzOutcome& o : outcomes) {
    if (!o.ok) {
      ++sum.failures;
      if (sum.failure_notes.size() < 5) sum.failure_notes.push_back(o.note);
    }
    if (o.decided_all) ++sum.decided_runs;
    if (o.window_checked) ++sum.window_checked_runs;
    sum.max_decide_round = std::max(sum.max_decide_round, o.max_decide);
  }
  return sum;
}

// --- pinned demos -------------------------------------------------------------------

Scenario demo_es_single() {
  Scenario sc;
  sc.algo = AlgoKind::ES;
  sc.env = EnvKind::MS;
  sc.mode = Mode::Lockstep;
  sc.n = 1;
  sc.values = {5};
  sc.horizon = 12;
  sc.seed = 1;
  return sc;
}

Scenario demo_es_pair() {
  Scenario sc;
  sc.algo = AlgoKind::ES;
  sc.env = EnvKind::ES;
  sc.mode = Mode::Lockstep;
  sc.n = 2;
  sc.values = {3, 7};
  sc.kstab = 1;  // synchronous from the start
  sc.horizon = 16;
  sc.seed = 1;
  return sc;
}

Scenario demo_ess_single() {
  Scenario sc;
  sc.algo = AlgoKind::ESS;
  sc.env = EnvKind::MS;
  sc.mode = Mode::Lockstep;
  sc.n = 1;
  sc.values = {9};
  sc.horizon = 12;
  sc.seed = 1;
  return sc;
}

}  // namespace girafsim
