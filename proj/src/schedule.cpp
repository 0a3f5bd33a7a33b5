#include "girafsim/schedule.hpp"

#include <algorithm>
#include <sstream>

namespace girafsim {

namespace {

/// Processes the eventual source keeps hearing from, chosen up front so the
/// post-stabilization link structure is clean: members are mutually timely
/// forever, everyone else stays silent toward them.
std::vector<bool> pick_out_connected(Rng& rng, const Schedule& s) {
  std::vector<bool> oc(s.n, false);
  oc[*s.stable_source] = true;
  for (Label p = 0; p < s.n; ++p) {
    if (p != *s.stable_source && s.correct(p) && rng.chance(1, 2)) oc[p] = true;
  }
  return oc;
}

}  // namespace

Schedule generate_schedule(EnvKind env, std::uint32_t n, Round horizon, std::uint32_t crash_budget,
                           std::uint64_t seed, const GenOptions& opts) {
  if (n < 1) throw ConfigError("need at least one process");
  if (horizon < 1) throw ConfigError("horizon must be at least 1");

  Schedule s;
  s.env = env;
  s.n = n;
  s.horizon = horizon;
  s.dmax = opts.dmax;
  s.seed = seed;
  s.crash_round.assign(n, std::nullopt);
  s.delay.assign(static_cast<std::size_t>(horizon) * n * n, 0);

  Rng rng(seed);

  if (env != EnvKind::MS) {
    Round kstab = opts.kstab ? *opts.kstab : static_cast<Round>(1 + rng.below(horizon));
    if (kstab < 1 || kstab > horizon) throw ConfigError("stabilization round outside horizon");
    s.kstab = kstab;
  }

  // Crash placement. Stabilized environments only crash processes before the
  // stable suffix, matching the termination claims under test.
  if (opts.crashes) {
    if (opts.crashes->size() != n) throw ConfigError("crash list size mismatch");
    s.crash_round = *opts.crashes;
  } else if (crash_budget > 0) {
    std::uint32_t cap = opts.allow_all_crash ? n : n - 1;
    std::uint32_t budget = std::min(crash_budget, cap);
    std::uint32_t count = static_cast<std::uint32_t>(rng.below(budget + 1));
    std::vector<Label> procs(n);
    for (Label p = 0; p < n; ++p) procs[p] = p;
    for (std::uint32_t i = 0; i < count; ++i) {
      std::size_t pick = i + rng.below(procs.size() - i);
      std::swap(procs[i], procs[pick]);
      Round latest = env == EnvKind::MS ? horizon : (s.kstab > 1 ? s.kstab - 1 : 0);
      if (latest == 0) break;  // immediate stabilization leaves no room for crashes
      s.crash_round[procs[i]] = static_cast<Round>(1 + rng.below(latest));
    }
  }

  if (env == EnvKind::ESS) {
    Label src;
    if (opts.stable_source) {
      src = *opts.stable_source;
      if (src >= n) throw ConfigError("stable source out of range");
      if (!s.correct(src)) throw ConfigError("stable source may not crash");
    } else {
      std::vector<Label> correct;
      for (Label p = 0; p < n; ++p) {
        if (s.correct(p)) correct.push_back(p);
      }
      if (correct.empty()) throw ConfigError("no correct process available as stable source");
      src = correct[rng.below(correct.size())];
    }
    s.stable_source = src;
  }

  std::vector<bool> oc;
  std::vector<std::uint8_t> friends;  // static links among the silent, i*n+j
  if (env == EnvKind::ESS) {
    oc = pick_out_connected(rng, s);
    friends.assign(static_cast<std::size_t>(n) * n, 0);
    for (Label i = 0; i < n; ++i) {
      for (Label j = 0; j < n; ++j) {
        friends[static_cast<std::size_t>(i) * n + j] = rng.chance(1, 2) ? 1 : 0;
      }
    }
  }

  // how much besides the source gets through varies per schedule, from
  // near-silent to near-synchronous
  std::uint64_t extra_den = 2 + rng.below(8);

  Label rotate_next = 0;
  for (Round k = 1; k <= horizon; ++k) {
    std::vector<Label> alive;
    for (Label p = 0; p < n; ++p) {
      if (s.alive_at(p, k)) alive.push_back(p);
    }
    if (alive.empty()) {
      // nobody left; links are irrelevant but keep them non-timely and bounded
      for (Label i = 0; i < n; ++i) {
        for (Label j = 0; j < n; ++j) s.set_delay(k, i, j, static_cast<std::uint8_t>(1 + rng.below(s.dmax)));
      }
      continue;
    }

    bool stable = env != EnvKind::MS && k >= s.kstab;

    // adversarial default: every link late by a seeded amount
    for (Label i = 0; i < n; ++i) {
      for (Label j = 0; j < n; ++j) {
        s.set_delay(k, i, j, static_cast<std::uint8_t>(1 + rng.below(s.dmax)));
      }
      s.set_delay(k, i, i, 0);  // broadcasts always reach their own sender in time
    }

    if (stable && env == EnvKind::ES) {
      for (Label i = 0; i < n; ++i) {
        if (!s.correct(i)) continue;
        for (Label j = 0; j < n; ++j) s.set_delay(k, i, j, 0);
      }
      continue;
    }

    if (stable && env == EnvKind::ESS) {
      for (Label i = 0; i < n; ++i) {
        if (!s.correct(i)) continue;
        for (Label j = 0; j < n; ++j) {
          bool i_oc = oc[i];
          bool j_oc = oc[j];
          if (i == *s.stable_source || (i_oc && !j_oc)) {
            s.set_delay(k, i, j, 0);       // source and its circle stay timely outward
          } else if (i_oc && j_oc) {
            s.set_delay(k, i, j, 0);       // the circle is mutually timely
          } else if (!i_oc && j_oc) {
            // silent toward the circle: leave late
          } else if (!i_oc && !j_oc && friends[static_cast<std::size_t>(i) * n + j]) {
            // silent processes may chat among themselves; the link pattern is
            // fixed once stabilized so their counter minima settle
            s.set_delay(k, i, j, 0);
          }
        }
        s.set_delay(k, i, i, 0);
      }
      continue;
    }

    // moving-source round: pick a source among the living, make it timely to
    // everyone, and sprinkle extra timely links adversarially
    Label src;
    if (opts.policy == SourcePolicy::Rotate) {
      rotate_next = static_cast<Label>(rotate_next % alive.size());
      src = alive[rotate_next];
      rotate_next = static_cast<Label>((rotate_next + 1) % std::max<std::size_t>(alive.size(), 1));
    } else {
      src = alive[rng.below(alive.size())];
    }
    for (Label j = 0; j < n; ++j) s.set_delay(k, src, j, 0);
    for (Label i = 0; i < n; ++i) {
      for (Label j = 0; j < n; ++j) {
        if (i != src && i != j && rng.chance(1, extra_den)) s.set_delay(k, i, j, 0);
      }
    }
  }

  return s;
}

std::optional<ScheduleViolation> validate_schedule(const Schedule& s) {
  if (s.n < 1) return ScheduleViolation{0, "process count"};
  if (s.crash_round.size() != s.n) return ScheduleViolation{0, "crash list size"};
  if (s.delay.size() != static_cast<std::size_t>(s.horizon) * s.n * s.n) {
    return ScheduleViolation{0, "delay matrix size"};
  }
  if (s.env != EnvKind::MS && (s.kstab < 1 || s.kstab > s.horizon)) {
    return ScheduleViolation{0, "stabilization round"};
  }
  if (s.env == EnvKind::ESS) {
    if (!s.stable_source || *s.stable_source >= s.n) return ScheduleViolation{0, "stable source"};
    if (!s.correct(*s.stable_source)) return ScheduleViolation{0, "stable source crashes"};
  }

  for (Round k = 1; k <= s.horizon; ++k) {
    bool any_alive = false;
    for (Label p = 0; p < s.n; ++p) any_alive = any_alive || s.alive_at(p, k);
    if (!any_alive) continue;

    // delays bounded
    for (Label i = 0; i < s.n; ++i) {
      for (Label j = 0; j < s.n; ++j) {
        if (s.delay_at(k, i, j) > s.dmax) return ScheduleViolation{k, "late delay exceeds bound"};
      }
    }

    // a source: some living process timely toward every correct process
    bool found = false;
    for (Label i = 0; i < s.n && !found; ++i) {
      if (!s.alive_at(i, k)) continue;
      bool covers = true;
      for (Label j = 0; j < s.n; ++j) {
        if (s.correct(j) && !s.timely(k, i, j)) {
          covers = false;
          break;
        }
      }
      found = covers;
    }
    if (!found) return ScheduleViolation{k, "no source"};

    if (s.env == EnvKind::ES && k >= s.kstab) {
      for (Label i = 0; i < s.n; ++i) {
        if (!s.correct(i)) continue;
        for (Label j = 0; j < s.n; ++j) {
          if (s.correct(j) && !s.timely(k, i, j)) return ScheduleViolation{k, "unstable link after stabilization"};
        }
      }
    }
    if (s.env == EnvKind::ESS && k >= s.kstab) {
      for (Label j = 0; j < s.n; ++j) {
        if (s.correct(j) && !s.timely(k, *s.stable_source, j)) {
          return ScheduleViolation{k, "stable source not timely"};
        }
      }
    }
  }
  return std::nullopt;
}

std::string serialize_schedule(const Schedule& s) {
  std::ostringstream out;
  out << "#girafsim-schedule v1\n";
  out << "sched env=" << env_kind_name(s.env) << " n=" << s.n << " horizon=" << s.horizon
      << " kstab=" << s.kstab << " source=" << (s.stable_source ? std::to_string(*s.stable_source) : "-")
      << " dmax=" << s.dmax << " seed=" << s.seed << "\n";
  for (Label p = 0; p < s.n; ++p) {
    if (s.crash_round[p]) out << "crash p=" << p << " k=" << *s.crash_round[p] << "\n";
  }
  for (Round k = 1; k <= s.horizon; ++k) {
    for (Label i = 0; i < s.n; ++i) {
      out << "row k=" << k << " s=" << i << " d=";
      for (Label j = 0; j < s.n; ++j) {
        if (j) out << ",";
        out << static_cast<unsigned>(s.delay_at(k, i, j));
      }
      out << "\n";
    }
  }
  return out.str();
}

Schedule parse_schedule(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "#girafsim-schedule v1") throw ConfigError("bad schedule header");

  Schedule s;
  bool have_head = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    auto field = [&](const std::string& l, const char* key) -> std::string {
      std::string pat = std::string(" ") + key + "=";
      auto pos = l.find(pat);
      if (pos == std::string::npos) throw ConfigError(std::string("missing field ") + key);
      pos += pat.size();
      auto end = l.find(' ', pos);
      return l.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
    };
    if (kind == "sched") {
      s.env = parse_env_kind(field(line, "env"));
      s.n = static_cast<std::uint32_t>(std::stoul(field(line, "n")));
      s.horizon = static_cast<Round>(std::stoul(field(line, "horizon")));
      s.kstab = static_cast<Round>(std::stoul(field(line, "kstab")));
      std::string src = field(line, "source");
      if (src != "-") s.stable_source = static_cast<Label>(std::stoul(src));
      s.dmax = static_cast<std::uint32_t>(std::stoul(field(line, "dmax")));
      s.seed = std::stoull(field(line, "seed"));
      s.crash_round.assign(s.n, std::nullopt);
      s.delay.assign(static_cast<std::size_t>(s.horizon) * s.n * s.n, 0);
      have_head = true;
    } else if (kind == "crash") {
      if (!have_head) throw ConfigError("crash record before schedule header");
      Label p = static_cast<Label>(std::stoul(field(line, "p")));
      if (p >= s.n) throw ConfigError("crash label out of range");
      s.crash_round[p] = static_cast<Round>(std::stoul(field(line, "k")));
    } else if (kind == "row") {
      if (!have_head) throw ConfigError("row record before schedule header");
      Round k = static_cast<Round>(std::stoul(field(line, "k")));
      Label i = static_cast<Label>(std::stoul(field(line, "s")));
      if (k < 1 || k > s.horizon || i >= s.n) throw ConfigError("row indices out of range");
      std::string d = field(line, "d");
      std::size_t pos = 0;
      for (Label j = 0; j < s.n; ++j) {
        std::size_t comma = d.find(',', pos);
        std::string tok = d.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        s.set_delay(k, i, j, static_cast<std::uint8_t>(std::stoul(tok)));
        pos = comma == std::string::npos ? d.size() + 1 : comma + 1;
      }
    } else {
      throw ConfigError("unknown schedule record: " + kind);
    }
  }
  if (!have_head) throw ConfigError("schedule has no header record");
  return s;
}

void IncrementalMsOracle::ensure_round(Round k) {
  while (rows_.size() < k) {
    std::vector<std::uint8_t> row(static_cast<std::size_t>(n_) * n_, 0);
    std::vector<Label> alive;
    for (Label p = 0; p < n_; ++p) {
      if (alive_[p]) alive.push_back(p);
    }
    for (Label i = 0; i < n_; ++i) {
      for (Label j = 0; j < n_; ++j) {
        row[static_cast<std::size_t>(i) * n_ + j] =
            i == j ? 0 : static_cast<std::uint8_t>(1 + rng_.below(dmax_));
      }
    }
    if (!alive.empty()) {
      Label src = alive[rng_.below(alive.size())];
      for (Label j = 0; j < n_; ++j) row[static_cast<std::size_t>(src) * n_ + j] = 0;
      for (Label i = 0; i < n_; ++i) {
        for (Label j = 0; j < n_; ++j) {
          if (i != src && i != j && rng_.chance(1, 3)) row[static_cast<std::size_t>(i) * n_ + j] = 0;
        }
      }
    }
    rows_.push_back(std::move(row));
  }
}

std::uint8_t IncrementalMsOracle::delay(Round k, Label s, Label j) {
  ensure_round(k);
  return rows_[k - 1][static_cast<std::size_t>(s) * n_ + j];
}

}  // namespace girafsim
