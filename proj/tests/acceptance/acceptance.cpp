// One line per acceptance criterion; exit status is the number of failures.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>

#include "relfix/printer.hpp"
#include "relfix/report.hpp"
#include "support/checks.hpp"

using namespace relfix;
using namespace relfix::testing;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Sweep {
  std::string file;
  std::size_t locations = 0;
  RepairOutcome off, on;
  std::vector<Location> locs;
};

RepairConfig corpus_config(bool prune) {
  RepairConfig cfg;
  cfg.max_depth = 1;
  cfg.timeout = 300;
  cfg.prune = {prune, prune};
  return cfg;
}

// The corpus under both prune settings, computed once for criteria 2, 3 and 7.
const std::vector<Sweep>& sweep() {
  static const std::vector<Sweep> runs = [] {
    std::vector<Sweep> out;
    for (const auto& f : corpus_files()) {
      Spec s = load_spec(f);
      Sweep w;
      w.file = f;
      w.locs = marked_locations(s);
      w.locations = w.locs.size();
      w.off = repair(s, w.locs, corpus_config(false));
      w.on = repair(s, w.locs, corpus_config(true));
      out.push_back(std::move(w));
    }
    return out;
  }();
  return runs;
}

std::string patch_text(const RepairOutcome& o) { return o.patched ? pretty_print(*o.patched) : std::string(); }

RepairOutcome list_repair(const Spec& s, const std::vector<Location>& locs) {
  RepairConfig cfg;
  cfg.max_depth = 2;
  cfg.prune = {true, true};
  cfg.deterministic = true;
  return repair(s, locs, cfg);
}

std::string list_report(const Spec& s, const std::vector<Location>& locs, const RepairOutcome& out) {
  ReportInput in;
  in.input = "figures/list.rspec";
  in.spec = &s;
  in.locations = locs;
  in.config.max_depth = 2;
  in.before = oracle_verdicts(s);
  if (out.patched) in.after = oracle_verdicts(*out.patched);
  in.outcome = &out;
  return render_report(in);
}

bool criterion1(std::string& note) {
  const auto t0 = Clock::now();
  Spec s = load_spec("figures/list.rspec");
  const auto locs = read_locations(s, slurp("figures/list.locs"));
  RepairOutcome out = list_repair(s, locs);
  const double secs = seconds_since(t0);
  if (out.verdict != Verdict::Fixed) {
    note = std::string(to_string(out.verdict));
    return false;
  }
  Spec again = parse(pretty_print(*out.patched), "patched.rspec");
  typecheck_spec(again);
  bool ok = !again.commands.empty();
  for (const auto& c : again.commands) ok = ok && check_command(again, c).pass;
  note = "Fixed in " + std::to_string(secs) + " s, depth " + std::to_string(out.total_depth) +
         (ok ? ", oracles re-verified" : ", re-verification failed");
  return ok && secs < 300;
}

bool criterion2(std::string& note) {
  std::size_t two = 0, three = 0, same = 0;
  for (const auto& w : sweep()) {
    two += w.locations == 2;
    three += w.locations == 3;
    if (w.off.verdict == w.on.verdict && w.off.assignment == w.on.assignment &&
        patch_text(w.off) == patch_text(w.on))
      ++same;
    else
      note += " differs: " + w.file;
  }
  note = std::to_string(same) + "/" + std::to_string(sweep().size()) + " specs identical (" +
         std::to_string(two) + " with 2 locations, " + std::to_string(three) + " with 3)" + note;
  return sweep().size() >= 12 && two >= 8 && three >= 2 && same == sweep().size();
}

bool criterion3(std::string& note) {
  bool calls_ok = true;
  double best = 0;
  std::string best_file;
  for (const auto& w : sweep()) {
    if (w.locations != 2) continue;
    if (w.on.stats.solver_calls > w.off.stats.solver_calls) {
      calls_ok = false;
      note += " more calls: " + w.file;
    }
    const double ratio = static_cast<double>(w.off.stats.visited) / std::max<std::uint64_t>(1, w.on.stats.visited);
    if (ratio > best) {
      best = ratio;
      best_file = w.file;
    }
  }
  note = "best visited reduction " + std::to_string(best) + "X on " + best_file + note;
  return calls_ok && best >= 2.0;
}

bool criterion4(std::string& note) {
  Spec s = parse(kFanOutSpec, "fanout.rspec");
  typecheck_spec(s);
  const auto locs = marked_locations(s);
  bool ok = true;
  for (std::size_t d = 1; d <= 3; ++d) {
    RepairOutcome out = repair(s, locs, fan_out_config(d));
    const std::uint64_t want = geometric_space(3, d);
    note += (d > 1 ? ", d=" : "d=") + std::to_string(d) + ": " + std::to_string(out.stats.visited) + "/" + std::to_string(want);
    ok = ok && out.verdict == Verdict::SpaceExhausted && out.stats.visited == want;
  }
  return ok;
}

bool criterion5(std::string& note) {
  const auto t0 = Clock::now();
  std::size_t bad = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    CaseResult r = solver_vs_naive(seed);
    if (!r.ok) {
      if (!bad) std::cerr << r.detail << '\n';
      ++bad;
    }
  }
  const double secs = seconds_since(t0);
  note = std::to_string(200 - bad) + "/200 agree in " + std::to_string(secs) + " s";
  return bad == 0 && secs < 120;
}

bool criterion6(std::string& note) {
  std::size_t bad = 0;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    CaseResult r = evaluator_laws(seed);
    if (!r.ok) {
      if (!bad) std::cerr << r.detail << '\n';
      ++bad;
    }
  }
  note = std::to_string(500 - bad) + "/500 instances satisfy every law";
  return bad == 0;
}

bool criterion7(std::string& note) {
  std::size_t events = 0, bad = 0;
  for (const auto& w : sweep()) {
    Spec s = load_spec(w.file);
    for (const auto& ev : w.on.variabilizations) {
      ++events;
      CaseResult r = variabilization_sound(s, w.locs, corpus_config(true), ev);
      if (!r.ok) {
        if (!bad) std::cerr << w.file << ": " << r.detail << '\n';
        ++bad;
      }
    }
  }
  note = std::to_string(events - bad) + "/" + std::to_string(events) + " variabilization prunes confirmed";
  return bad == 0 && events > 0;
}

bool criterion8(std::string& note) {
  Spec s = load_spec("figures/list.rspec");
  const auto locs = marked_locations(s);
  const std::size_t a = generate_mutants(s, locs[0]).size(), b = generate_mutants(s, locs[1]).size();
  note = describe(s, locs[0]) + " " + std::to_string(a) + ", " + describe(s, locs[1]) + " " + std::to_string(b);
  auto in_band = [](std::size_t n) { return n >= 60 && n <= 260; };
  return in_band(a) && in_band(b) && a == 64 && b == 96;
}

bool criterion9(std::string& note) {
  Spec s = load_spec("figures/list.rspec");
  const auto locs = read_locations(s, slurp("figures/list.locs"));
  RepairOutcome x = list_repair(s, locs), y = list_repair(s, locs);
  const std::string rx = list_report(s, locs, x), ry = list_report(s, locs, y);
  const bool ok = rx == ry && patch_text(x) == patch_text(y) && !patch_text(x).empty();
  note = std::to_string(rx.size()) + " report bytes" + (ok ? ", identical" : ", differ");
  return ok;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<bool(std::string&)>>> criteria = {
      {"list figure repaired and re-verified", criterion1},
      {"pruning on/off identical on the corpus", criterion2},
      {"pruning payoff", criterion3},
      {"geometric accounting", criterion4},
      {"solver matches reference enumeration", criterion5},
      {"evaluator laws", criterion6},
      {"variabilization soundness", criterion7},
      {"mutant band and goldens", criterion8},
      {"deterministic reports", criterion9},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    std::string note;
    bool ok = false;
    try {
      ok = criteria[i].second(note);
    } catch (const std::exception& e) {
      note = std::string("exception: ") + e.what();
    }
    failures += !ok;
    std::printf("criterion %zu %s: %s (%s)\n", i + 1, ok ? "PASS" : "FAIL", criteria[i].first, note.c_str());
    std::fflush(stdout);
  }
  return failures;
}
