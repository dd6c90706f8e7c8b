// relfix: fault detection and mutation-based repair of relational specifications.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "relfix/analysis.hpp"
#include "relfix/errors.hpp"
#include "relfix/mutation.hpp"
#include "relfix/parser.hpp"
#include "relfix/printer.hpp"
#include "relfix/repair.hpp"
#include "relfix/report.hpp"

using namespace relfix;

namespace {

enum Exit { kFixed = 0, kUsage = 1, kExhausted = 2, kTimeout = 3, kNoFault = 4 };

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

Spec load(const std::string& path) {
  Spec s = parse(slurp(path), path);
  typecheck_spec(s);
  return s;
}

void parse_scopes(const std::vector<std::string>& items, RepairConfig& cfg) {
  for (const auto& it : items) {
    auto eq = it.find('=');
    if (eq == std::string::npos || eq == 0) throw CLI::ValidationError("--scope", "expected SIG=N[!]");
    std::string num = it.substr(eq + 1);
    SigScope sc;
    if (!num.empty() && num.back() == '!') {
      sc.exact = true;
      num.pop_back();
    }
    try {
      std::size_t used = 0;
      sc.count = std::stoi(num, &used);
      if (used != num.size() || sc.count < 0) throw std::invalid_argument(num);
    } catch (const std::logic_error&) {
      throw CLI::ValidationError("--scope", "bad count in " + it);
    }
    cfg.scope_overrides[it.substr(0, eq)] = sc;
  }
}

void parse_prune(const std::string& p, RepairConfig& cfg) {
  cfg.prune = {false, false};
  if (p == "all") cfg.prune = {true, true};
  else if (p == "none") return;
  else {
    std::stringstream ss(p);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item == "partial") cfg.prune.partial_repair = true;
      else if (item == "variabilization") cfg.prune.variabilization = true;
      else throw CLI::ValidationError("--prune", "unknown pruning strategy " + item);
    }
  }
}

std::vector<Location> locations(const Spec& s, const std::string& locs) {
  if (locs.empty()) return marked_locations(s);
  if (std::filesystem::is_regular_file(locs)) return read_locations(s, slurp(locs));
  std::string text = locs;
  for (char& c : text)
    if (c == ',' || c == ';') c = '\n';
  return read_locations(s, text);
}

void print_verdicts(const std::vector<OracleVerdict>& vs) {
  for (const auto& v : vs) std::cout << v.command << ": " << v.verdict << (v.pass ? " (pass)" : " (fail)") << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fault detection and bounded mutation-based repair for relational specifications"};
  app.require_subcommand(1);

  RepairConfig cfg;
  std::string file, locs_arg, prune = "all", report_path, dump_marker, output;
  std::vector<std::string> scopes;
  int bitwidth = 0;

  auto* rep = app.add_subcommand("repair", "search for a patch of the suspicious locations");
  rep->add_option("file", file, "specification")->required();
  rep->add_option("--locs", locs_arg, "location file or comma separated markers; default: //@loc comments");
  rep->add_option("--max-depth", cfg.max_depth, "mutation depth bound per location")->check(CLI::Range(1, 16));
  rep->add_option("--timeout", cfg.timeout, "seconds")->check(CLI::PositiveNumber);
  rep->add_option("--prune", prune, "partial,variabilization | all | none");
  rep->add_option("--scope", scopes, "SIG=N or SIG=N! (exact), applied to every oracle");
  rep->add_option("--bitwidth", bitwidth, "integer bitwidth for every oracle")->check(CLI::Range(1, 6));
  rep->add_flag("--deterministic", cfg.deterministic, "single worker, in-order traversal, no timings");
  rep->add_option("--jobs", cfg.jobs, "worker threads")->check(CLI::Range(1, 256));
  rep->add_option("--witness-cap", cfg.witness_cap, "largest witness relation tried by variabilization");
  rep->add_option("--report", report_path, "write the run report here");
  rep->add_option("--dump-mutants", dump_marker, "print the depth-1 mutants of a location and exit");
  rep->add_option("--output", output, "write the patched specification here");

  auto* chk = app.add_subcommand("check", "run the oracle commands");
  chk->add_option("file", file, "specification")->required();
  chk->add_option("--scope", scopes, "SIG=N or SIG=N! (exact), applied to every oracle");
  chk->add_option("--bitwidth", bitwidth, "integer bitwidth for every oracle")->check(CLI::Range(1, 6));

  cfg.deterministic = false;
  try {
    app.parse(argc, argv);
    parse_scopes(scopes, cfg);
    if (*rep) parse_prune(prune, cfg);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }
  if (bitwidth) cfg.bitwidth = bitwidth;
  if (cfg.deterministic) cfg.jobs = 1;

  try {
    const Spec original = load(file);
    const Spec s = with_scope_overrides(original, cfg);

    if (*chk) {
      auto vs = oracle_verdicts(s);
      print_verdicts(vs);
      for (const auto& v : vs)
        if (!v.pass) return 0;
      return kNoFault;
    }

    if (!dump_marker.empty()) {
      for (const auto& m : generate_mutants(s, resolve_location(s, dump_marker)))
        std::cout << to_string(m.node) << '\n';
      return 0;
    }

    const auto locs = locations(s, locs_arg);
    if (locs.empty()) throw LocationError(LocationError::Kind::BadMarker, "no suspicious locations");
    const auto t0 = std::chrono::steady_clock::now();
    ReportInput in;
    in.input = file;
    in.spec = &s;
    in.locations = locs;
    in.config = cfg;
    in.before = oracle_verdicts(s);
    if (std::all_of(in.before.begin(), in.before.end(), [](const OracleVerdict& v) { return v.pass; })) {
      print_verdicts(in.before);
      std::cout << "no fault detected\n";
      return kNoFault;
    }

    RepairConfig run_cfg = cfg;
    run_cfg.scope_overrides.clear();
    run_cfg.bitwidth.reset();
    const RepairOutcome out = repair(s, locs, run_cfg);
    if (out.verdict == Verdict::Fixed) in.after = oracle_verdicts(*out.patched);
    if (!cfg.deterministic)
      in.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    in.outcome = &out;
    const std::string report = render_report(in);
    std::cout << report;
    if (!report_path.empty()) spit(report_path, report);
    if (out.verdict == Verdict::Fixed && !output.empty()) spit(output, pretty_print(*out.patched));
    switch (out.verdict) {
      case Verdict::Fixed: return kFixed;
      case Verdict::SpaceExhausted: return kExhausted;
      case Verdict::Timeout: return kTimeout;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.describe() << '\n';
    return kUsage;
  }
  return kUsage;
}
