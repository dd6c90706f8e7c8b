#include "relfix/report.hpp"

#include <charconv>
#include <sstream>

#include "relfix/errors.hpp"
#include "relfix/printer.hpp"

namespace relfix {

namespace {

std::vector<std::string_view> lines(std::string_view s) {
  std::vector<std::string_view> out;
  while (!s.empty()) {
    auto nl = s.find('\n');
    out.push_back(s.substr(0, nl));
    if (nl == std::string_view::npos) break;
    s.remove_prefix(nl + 1);
  }
  return out;
}

struct Stat {
  std::string_view key;
  std::uint64_t RepairStats::*field;
};

constexpr Stat kStats[] = {
    {"generated", &RepairStats::generated},
    {"visited", &RepairStats::visited},
    {"pruned", &RepairStats::pruned},
    {"remaining", &RepairStats::remaining},
    {"pruned_partial", &RepairStats::pruned_partial},
    {"pruned_variabilization", &RepairStats::pruned_variabilization},
    {"records_partial", &RepairStats::records_partial},
    {"records_variabilization", &RepairStats::records_variabilization},
    {"witness_unknown", &RepairStats::witness_unknown},
    {"solver_calls", &RepairStats::solver_calls},
    {"cache_hits", &RepairStats::cache_hits},
    {"mutants", &RepairStats::mutants},
};

}  // namespace

std::string unified_diff(std::string_view a, std::string_view b, std::string_view name_a,
                         std::string_view name_b) {
  const auto x = lines(a), y = lines(b);
  const std::size_t n = x.size(), m = y.size();
  std::vector<std::vector<std::uint32_t>> lcs(n + 1, std::vector<std::uint32_t>(m + 1, 0));
  for (std::size_t i = n; i-- > 0;)
    for (std::size_t j = m; j-- > 0;)
      lcs[i][j] = x[i] == y[j] ? lcs[i + 1][j + 1] + 1 : std::max(lcs[i + 1][j], lcs[i][j + 1]);

  struct Edit {
    char tag;
    std::size_t i, j;  // positions in a and b before this line
  };
  std::vector<Edit> script;
  std::size_t i = 0, j = 0;
  while (i < n || j < m) {
    if (i < n && j < m && x[i] == y[j]) script.push_back({' ', i++, j++});
    else if (i < n && (j == m || lcs[i + 1][j] >= lcs[i][j + 1])) script.push_back({'-', i++, j});
    else script.push_back({'+', i, j++});
  }

  std::ostringstream out;
  out << "--- " << name_a << "\n+++ " << name_b << "\n";
  constexpr std::size_t ctx = 3;
  std::size_t k = 0;
  while (k < script.size()) {
    while (k < script.size() && script[k].tag == ' ') ++k;
    if (k == script.size()) break;
    std::size_t start = k >= ctx ? k - ctx : 0, end = k;
    // Extend the hunk while changes are within 2*ctx of each other.
    for (std::size_t p = k; p < script.size(); ++p)
      if (script[p].tag != ' ') {
        if (p > end + 2 * ctx) break;
        end = p;
      }
    end = std::min(script.size(), end + ctx + 1);
    std::size_t la = 0, lb = 0;
    for (std::size_t p = start; p < end; ++p) {
      la += script[p].tag != '+';
      lb += script[p].tag != '-';
    }
    out << "@@ -" << script[start].i + (la ? 1 : 0) << ',' << la << " +" << script[start].j + (lb ? 1 : 0)
        << ',' << lb << " @@\n";
    for (std::size_t p = start; p < end; ++p) {
      const auto& e = script[p];
      out << e.tag << (e.tag == '+' ? y[e.j] : x[e.i]) << '\n';
    }
    k = end;
  }
  return out.str();
}

std::vector<OracleVerdict> oracle_verdicts(const Spec& s, const Deadline& deadline) {
  std::vector<OracleVerdict> out;
  for (const Command* c : s.oracles()) {
    CommandResult r = check_command(s, *c, deadline);
    out.push_back({c->label(), r.verdict(*c), r.pass});
  }
  return out;
}

std::string render_report(const ReportInput& r) {
  const Spec& s = *r.spec;
  const RepairOutcome& o = *r.outcome;
  std::ostringstream out;
  out << "input: " << r.input << '\n';
  out << "locations:";
  for (const auto& l : r.locations) out << ' ' << describe(s, l);
  out << '\n';
  out << "max_depth: " << r.config.max_depth << '\n';
  out << "timeout: " << r.config.timeout << '\n';
  std::string prune;
  if (r.config.prune.partial_repair) prune = "partial";
  if (r.config.prune.variabilization) prune += prune.empty() ? "variabilization" : ",variabilization";
  out << "prune: " << (prune.empty() ? "none" : prune) << '\n';
  out << "witness_cap: " << r.config.witness_cap << '\n';
  out << "deterministic: " << (r.config.deterministic ? "true" : "false") << '\n';
  out << "jobs: " << r.config.jobs << '\n';
  for (const auto& v : r.before)
    out << "before: " << v.command << " = " << v.verdict << (v.pass ? " pass" : " fail") << '\n';
  out << "verdict: " << to_string(o.verdict) << '\n';
  if (o.verdict == Verdict::Timeout) out << "cause: " << o.cause << '\n';
  if (o.verdict == Verdict::Fixed) {
    out << "total_depth: " << o.total_depth << '\n';
    for (std::size_t i = 0; i < r.locations.size(); ++i)
      out << "replacement: " << describe(s, r.locations[i]) << " = " << to_string(o.replacements[i]) << '\n';
    for (const auto& v : r.after)
      out << "after: " << v.command << " = " << v.verdict << (v.pass ? " pass" : " fail") << '\n';
  }
  for (const auto& st : kStats) out << "stats." << st.key << ": " << o.stats.*st.field << '\n';
  if (r.wall_ms) out << "stats.wall_ms: " << static_cast<std::uint64_t>(*r.wall_ms) << '\n';
  if (o.verdict == Verdict::Fixed && o.patched) {
    out << '\n';
    std::string_view name = r.input;
    while (name.starts_with('/')) name.remove_prefix(1);
    out << unified_diff(pretty_print(s), pretty_print(*o.patched), "a/" + std::string(name),
                        "b/" + std::string(name));
  }
  return out.str();
}

RepairStats parse_report_stats(std::string_view report) {
  RepairStats st;
  for (auto line : lines(report)) {
    if (!line.starts_with("stats.")) continue;
    line.remove_prefix(6);
    auto colon = line.find(": ");
    if (colon == std::string_view::npos) continue;
    auto key = line.substr(0, colon), val = line.substr(colon + 2);
    for (const auto& s : kStats) {
      if (s.key != key) continue;
      std::uint64_t v = 0;
      auto [p, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
      if (ec != std::errc() || p != val.data() + val.size()) throw ParseError("bad stats line");
      st.*s.field = v;
    }
  }
  return st;
}

}  // namespace relfix
