#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "relfix/ast.hpp"
#include "relfix/location.hpp"
#include "relfix/repair.hpp"

namespace relfix {

/// Unified diff of two texts, line based, three lines of context.
std::string unified_diff(std::string_view a, std::string_view b, std::string_view name_a,
                         std::string_view name_b);

struct OracleVerdict {
  std::string command;  // Command::label()
  std::string verdict;  // SAT, UNSAT, VALID or CEX
  bool pass = false;
};

struct ReportInput {
  std::string input;
  const Spec* spec = nullptr;
  std::vector<Location> locations;
  RepairConfig config;
  std::vector<OracleVerdict> before;
  std::vector<OracleVerdict> after;  // when Fixed
  const RepairOutcome* outcome = nullptr;
  std::optional<double> wall_ms;     // left out in deterministic mode
};

/// `key: value` lines followed by the patch as a unified diff.
std::string render_report(const ReportInput& r);

/// Reads the `stats.*` lines back.
RepairStats parse_report_stats(std::string_view report);

std::vector<OracleVerdict> oracle_verdicts(const Spec& s, const Deadline& deadline = {});

}  // namespace relfix
