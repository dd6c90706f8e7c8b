#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>

#include "relfix/analysis.hpp"
#include "relfix/ast.hpp"
#include "relfix/instance.hpp"
#include "relfix/location.hpp"

namespace relfix {

/// Point in time after which a solve gives up with DeadlineExceeded.
struct Deadline {
  std::chrono::steady_clock::time_point at = std::chrono::steady_clock::time_point::max();

  static Deadline after(double seconds);
  bool passed() const { return std::chrono::steady_clock::now() >= at; }
};

struct SolveResult {
  bool sat = false;
  std::optional<Instance> instance;  // the witness when sat
  std::uint64_t nodes = 0;           // search nodes visited
};

/// Searches the scope for an instance of facts, declared multiplicities and
/// `target`. Deterministic: the first witness in a fixed decision order.
SolveResult solve(const Spec& s, const NodePtr& target, const Scope& scope,
                  const Deadline& deadline = {});

/// Target formula of a command: the pred body under existentially quantified
/// parameters for `run`, the negated assertion body for `check`.
NodePtr command_target(const Spec& s, const Command& cmd);

struct CommandResult {
  SolveResult solve;
  bool pass = false;

  /// "SAT", "UNSAT", "VALID" or "CEX".
  std::string verdict(const Command& cmd) const;
};

CommandResult check_command(const Spec& s, const Command& cmd, const Deadline& deadline = {});

enum class WitnessResult : std::uint8_t { True, False, Unknown };
std::string_view to_string(WitnessResult r);

/// Copy of `s` with `loc` replaced by membership in a fresh witness relation
/// over the location's context.
Spec variabilize(const Spec& s, const Location& loc, const Context& ctx);

/// facts => assertion body, for a check command; the formula a counterexample
/// must stop violating.
NodePtr rescue_target(const Spec& s, const Command& cmd);

/// Whether some value of the witness relation (bounded by `wtype` over the
/// atoms of `inst`) makes `target` true on the fixed instance. Unknown when
/// the witness has more than `cap` candidate tuples or cannot be evaluated.
WitnessResult exists_relation_witness(const Instance& inst, const RelType& wtype, const Context& ctx,
                                      const Spec& s_var, const NodePtr& target, std::size_t cap = 24,
                                      const Deadline& deadline = {});

}  // namespace relfix
