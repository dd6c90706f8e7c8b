#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/container_hash/hash.hpp>

#include "relfix/ast.hpp"
#include "relfix/instance.hpp"
#include "relfix/location.hpp"
#include "relfix/mutation.hpp"
#include "relfix/solver.hpp"

namespace relfix {

struct PruneFlags {
  bool partial_repair = true;
  bool variabilization = true;
};

using MutatorFactory =
    std::function<std::shared_ptr<const Mutator>(const Spec&, const Location&)>;

struct RepairConfig {
  std::size_t max_depth = 2;
  double timeout = 3600;
  PruneFlags prune;
  std::size_t witness_cap = 24;
  bool deterministic = true;
  int jobs = 1;
  /// Applied to every oracle command: sig overrides are merged, bitwidth replaced when set.
  std::map<std::string, SigScope> scope_overrides;
  std::optional<int> bitwidth;
  /// Null selects the operator catalog.
  MutatorFactory mutator;
};

/// Mutant id per location: 0 keeps the original, k >= 1 is stream entry k-1.
using Assignment = std::vector<std::uint32_t>;

enum class PruneReason : std::uint8_t { PartialRepair, Variabilization };

struct PruneRecord {
  std::uint64_t mask = 0;        // locations fixed by the fragment
  Assignment fragment;           // ids, only meaningful where mask is set
  PruneReason reason = PruneReason::PartialRepair;
  std::size_t command = 0;       // index into Spec::commands
};

/// Fragment store; an assignment is skipped when it extends any record.
class PruneSet {
 public:
  /// False when an equal fragment was already present.
  bool add(const PruneRecord& r);
  /// A record the assignment extends, considering only fragments whose
  /// locations lie within `within`.
  const PruneRecord* match(const Assignment& a, std::uint64_t within = ~std::uint64_t{0}) const;
  std::size_t size() const noexcept { return count_; }

 private:
  struct Group {
    std::uint64_t mask;
    std::vector<PruneRecord> records;
    std::unordered_map<Assignment, std::size_t, boost::hash<Assignment>> index;
  };
  std::vector<Group> groups_;
  std::size_t count_ = 0;
};

bool prune_filter(const Assignment& a, const PruneSet& records);

struct OracleFailure {
  std::size_t command = 0;
  CommandResult result;
};

/// Oracle commands whose outcome contradicts their expectation.
std::vector<OracleFailure> detect_faults(const Spec& s, const Deadline& deadline = {});

/// Copy of `s` with the configured scope overrides applied to every command.
Spec with_scope_overrides(const Spec& s, const RepairConfig& cfg);

/// Record for a failed command whose dependencies are a proper subset of the
/// locations; nullopt otherwise.
std::optional<PruneRecord> partial_repair_prune(const Spec& s, const Assignment& a, std::size_t cmd,
                                                const std::vector<Location>& locs);

/// Witness search on `cex` with `locs[target]` variabilized in `patched`.
/// A record fixing every other dependent location when no witness rescues the
/// check; nullopt on rescue or Unknown.
std::optional<PruneRecord> variabilization_prune(const Spec& patched, const Assignment& a, std::size_t cmd,
                                                 const Instance& cex, const std::vector<Location>& locs,
                                                 std::size_t target, std::size_t cap,
                                                 WitnessResult* result = nullptr,
                                                 const Deadline& deadline = {});

enum class Verdict : std::uint8_t { Fixed, SpaceExhausted, Timeout };
std::string_view to_string(Verdict v);

struct RepairStats {
  std::uint64_t generated = 0;  // candidate assignments produced by the traversal
  std::uint64_t visited = 0;    // evaluated against the oracles
  std::uint64_t pruned = 0;     // skipped by a prune record
  std::uint64_t remaining = 0;  // produced but neither visited nor pruned at timeout
  std::uint64_t pruned_partial = 0;
  std::uint64_t pruned_variabilization = 0;
  std::uint64_t records_partial = 0;
  std::uint64_t records_variabilization = 0;
  std::uint64_t witness_unknown = 0;
  std::uint64_t solver_calls = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t mutants = 0;    // distinct mutants materialized over all locations

  friend bool operator==(const RepairStats&, const RepairStats&) = default;
};

/// Every variabilization prune that fired, for offline soundness checks.
struct VariabilizationEvent {
  Assignment assignment;
  std::size_t command = 0;
  std::size_t location = 0;
};

struct RepairOutcome {
  Verdict verdict = Verdict::SpaceExhausted;
  Assignment assignment;            // when Fixed
  std::optional<Spec> patched;      // when Fixed
  std::vector<NodePtr> replacements;  // per location, when Fixed
  std::size_t total_depth = 0;      // when Fixed
  std::string cause;                // when Timeout
  RepairStats stats;
  std::vector<VariabilizationEvent> variabilizations;
};

/// Breadth-first search over per-location mutant streams for an assignment
/// passing every oracle. `s` must stay alive for the call.
RepairOutcome repair(const Spec& s, const std::vector<Location>& locs, const RepairConfig& cfg);

/// Patch of `s` realizing assignment `a`; for use outside the engine.
Patch assignment_patch(const std::vector<Location>& locs, const std::vector<NodePtr>& replacements);

}  // namespace relfix
