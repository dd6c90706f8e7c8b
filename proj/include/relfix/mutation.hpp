#pragma once

#include <cstdint>
#include <memory>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "relfix/analysis.hpp"
#include "relfix/ast.hpp"
#include "relfix/location.hpp"

namespace relfix {

/// Mutation operator catalog, in generation order: operator replacements
/// first, then structural edits.
enum class MutOp : std::uint8_t {
  LogicReplace,      // && || => <=>
  CompareReplace,    // in !in = != < <= > >=; same family first
  SetOpReplace,      // + - &
  QuantReplace,      // all some one lone no
  MultReplace,       // no one lone some (formula prefix)
  UnaryReplace,      // among ~ ^ *
  ProductJoinSwap,   // a.b <-> a->b
  OperandSwap,       // non-commutative binary operators
  VarReplace,        // variable -> another variable in scope
  FieldReplace,      // field -> another field
  SigConstReplace,   // sig, univ, none, Int or a variable -> a sig constant
  IntNudge,          // k -> k-1, k+1
  JoinExtendRight,   // e -> e.f
  JoinExtendLeft,    // e -> f.e
  JoinTruncate,      // e.f -> e
  UnaryInsert,       // e -> ~e ^e *e
  UnaryRemove,       // ~e ^e *e -> e
  NegInsert,         // F -> !F
  NegRemove,         // !F -> F
  ToTrue,            // F -> {}
  ToFalse,           // F -> !{}
};
inline constexpr std::size_t kMutOpCount = 21;
std::string_view mut_op_name(MutOp op);

struct Mutant {
  NodePtr node;
  std::vector<MutOp> lineage;  // size is the depth
  std::size_t depth() const noexcept { return lineage.size(); }
};

/// Context shared by every mutant of one location.
class MutationSite {
 public:
  MutationSite(const Spec& s, const Location& loc);

  const Spec& spec() const noexcept { return *spec_; }
  const Location& location() const noexcept { return loc_; }
  const NodePtr& original() const noexcept { return original_; }
  const Context& context() const noexcept { return ctx_; }
  std::size_t arity() const noexcept { return arity_; }
  int bitwidth() const noexcept { return bitwidth_; }
  const TypeEnv& env() const noexcept { return env_; }

  /// Typechecks, keeps sort and arity, and rejects empty-typed or stacked terms.
  bool acceptable(const NodePtr& candidate) const;

 private:
  const Spec* spec_;
  Location loc_;
  TypeEnv env_;
  NodePtr original_;
  Context ctx_;
  std::size_t arity_ = 0;
  int bitwidth_ = 4;
};

/// Source of children of a mutant. The catalog is the production mutator;
/// tests plug in synthetic ones.
class Mutator {
 public:
  virtual ~Mutator() = default;
  /// Children of `parent` in deterministic order, before de-duplication.
  virtual std::vector<Mutant> children(const Mutant& parent) const = 0;
};

class CatalogMutator : public Mutator {
 public:
  explicit CatalogMutator(std::shared_ptr<const MutationSite> site) : site_(std::move(site)) {}
  std::vector<Mutant> children(const Mutant& parent) const override;
  const MutationSite& site() const noexcept { return *site_; }

 private:
  std::shared_ptr<const MutationSite> site_;
};

/// All well-formed single-application mutants of the location, catalog
/// order first, then pre-order position.
std::vector<Mutant> generate_mutants(const Spec& s, const Location& loc);

/// Re-runs the mutant filter in isolation.
bool is_well_formed_mutant(const Spec& s, const Location& loc, const NodePtr& m);

/// Lazy breadth-first stream of de-duplicated mutants up to `max_depth`.
/// Depth k+1 is only generated once depth k has been consumed.
class MutantStream {
 public:
  MutantStream(std::shared_ptr<const Mutator> mutator, NodePtr original, std::size_t max_depth);

  /// Mutant number i, generating levels as needed; null past the end.
  const Mutant* at(std::size_t i);
  /// Number of mutants with depth <= d (generates up to d).
  std::size_t count_upto(std::size_t d);
  std::size_t max_depth() const noexcept { return max_depth_; }
  std::size_t generated() const noexcept { return items_.size(); }

 private:
  std::shared_ptr<const Mutator> mutator_;
  std::size_t max_depth_;
  std::vector<Mutant> items_;
  std::vector<std::size_t> level_end_;  // items_[level_end_[k-1], level_end_[k]) have depth k; items_[0] is the original
  std::unordered_set<NodePtr, NodeHash, NodeEq> seen_;

  bool grow();
};

}  // namespace relfix
