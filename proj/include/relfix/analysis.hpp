#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "relfix/ast.hpp"
#include "relfix/location.hpp"

namespace relfix {

/// Set of top-level sig families (one bit each) plus the Int column.
using Domain = std::uint64_t;
inline constexpr Domain kIntDomain = Domain{1} << 62;

/// Column-wise type of a relational expression. An all-zero column means the
/// expression denotes the empty relation by typing.
struct RelType {
  std::vector<Domain> cols;

  std::size_t arity() const noexcept { return cols.size(); }
  bool empty() const noexcept;
  friend bool operator==(const RelType&, const RelType&) = default;
};

/// Per-spec typing tables: sig families and field column types.
class TypeEnv {
 public:
  explicit TypeEnv(const Spec& s);

  const Spec& spec() const noexcept { return *spec_; }
  Domain univ() const noexcept { return univ_; }
  /// Domain of a sig name or "Int".
  Domain domain_of(const std::string& sig) const;
  std::size_t family_of(const std::string& sig) const { return family_.at(sig); }
  const std::vector<std::string>& families() const noexcept { return family_names_; }
  bool is_sig(const std::string& name) const { return family_.count(name) > 0; }
  const RelType* field_type(const std::string& name) const;
  std::string describe(Domain d) const;
  std::string describe(const RelType& t) const;

 private:
  const Spec* spec_;
  Domain univ_ = kIntDomain;
  std::map<std::string, std::size_t> family_;
  std::vector<std::string> family_names_;
  std::map<std::string, RelType> fields_;
};

/// Variables visible at a position, outermost first.
using Context = std::vector<std::pair<std::string, RelType>>;

/// Type checker over one spec. `expr`/`formula` throw TypeError on arity
/// errors, closure on a non-binary relation, or Int comparison on non-Int.
class TypeChecker {
 public:
  explicit TypeChecker(const TypeEnv& env) : env_(env) {}

  RelType expr(const Node& n, Context& ctx);
  void formula(const Node& n, Context& ctx);
  /// Type-checks either sort; returns the arity-0 type for formulas.
  RelType any(const Node& n, Context& ctx);

  /// Set when some subterm is empty or contradictory by typing alone.
  bool degenerate() const noexcept { return degenerate_; }
  void reset_degenerate() noexcept { degenerate_ = false; }

  void record_into(std::unordered_map<const Node*, RelType>* m) { record_ = m; }

 private:
  const TypeEnv& env_;
  bool degenerate_ = false;
  std::unordered_map<const Node*, RelType>* record_ = nullptr;

  RelType expr_impl(const Node& n, Context& ctx);
  void note(const Node& n, const RelType& t);
  void binders(const Node& n, Context& ctx, std::size_t& pushed);
};

struct TypeInfo {
  std::unordered_map<const Node*, RelType> types;
};

/// Types every expression node of a spec. Throws TypeError at the first error.
TypeInfo typecheck_spec(const Spec& s);

/// Context visible at `steps` inside declaration `d` (parameters first, then
/// binders outermost first). Shadowed names keep only the innermost binding.
Context context_at(const TypeEnv& env, DeclRef d, const std::vector<std::uint32_t>& steps);

/// Context and most general witness type for a location: the context columns,
/// followed by `univ` columns for the location's arity when it is an expression.
std::pair<Context, RelType> bounding_type(const Spec& s, const Location& loc);

/// Declarations a command reaches: its own pred/assert, every fact, and every
/// predicate called transitively.
std::vector<DeclRef> referenced_decls(const Spec& s, const Command& cmd);

/// Suspicious locations that lie inside declarations the command reaches.
std::vector<Location> check_dependencies(const Spec& s, const Command& cmd,
                                         const std::vector<Location>& locs);

}  // namespace relfix
