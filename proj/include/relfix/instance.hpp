#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "relfix/ast.hpp"
#include "relfix/tuple_set.hpp"

namespace relfix {

/// Atoms reserved for one sig name (not its children).
struct Pool {
  std::string sig;
  std::uint32_t first = 0;
  std::uint32_t size = 0;
  std::uint32_t min = 0;  // 1 for `one` sigs
};

enum class RelKind : std::uint8_t { Sig, Field };

struct RelInfo {
  std::string name;
  RelKind kind = RelKind::Sig;
  std::uint32_t arity = 1;
  int owner = -1;  // Field: relation id of the owning sig
  int range = -1;  // Field: relation id of the range sig, or -1 for Int
  FieldMult mult = FieldMult::Set;
};

/// Upper bound on the size of a sig's extent.
struct SigBound {
  int rel = 0;
  std::uint32_t count = 0;
  bool exact = false;
};

/// Finite universe realising a scope: atom pools per sig, then the Int atoms.
struct Universe {
  std::vector<std::string> atom_names;
  std::vector<std::int64_t> atom_value;  // Int atoms only
  std::uint64_t int_mask = 0;
  int bitwidth = 4;
  std::int64_t int_min = 0;
  std::int64_t int_max = 0;

  std::vector<Pool> pools;
  std::vector<RelInfo> rels;                 // sigs first, then fields
  std::map<std::string, int> rel_index;
  std::vector<std::vector<int>> sig_pools;   // by sig relation id: pools in its subtree
  std::vector<int> atom_family;              // top-level sig family per atom, -1 for Int
  std::vector<SigBound> bounds;

  std::uint32_t size() const noexcept { return static_cast<std::uint32_t>(atom_names.size()); }
  int rel(const std::string& name) const;
  /// Atom holding integer v after wraparound.
  std::uint32_t int_atom(std::int64_t v) const;
  std::int64_t wrap(std::int64_t v) const;
  std::uint64_t pool_mask(const Pool& p, std::uint32_t count) const;

  /// Builds the universe of `s` under `scope`. Throws ResourceError when the
  /// scope is beyond the in-process search.
  static std::shared_ptr<const Universe> build(const Spec& s, const Scope& scope);
};

/// One valuation of every sig extent and field.
struct Instance {
  std::shared_ptr<const Universe> universe;
  std::vector<TupleSet> rels;

  /// Atoms that exist in this instance: sig extents plus all Int atoms.
  std::uint64_t univ() const;
  /// "rel = {(a,b), ...}" per relation, sorted by name; tuples sorted.
  std::string str() const;
};

}  // namespace relfix
