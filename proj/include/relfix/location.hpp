#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "relfix/ast.hpp"

namespace relfix {

/// A mutable position in a spec. Identified by its structural path; the span
/// is kept for reporting only.
struct Location {
  NodePath path;
  Sort sort = Sort::Formula;
  SourceSpan span;

  friend bool operator==(const Location& a, const Location& b) { return a.path == b.path; }
  friend bool operator<(const Location& a, const Location& b) { return a.path < b.path; }
};

/// "Sorted/0/1" style name of a location.
std::string describe(const Spec& s, const Location& loc);

/// Resolves a marker: either a span "file:line:col..line:col" (file optional)
/// or a named path "Decl/i/j". Throws LocationError.
Location resolve_location(const Spec& s, std::string_view marker);

/// Location of a structural path; throws LocationError if it is unusable.
Location location_of(const Spec& s, const NodePath& path);

/// Locations given inline with `//@loc`.
std::vector<Location> marked_locations(const Spec& s);

/// Reads a location sidecar: one marker per line, '#' starts a comment.
std::vector<Location> read_locations(const Spec& s, std::string_view text);

/// One replacement per location.
using Patch = std::vector<std::pair<Location, NodePtr>>;

/// Copy of `s` with each location's subtree replaced. Replacements must have
/// the location's sort and, for expressions, its arity; otherwise TypeError.
/// A replacement for a whole declaration body is wrapped into a block.
Spec apply_patch(const Spec& s, const Patch& patch);

/// Replacement in the shape it takes at `loc` (bodies stay blocks).
NodePtr normalize_replacement(const Location& loc, NodePtr replacement);

}  // namespace relfix
