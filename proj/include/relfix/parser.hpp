#pragma once

#include <string>
#include <string_view>

#include "relfix/ast.hpp"

namespace relfix {

/// Parses a specification and resolves every name in it.
///
/// Throws ParseError on syntax errors (with the span of the offending token
/// and the tokens that were expected), ResolveError on duplicate or unknown
/// names, and LocationError when an inline `//@loc` marker does not precede
/// a mutable expression or formula.
Spec parse(std::string_view source, std::string file_name = "<input>");

/// Parses one standalone expression or formula (used for replacement text).
/// Names are not resolved.
NodePtr parse_node(std::string_view source);

/// Checks names, extends graph, predicate calls and commands.
void resolve(const Spec& s);

}  // namespace relfix
