#pragma once

#include <string>

#include "relfix/ast.hpp"

namespace relfix {

/// Canonical text of a whole specification. Deterministic; re-parses to a
/// structurally equal Spec, including `//@loc` and `//@oracle` markers.
std::string pretty_print(const Spec& s);

/// Single-line text of one expression or formula.
std::string to_string(const Node& n);
inline std::string to_string(const NodePtr& n) { return to_string(*n); }

}  // namespace relfix
