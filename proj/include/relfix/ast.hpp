#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "relfix/source.hpp"

namespace relfix {

enum class Sort : std::uint8_t { Expr, Formula };

// Expressions and formulas share one node type; the op decides the sort.
enum class Op : std::uint8_t {
  // expressions
  Ref,        // sig, field, parameter or bound variable, by name
  IntLit,
  Iden,
  Univ,
  None,
  IntUniv,    // the Int sig
  Union,
  Diff,
  Inter,
  Join,
  Product,
  Transpose,
  Closure,
  RClosure,
  Card,
  Compr,      // {x: e, y: e | F}
  Witness,    // internal: variabilized location
  // formulas
  In,
  NotIn,
  Eq,
  Neq,
  Lt,
  Le,
  Gt,
  Ge,
  And,
  Or,
  Implies,
  Iff,
  Not,
  QAll,
  QSome,
  QOne,
  QLone,
  QNo,
  MNo,
  MOne,
  MLone,
  MSome,
  PredCall,
  Block,      // { F1 F2 ... }, n-ary conjunction; the empty block is true
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

/// Immutable AST node. Children are shared between trees, so patching a
/// subtree only copies the spine above it.
struct Node {
  Op op = Op::None;
  std::string name;               // Ref target, PredCall callee
  std::vector<std::string> vars;  // binders of Q*/Compr; context vars of Witness
  std::int64_t value = 0;         // IntLit value; Witness: expression arity (0 = formula)
  std::vector<NodePtr> kids;      // Q*/Compr: one bound per var, then the body
  SourceSpan span;

  Sort sort() const noexcept;
  bool is_binary_expr() const noexcept;
  bool is_compare() const noexcept;
  bool is_quantifier() const noexcept;
  bool is_multiplicity() const noexcept;
  bool is_logic_binary() const noexcept;
  bool is_unary_rel() const noexcept;

  const NodePtr& body() const { return kids.back(); }
};

NodePtr make_node(Op op, std::vector<NodePtr> kids = {}, SourceSpan span = {});
NodePtr make_ref(std::string name, SourceSpan span = {});
NodePtr make_int(std::int64_t v, SourceSpan span = {});
NodePtr make_binder(Op op, std::vector<std::string> vars, std::vector<NodePtr> kids,
                    SourceSpan span = {});
NodePtr make_call(std::string name, std::vector<NodePtr> args, SourceSpan span = {});
/// Copy of `n` with different children.
NodePtr with_kids(const Node& n, std::vector<NodePtr> kids);
NodePtr with_op(const Node& n, Op op);

NodePtr make_true();   // {}
NodePtr make_false();  // !{}

/// Structural equality: ignores spans.
bool equal(const Node& a, const Node& b);
bool equal(const NodePtr& a, const NodePtr& b);
std::size_t structural_hash(const Node& n);

struct NodeHash {
  std::size_t operator()(const NodePtr& n) const { return structural_hash(*n); }
};
struct NodeEq {
  bool operator()(const NodePtr& a, const NodePtr& b) const { return equal(*a, *b); }
};

std::string_view op_symbol(Op op);
std::string_view op_name(Op op);

// ---------------------------------------------------------------------------
// Declarations

enum class SigQual : std::uint8_t { None, Abstract, One };
enum class FieldMult : std::uint8_t { Set, One, Lone };

struct FieldDecl {
  std::string name;
  FieldMult mult = FieldMult::Set;
  std::string range;  // sig name or "Int"
  SourceSpan span;
};

/// One `sig` declaration; `one sig True, False extends Boolean {}` declares two names.
struct SigDecl {
  std::vector<std::string> names;
  SigQual qual = SigQual::None;
  std::optional<std::string> parent;
  std::vector<FieldDecl> fields;
  SourceSpan span;
};

struct Param {
  std::string name;
  std::string type;  // sig name or "Int"
};

struct FactDecl {
  std::string name;  // may be empty
  NodePtr body;
  SourceSpan span;
};

struct PredDecl {
  std::string name;
  std::vector<Param> params;
  NodePtr body;
  SourceSpan span;
};

struct AssertDecl {
  std::string name;
  NodePtr body;
  SourceSpan span;
};

struct SigScope {
  int count = 0;
  bool exact = false;
  friend bool operator==(const SigScope&, const SigScope&) = default;
};

struct Scope {
  int default_count = 3;
  std::map<std::string, SigScope> overrides;
  int bitwidth = 4;
  friend bool operator==(const Scope&, const Scope&) = default;
};

enum class CmdKind : std::uint8_t { Run, Check };
enum class Expect : std::uint8_t { Sat, Unsat, Valid };

struct Command {
  CmdKind kind = CmdKind::Run;
  std::string target;
  Scope scope;
  Expect expect = Expect::Sat;
  bool is_oracle = true;
  SourceSpan span;

  std::string label() const;  // "run RepOk", "check ContainsCorrect"
};

enum class DeclKind : std::uint8_t { Fact, Pred, Assert };

/// Which formula-bearing declaration a path starts in.
struct DeclRef {
  DeclKind kind = DeclKind::Pred;
  std::uint32_t index = 0;
  friend auto operator<=>(const DeclRef&, const DeclRef&) = default;
};

/// Structural position of a node: a declaration plus child indices from its body.
struct NodePath {
  DeclRef decl;
  std::vector<std::uint32_t> steps;
  friend auto operator<=>(const NodePath&, const NodePath&) = default;
};

struct Spec {
  std::vector<SigDecl> sigs;
  std::vector<FactDecl> facts;
  std::vector<PredDecl> preds;
  std::vector<AssertDecl> asserts;
  std::vector<Command> commands;
  /// Nodes marked with an inline `//@loc` comment, in source order.
  std::vector<NodePath> marked;
  std::shared_ptr<const std::string> file;

  const NodePtr& body(DeclRef d) const;
  std::string decl_name(DeclRef d) const;
  std::vector<DeclRef> formula_decls() const;

  const PredDecl* find_pred(std::string_view name) const;
  const AssertDecl* find_assert(std::string_view name) const;
  std::optional<std::uint32_t> pred_index(std::string_view name) const;
  std::optional<std::uint32_t> assert_index(std::string_view name) const;
  const SigDecl* find_sig(std::string_view name) const;
  const FieldDecl* find_field(std::string_view name, const SigDecl** owner = nullptr,
                              std::string* owner_name = nullptr) const;
  std::vector<std::string> sig_names() const;
  std::vector<const Command*> oracles() const;
};

/// Structural equality of whole specs (spans ignored).
bool equal(const Spec& a, const Spec& b);

/// Node reached by following `path`; null when the path does not resolve.
NodePtr node_at(const Spec& s, const NodePath& path);
/// Node reached by following `steps` from `root`.
NodePtr node_at(const NodePtr& root, const std::vector<std::uint32_t>& steps);
/// Copy of `root` with the node at `steps` replaced.
NodePtr replace_at(const NodePtr& root, const std::vector<std::uint32_t>& steps,
                   NodePtr replacement, std::size_t depth = 0);
Spec with_body(const Spec& s, DeclRef d, NodePtr body);

/// Pre-order visit; `fn(node, steps)`.
template <class Fn>
void visit(const NodePtr& root, Fn&& fn) {
  std::vector<std::uint32_t> steps;
  auto rec = [&](auto& self, const NodePtr& n) -> void {
    fn(n, steps);
    for (std::uint32_t i = 0; i < n->kids.size(); ++i) {
      steps.push_back(i);
      self(self, n->kids[i]);
      steps.pop_back();
    }
  };
  rec(rec, root);
}

}  // namespace relfix
