#include "relfix/ast.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "relfix/errors.hpp"

namespace relfix {

std::string SourceSpan::str() const {
  std::ostringstream os;
  if (file) os << *file << ':';
  os << start_line << ':' << start_col << ".." << end_line << ':' << end_col;
  return os.str();
}

std::string Error::describe() const {
  if (!span_.valid()) return what();
  std::ostringstream os;
  if (span_.file) os << *span_.file << ':';
  os << span_.start_line << ':' << span_.start_col << ": " << what();
  return os.str();
}

Sort Node::sort() const noexcept {
  switch (op) {
    case Op::Ref:
    case Op::IntLit:
    case Op::Iden:
    case Op::Univ:
    case Op::None:
    case Op::IntUniv:
    case Op::Union:
    case Op::Diff:
    case Op::Inter:
    case Op::Join:
    case Op::Product:
    case Op::Transpose:
    case Op::Closure:
    case Op::RClosure:
    case Op::Card:
    case Op::Compr:
      return Sort::Expr;
    case Op::Witness:
      return value == 0 ? Sort::Formula : Sort::Expr;
    default:
      return Sort::Formula;
  }
}

bool Node::is_binary_expr() const noexcept {
  return op == Op::Union || op == Op::Diff || op == Op::Inter || op == Op::Join ||
         op == Op::Product;
}
bool Node::is_compare() const noexcept { return op >= Op::In && op <= Op::Ge; }
bool Node::is_quantifier() const noexcept { return op >= Op::QAll && op <= Op::QNo; }
bool Node::is_multiplicity() const noexcept { return op >= Op::MNo && op <= Op::MSome; }
bool Node::is_logic_binary() const noexcept {
  return op == Op::And || op == Op::Or || op == Op::Implies || op == Op::Iff;
}
bool Node::is_unary_rel() const noexcept {
  return op == Op::Transpose || op == Op::Closure || op == Op::RClosure;
}

NodePtr make_node(Op op, std::vector<NodePtr> kids, SourceSpan span) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->kids = std::move(kids);
  n->span = std::move(span);
  return n;
}

NodePtr make_ref(std::string name, SourceSpan span) {
  auto n = std::make_shared<Node>();
  n->op = Op::Ref;
  n->name = std::move(name);
  n->span = std::move(span);
  return n;
}

NodePtr make_int(std::int64_t v, SourceSpan span) {
  auto n = std::make_shared<Node>();
  n->op = Op::IntLit;
  n->value = v;
  n->span = std::move(span);
  return n;
}

NodePtr make_binder(Op op, std::vector<std::string> vars, std::vector<NodePtr> kids,
                    SourceSpan span) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->vars = std::move(vars);
  n->kids = std::move(kids);
  n->span = std::move(span);
  return n;
}

NodePtr make_call(std::string name, std::vector<NodePtr> args, SourceSpan span) {
  auto n = std::make_shared<Node>();
  n->op = Op::PredCall;
  n->name = std::move(name);
  n->kids = std::move(args);
  n->span = std::move(span);
  return n;
}

NodePtr with_kids(const Node& n, std::vector<NodePtr> kids) {
  auto c = std::make_shared<Node>(n);
  c->kids = std::move(kids);
  return c;
}

NodePtr with_op(const Node& n, Op op) {
  auto c = std::make_shared<Node>(n);
  c->op = op;
  return c;
}

NodePtr make_true() { return make_node(Op::Block); }
NodePtr make_false() { return make_node(Op::Not, {make_true()}); }

bool equal(const Node& a, const Node& b) {
  if (&a == &b) return true;
  if (a.op != b.op || a.value != b.value || a.name != b.name || a.vars != b.vars ||
      a.kids.size() != b.kids.size())
    return false;
  for (std::size_t i = 0; i < a.kids.size(); ++i)
    if (!equal(*a.kids[i], *b.kids[i])) return false;
  return true;
}

bool equal(const NodePtr& a, const NodePtr& b) {
  if (!a || !b) return a == b;
  return equal(*a, *b);
}

std::size_t structural_hash(const Node& n) {
  std::size_t h = static_cast<std::size_t>(n.op) * 0x9e3779b97f4a7c15ULL;
  auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
  mix(std::hash<std::int64_t>{}(n.value));
  if (!n.name.empty()) mix(std::hash<std::string>{}(n.name));
  for (const auto& v : n.vars) mix(std::hash<std::string>{}(v));
  for (const auto& k : n.kids) mix(structural_hash(*k));
  return h;
}

std::string_view op_symbol(Op op) {
  switch (op) {
    case Op::Union: return "+";
    case Op::Diff: return "-";
    case Op::Inter: return "&";
    case Op::Join: return ".";
    case Op::Product: return "->";
    case Op::Transpose: return "~";
    case Op::Closure: return "^";
    case Op::RClosure: return "*";
    case Op::Card: return "#";
    case Op::In: return "in";
    case Op::NotIn: return "!in";
    case Op::Eq: return "=";
    case Op::Neq: return "!=";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Gt: return ">";
    case Op::Ge: return ">=";
    case Op::And: return "&&";
    case Op::Or: return "||";
    case Op::Implies: return "=>";
    case Op::Iff: return "<=>";
    case Op::Not: return "!";
    case Op::QAll: return "all";
    case Op::QSome: return "some";
    case Op::QOne: return "one";
    case Op::QLone: return "lone";
    case Op::QNo: return "no";
    case Op::MNo: return "no";
    case Op::MOne: return "one";
    case Op::MLone: return "lone";
    case Op::MSome: return "some";
    case Op::Iden: return "iden";
    case Op::Univ: return "univ";
    case Op::None: return "none";
    case Op::IntUniv: return "Int";
    default: return "";
  }
}

std::string_view op_name(Op op) {
  switch (op) {
    case Op::Ref: return "ref";
    case Op::IntLit: return "int";
    case Op::Compr: return "comprehension";
    case Op::Witness: return "witness";
    case Op::PredCall: return "call";
    case Op::Block: return "block";
    default: return op_symbol(op);
  }
}

std::string Command::label() const {
  return std::string(kind == CmdKind::Run ? "run " : "check ") + target;
}

const NodePtr& Spec::body(DeclRef d) const {
  switch (d.kind) {
    case DeclKind::Fact: return facts.at(d.index).body;
    case DeclKind::Pred: return preds.at(d.index).body;
    case DeclKind::Assert: return asserts.at(d.index).body;
  }
  throw std::logic_error("bad decl kind");
}

std::string Spec::decl_name(DeclRef d) const {
  switch (d.kind) {
    case DeclKind::Fact:
      return facts.at(d.index).name.empty() ? "fact#" + std::to_string(d.index)
                                            : facts.at(d.index).name;
    case DeclKind::Pred: return preds.at(d.index).name;
    case DeclKind::Assert: return asserts.at(d.index).name;
  }
  return {};
}

std::vector<DeclRef> Spec::formula_decls() const {
  std::vector<DeclRef> out;
  for (std::uint32_t i = 0; i < facts.size(); ++i) out.push_back({DeclKind::Fact, i});
  for (std::uint32_t i = 0; i < preds.size(); ++i) out.push_back({DeclKind::Pred, i});
  for (std::uint32_t i = 0; i < asserts.size(); ++i) out.push_back({DeclKind::Assert, i});
  return out;
}

const PredDecl* Spec::find_pred(std::string_view name) const {
  for (const auto& p : preds)
    if (p.name == name) return &p;
  return nullptr;
}

const AssertDecl* Spec::find_assert(std::string_view name) const {
  for (const auto& a : asserts)
    if (a.name == name) return &a;
  return nullptr;
}

std::optional<std::uint32_t> Spec::pred_index(std::string_view name) const {
  for (std::uint32_t i = 0; i < preds.size(); ++i)
    if (preds[i].name == name) return i;
  return std::nullopt;
}

std::optional<std::uint32_t> Spec::assert_index(std::string_view name) const {
  for (std::uint32_t i = 0; i < asserts.size(); ++i)
    if (asserts[i].name == name) return i;
  return std::nullopt;
}

const SigDecl* Spec::find_sig(std::string_view name) const {
  for (const auto& s : sigs)
    if (std::find(s.names.begin(), s.names.end(), name) != s.names.end()) return &s;
  return nullptr;
}

const FieldDecl* Spec::find_field(std::string_view name, const SigDecl** owner,
                                  std::string* owner_name) const {
  for (const auto& s : sigs)
    for (const auto& f : s.fields)
      if (f.name == name) {
        if (owner) *owner = &s;
        if (owner_name) *owner_name = s.names.front();
        return &f;
      }
  return nullptr;
}

std::vector<std::string> Spec::sig_names() const {
  std::vector<std::string> out;
  for (const auto& s : sigs) out.insert(out.end(), s.names.begin(), s.names.end());
  return out;
}

std::vector<const Command*> Spec::oracles() const {
  std::vector<const Command*> out;
  for (const auto& c : commands)
    if (c.is_oracle) out.push_back(&c);
  return out;
}

namespace {

bool equal_fields(const FieldDecl& a, const FieldDecl& b) {
  return a.name == b.name && a.mult == b.mult && a.range == b.range;
}

bool equal_sigs(const SigDecl& a, const SigDecl& b) {
  if (a.names != b.names || a.qual != b.qual || a.parent != b.parent ||
      a.fields.size() != b.fields.size())
    return false;
  for (std::size_t i = 0; i < a.fields.size(); ++i)
    if (!equal_fields(a.fields[i], b.fields[i])) return false;
  return true;
}

bool equal_params(const std::vector<Param>& a, const std::vector<Param>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].name != b[i].name || a[i].type != b[i].type) return false;
  return true;
}

}  // namespace

bool equal(const Spec& a, const Spec& b) {
  if (a.sigs.size() != b.sigs.size() || a.facts.size() != b.facts.size() ||
      a.preds.size() != b.preds.size() || a.asserts.size() != b.asserts.size() ||
      a.commands.size() != b.commands.size() || a.marked != b.marked)
    return false;
  for (std::size_t i = 0; i < a.sigs.size(); ++i)
    if (!equal_sigs(a.sigs[i], b.sigs[i])) return false;
  for (std::size_t i = 0; i < a.facts.size(); ++i)
    if (a.facts[i].name != b.facts[i].name || !equal(a.facts[i].body, b.facts[i].body))
      return false;
  for (std::size_t i = 0; i < a.preds.size(); ++i)
    if (a.preds[i].name != b.preds[i].name ||
        !equal_params(a.preds[i].params, b.preds[i].params) ||
        !equal(a.preds[i].body, b.preds[i].body))
      return false;
  for (std::size_t i = 0; i < a.asserts.size(); ++i)
    if (a.asserts[i].name != b.asserts[i].name || !equal(a.asserts[i].body, b.asserts[i].body))
      return false;
  for (std::size_t i = 0; i < a.commands.size(); ++i) {
    const auto& x = a.commands[i];
    const auto& y = b.commands[i];
    if (x.kind != y.kind || x.target != y.target || !(x.scope == y.scope) ||
        x.expect != y.expect || x.is_oracle != y.is_oracle)
      return false;
  }
  return true;
}

NodePtr node_at(const NodePtr& root, const std::vector<std::uint32_t>& steps) {
  NodePtr cur = root;
  for (auto s : steps) {
    if (!cur || s >= cur->kids.size()) return nullptr;
    cur = cur->kids[s];
  }
  return cur;
}

NodePtr node_at(const Spec& s, const NodePath& path) {
  switch (path.decl.kind) {
    case DeclKind::Fact:
      if (path.decl.index >= s.facts.size()) return nullptr;
      break;
    case DeclKind::Pred:
      if (path.decl.index >= s.preds.size()) return nullptr;
      break;
    case DeclKind::Assert:
      if (path.decl.index >= s.asserts.size()) return nullptr;
      break;
  }
  return node_at(s.body(path.decl), path.steps);
}

NodePtr replace_at(const NodePtr& root, const std::vector<std::uint32_t>& steps,
                   NodePtr replacement, std::size_t depth) {
  if (depth == steps.size()) return replacement;
  auto kids = root->kids;
  auto i = steps[depth];
  kids.at(i) = replace_at(kids[i], steps, std::move(replacement), depth + 1);
  return with_kids(*root, std::move(kids));
}

Spec with_body(const Spec& s, DeclRef d, NodePtr body) {
  Spec out = s;
  switch (d.kind) {
    case DeclKind::Fact: out.facts.at(d.index).body = std::move(body); break;
    case DeclKind::Pred: out.preds.at(d.index).body = std::move(body); break;
    case DeclKind::Assert: out.asserts.at(d.index).body = std::move(body); break;
  }
  return out;
}

}  // namespace relfix
