#include "relfix/analysis.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "relfix/errors.hpp"
#include "relfix/printer.hpp"

namespace relfix {

bool RelType::empty() const noexcept {
  return std::any_of(cols.begin(), cols.end(), [](Domain d) { return d == 0; });
}

TypeEnv::TypeEnv(const Spec& s) : spec_(&s) {
  std::map<std::string, const SigDecl*> decl_of;
  for (const auto& d : s.sigs)
    for (const auto& n : d.names) decl_of[n] = &d;
  for (const auto& d : s.sigs) {
    if (d.parent) continue;
    for (const auto& n : d.names) {
      if (family_names_.size() >= 62) throw TypeError("too many top-level sigs", d.span);
      univ_ |= Domain{1} << family_names_.size();
      family_[n] = family_names_.size();
      family_names_.push_back(n);
    }
  }
  // Children take their root's family; the extends graph is acyclic.
  auto root = [&](std::string n) {
    while (decl_of.at(n)->parent) n = *decl_of.at(n)->parent;
    return n;
  };
  for (const auto& d : s.sigs)
    for (const auto& n : d.names)
      if (!family_.count(n)) family_[n] = family_.at(root(n));
  for (const auto& d : s.sigs) {
    Domain owner = 0;
    for (const auto& n : d.names) owner |= domain_of(n);
    for (const auto& f : d.fields) fields_[f.name] = RelType{{owner, domain_of(f.range)}};
  }
}

Domain TypeEnv::domain_of(const std::string& sig) const {
  if (sig == "Int") return kIntDomain;
  if (sig == "univ") return univ_;
  auto it = family_.find(sig);
  if (it == family_.end()) throw TypeError("unknown sig '" + sig + "'");
  return Domain{1} << it->second;
}

const RelType* TypeEnv::field_type(const std::string& name) const {
  auto it = fields_.find(name);
  return it == fields_.end() ? nullptr : &it->second;
}

std::string TypeEnv::describe(Domain d) const {
  if (d == 0) return "{}";
  if (d == univ_) return "{univ}";
  std::string out = "{";
  bool first = true;
  for (std::size_t i = 0; i < family_names_.size(); ++i) {
    if (!(d >> i & 1)) continue;
    out += (first ? "" : ",") + family_names_[i];
    first = false;
  }
  if (d & kIntDomain) out += first ? "Int" : ",Int";
  return out + "}";
}

std::string TypeEnv::describe(const RelType& t) const {
  std::string out = "[";
  for (std::size_t i = 0; i < t.cols.size(); ++i) out += (i ? "," : "") + describe(t.cols[i]);
  return out + "]";
}

// ---------------------------------------------------------------------------

namespace {

RelType unite(RelType a, const RelType& b) {
  for (std::size_t i = 0; i < a.cols.size(); ++i) a.cols[i] |= b.cols[i];
  return a;
}

RelType join_types(const RelType& l, const RelType& r) {
  RelType out;
  out.cols.assign(l.cols.begin(), l.cols.end() - 1);
  out.cols.insert(out.cols.end(), r.cols.begin() + 1, r.cols.end());
  if ((l.cols.back() & r.cols.front()) == 0) std::fill(out.cols.begin(), out.cols.end(), 0);
  return out;
}

std::string arity_msg(const char* what, const Node& n, std::size_t a, std::size_t b) {
  return std::string(what) + " arity mismatch (" + std::to_string(a) + " vs " +
         std::to_string(b) + ") in '" + to_string(n) + "'";
}

}  // namespace

void TypeChecker::note(const Node& n, const RelType& t) {
  if (record_) (*record_)[&n] = t;
  if (n.op != Op::None && t.empty()) degenerate_ = true;
}

RelType TypeChecker::expr(const Node& n, Context& ctx) {
  if (n.sort() != Sort::Expr)
    throw TypeError("expected an expression, found '" + to_string(n) + "'", n.span);
  RelType t = expr_impl(n, ctx);
  note(n, t);
  return t;
}

RelType TypeChecker::any(const Node& n, Context& ctx) {
  if (n.sort() == Sort::Expr) return expr(n, ctx);
  formula(n, ctx);
  return {};
}

void TypeChecker::binders(const Node& n, Context& ctx, std::size_t& pushed) {
  for (std::size_t i = 0; i < n.vars.size(); ++i) {
    RelType t = expr(*n.kids[i], ctx);
    if (t.arity() != 1)
      throw TypeError("bound of '" + n.vars[i] + "' must be unary", n.kids[i]->span);
    ctx.emplace_back(n.vars[i], t);
    ++pushed;
  }
}

RelType TypeChecker::expr_impl(const Node& n, Context& ctx) {
  const Domain univ = env_.univ();
  switch (n.op) {
    case Op::Ref: {
      for (auto it = ctx.rbegin(); it != ctx.rend(); ++it)
        if (it->first == n.name) return it->second;
      if (env_.is_sig(n.name)) return RelType{{env_.domain_of(n.name)}};
      if (const RelType* f = env_.field_type(n.name)) return *f;
      throw TypeError("unknown name '" + n.name + "'", n.span);
    }
    case Op::IntLit: return RelType{{kIntDomain}};
    case Op::Iden: return RelType{{univ, univ}};
    case Op::Univ: return RelType{{univ}};
    case Op::None: return RelType{{0}};
    case Op::IntUniv: return RelType{{kIntDomain}};
    case Op::Union:
    case Op::Diff:
    case Op::Inter: {
      RelType a = expr(*n.kids[0], ctx), b = expr(*n.kids[1], ctx);
      if (a.arity() != b.arity())
        throw TypeError(arity_msg("set operator", n, a.arity(), b.arity()), n.span);
      if (n.op == Op::Union) return unite(a, b);
      if (n.op == Op::Diff) return a;
      for (std::size_t i = 0; i < a.cols.size(); ++i) a.cols[i] &= b.cols[i];
      return a;
    }
    case Op::Join: {
      RelType a = expr(*n.kids[0], ctx), b = expr(*n.kids[1], ctx);
      if (a.arity() + b.arity() < 3)
        throw TypeError(arity_msg("join", n, a.arity(), b.arity()), n.span);
      // x.*r is x + x.^r, and *r.x is x + ^r.x; iden's univ columns would
      // otherwise swamp the precision of the common navigation idiom.
      const Node& l = *n.kids[0];
      const Node& r = *n.kids[1];
      if (r.op == Op::RClosure && a.arity() == 1) {
        RelType base = expr(*r.kids[0], ctx);
        RelType closed{{base.cols[0], base.cols[1]}};
        RelType step = join_types(a, closed);
        return unite(a, step);
      }
      if (l.op == Op::RClosure && b.arity() == 1) {
        RelType base = expr(*l.kids[0], ctx);
        RelType closed{{base.cols[0], base.cols[1]}};
        return unite(b, join_types(closed, b));
      }
      return join_types(a, b);
    }
    case Op::Product: {
      RelType a = expr(*n.kids[0], ctx), b = expr(*n.kids[1], ctx);
      a.cols.insert(a.cols.end(), b.cols.begin(), b.cols.end());
      return a;
    }
    case Op::Transpose:
    case Op::Closure:
    case Op::RClosure: {
      RelType a = expr(*n.kids[0], ctx);
      if (a.arity() != 2)
        throw TypeError(std::string(op_symbol(n.op)) + " needs a binary relation in '" +
                            to_string(n) + "'",
                        n.span);
      if (n.op == Op::Transpose) return RelType{{a.cols[1], a.cols[0]}};
      if (n.op == Op::Closure) return a;
      return RelType{{univ, univ}};
    }
    case Op::Card:
      expr(*n.kids[0], ctx);
      return RelType{{kIntDomain}};
    case Op::Compr: {
      std::size_t pushed = 0;
      binders(n, ctx, pushed);
      RelType out;
      for (std::size_t i = 0; i < n.vars.size(); ++i)
        out.cols.push_back(ctx[ctx.size() - pushed + i].second.cols[0]);
      formula(*n.body(), ctx);
      ctx.resize(ctx.size() - pushed);
      return out;
    }
    case Op::Witness: return RelType{std::vector<Domain>(static_cast<std::size_t>(n.value), univ)};
    default:
      throw TypeError("expected an expression, found '" + to_string(n) + "'", n.span);
  }
}

void TypeChecker::formula(const Node& n, Context& ctx) {
  if (n.sort() != Sort::Formula)
    throw TypeError("expected a formula, found '" + to_string(n) + "'", n.span);
  switch (n.op) {
    case Op::In:
    case Op::NotIn:
    case Op::Eq:
    case Op::Neq: {
      RelType a = expr(*n.kids[0], ctx), b = expr(*n.kids[1], ctx);
      if (a.arity() != b.arity())
        throw TypeError(arity_msg("comparison", n, a.arity(), b.arity()), n.span);
      if (n.kids[0]->op != Op::None && n.kids[1]->op != Op::None)
        for (std::size_t i = 0; i < a.cols.size(); ++i)
          if ((a.cols[i] & b.cols[i]) == 0) degenerate_ = true;
      return;
    }
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge:
      for (const auto& k : n.kids) {
        RelType t = expr(*k, ctx);
        if (t.arity() != 1 || !(t.cols[0] & kIntDomain))
          throw TypeError("integer comparison on non-Int '" + to_string(*k) + "'", k->span);
      }
      return;
    case Op::And:
    case Op::Or:
    case Op::Implies:
    case Op::Iff:
    case Op::Not:
    case Op::Block:
      for (const auto& k : n.kids) formula(*k, ctx);
      return;
    case Op::QAll:
    case Op::QSome:
    case Op::QOne:
    case Op::QLone:
    case Op::QNo: {
      std::size_t pushed = 0;
      binders(n, ctx, pushed);
      formula(*n.body(), ctx);
      ctx.resize(ctx.size() - pushed);
      return;
    }
    case Op::MNo:
    case Op::MOne:
    case Op::MLone:
    case Op::MSome:
      expr(*n.kids[0], ctx);
      return;
    case Op::PredCall: {
      const PredDecl* p = env_.spec().find_pred(n.name);
      if (!p) throw TypeError("unknown predicate '" + n.name + "'", n.span);
      if (p->params.size() != n.kids.size())
        throw TypeError("predicate '" + n.name + "' takes " + std::to_string(p->params.size()) +
                            " arguments",
                        n.span);
      for (std::size_t i = 0; i < n.kids.size(); ++i) {
        RelType t = expr(*n.kids[i], ctx);
        if (t.arity() != 1)
          throw TypeError("argument " + std::to_string(i + 1) + " of '" + n.name + "' must be unary",
                          n.kids[i]->span);
        if ((t.cols[0] & env_.domain_of(p->params[i].type)) == 0) degenerate_ = true;
      }
      return;
    }
    case Op::Witness:
      return;
    default:
      throw TypeError("expected a formula, found '" + to_string(n) + "'", n.span);
  }
}

namespace {

Context params_context(const TypeEnv& env, DeclRef d) {
  Context ctx;
  if (d.kind == DeclKind::Pred)
    for (const auto& p : env.spec().preds.at(d.index).params)
      ctx.emplace_back(p.name, RelType{{env.domain_of(p.type)}});
  return ctx;
}

}  // namespace

TypeInfo typecheck_spec(const Spec& s) {
  TypeEnv env(s);
  TypeInfo info;
  TypeChecker tc(env);
  tc.record_into(&info.types);
  for (DeclRef d : s.formula_decls()) {
    Context ctx = params_context(env, d);
    tc.formula(*s.body(d), ctx);
  }
  return info;
}

Context context_at(const TypeEnv& env, DeclRef d, const std::vector<std::uint32_t>& steps) {
  Context ctx = params_context(env, d);
  TypeChecker tc(env);
  const Node* cur = env.spec().body(d).get();
  for (std::uint32_t step : steps) {
    if (step >= cur->kids.size()) throw LocationError(LocationError::Kind::NoMatch, "path leaves the tree");
    if (cur->is_quantifier() || cur->op == Op::Compr) {
      for (std::size_t i = 0; i < cur->vars.size() && i < step; ++i)
        ctx.emplace_back(cur->vars[i], tc.expr(*cur->kids[i], ctx));
    }
    cur = cur->kids[step].get();
  }
  // Keep the innermost binding of each name.
  Context out;
  std::set<std::string> seen;
  for (auto it = ctx.rbegin(); it != ctx.rend(); ++it)
    if (seen.insert(it->first).second) out.push_back(*it);
  std::reverse(out.begin(), out.end());
  return out;
}

std::pair<Context, RelType> bounding_type(const Spec& s, const Location& loc) {
  TypeEnv env(s);
  Context ctx = context_at(env, loc.path.decl, loc.path.steps);
  RelType t;
  for (const auto& [name, vt] : ctx) t.cols.push_back(vt.cols.at(0));
  if (loc.sort == Sort::Expr) {
    NodePtr n = node_at(s, loc.path);
    Context scratch = context_at(env, loc.path.decl, loc.path.steps);
    TypeChecker tc(env);
    std::size_t a = tc.expr(*n, scratch).arity();
    t.cols.insert(t.cols.end(), a, env.univ());
  }
  return {ctx, t};
}

std::vector<DeclRef> referenced_decls(const Spec& s, const Command& cmd) {
  std::set<DeclRef> out;
  std::deque<DeclRef> todo;
  auto push = [&](DeclRef d) {
    if (out.insert(d).second) todo.push_back(d);
  };
  for (std::uint32_t i = 0; i < s.facts.size(); ++i) push({DeclKind::Fact, i});
  if (cmd.kind == CmdKind::Run) {
    if (auto i = s.pred_index(cmd.target)) push({DeclKind::Pred, *i});
  } else if (auto i = s.assert_index(cmd.target)) {
    push({DeclKind::Assert, *i});
  }
  while (!todo.empty()) {
    DeclRef d = todo.front();
    todo.pop_front();
    visit(s.body(d), [&](const NodePtr& n, const auto&) {
      if (n->op == Op::PredCall)
        if (auto i = s.pred_index(n->name)) push({DeclKind::Pred, *i});
    });
  }
  return {out.begin(), out.end()};
}

std::vector<Location> check_dependencies(const Spec& s, const Command& cmd,
                                         const std::vector<Location>& locs) {
  auto decls = referenced_decls(s, cmd);
  std::vector<Location> out;
  for (const auto& l : locs)
    if (std::binary_search(decls.begin(), decls.end(), l.path.decl)) out.push_back(l);
  return out;
}

}  // namespace relfix
