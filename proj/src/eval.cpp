#include "relfix/eval.hpp"

#include "relfix/errors.hpp"

namespace relfix {

BVal BVal::between(TupleSet lo, TupleSet hi) {
  if (lo == hi) return of(std::move(lo));
  return BVal{std::move(lo), std::move(hi), false};
}

// ---------------------------------------------------------------------------
// Compilation

Program::Program(const Spec& s, std::shared_ptr<const Universe> u) : spec_(s), u_(std::move(u)) {}

int Program::compile(const NodePtr& n, const std::vector<std::string>& free) {
  Scope sc;
  for (const auto& name : free) sc.names.emplace_back(name, sc.next++);
  sc.max = sc.next;
  int id = static_cast<int>(codes_.size());
  codes_.push_back({});
  std::int32_t root = emit(*n, sc);
  codes_[id] = Code{root, sc.max};
  return id;
}

int Program::pred_code(const std::string& name) {
  auto it = pred_code_.find(name);
  if (it != pred_code_.end()) return it->second;
  const PredDecl* p = spec_.find_pred(name);
  if (!p) throw EvalError("unknown predicate '" + name + "'");
  std::vector<std::string> params;
  for (const auto& prm : p->params) params.push_back(prm.name);
  // Registered before the body compiles; recursion is rejected at parse time.
  int id = static_cast<int>(codes_.size());
  pred_code_[name] = id;
  codes_.push_back({});
  Scope sc;
  for (const auto& nm : params) sc.names.emplace_back(nm, sc.next++);
  sc.max = sc.next;
  std::int32_t root = emit(*p->body, sc);
  codes_[id] = Code{root, sc.max};
  return id;
}

std::int32_t Program::emit(const Node& n, Scope& sc) {
  CNode c;
  c.op = n.op;
  c.value = n.value;
  switch (n.op) {
    case Op::Ref: {
      for (auto it = sc.names.rbegin(); it != sc.names.rend(); ++it)
        if (it->first == n.name) {
          c.is_var = true;
          c.index = it->second;
          break;
        }
      if (!c.is_var) {
        auto r = u_->rel_index.find(n.name);
        if (r == u_->rel_index.end()) throw EvalError("unbound name '" + n.name + "'", n.span);
        c.index = r->second;
      }
      break;
    }
    case Op::PredCall:
      c.index = pred_code(n.name);
      for (const auto& k : n.kids) c.kids.push_back(emit(*k, sc));
      break;
    case Op::Witness:
      for (const auto& v : n.vars) {
        std::int32_t slot = -1;
        for (auto it = sc.names.rbegin(); it != sc.names.rend(); ++it)
          if (it->first == v) {
            slot = it->second;
            break;
          }
        if (slot < 0) throw EvalError("witness context variable '" + v + "' is not in scope");
        c.slots.push_back(slot);
      }
      break;
    case Op::QAll:
    case Op::QSome:
    case Op::QOne:
    case Op::QLone:
    case Op::QNo:
    case Op::Compr: {
      for (std::size_t i = 0; i < n.vars.size(); ++i) {
        c.kids.push_back(emit(*n.kids[i], sc));
        c.slots.push_back(sc.next);
        sc.names.emplace_back(n.vars[i], sc.next++);
        sc.max = std::max(sc.max, sc.next);
      }
      c.kids.push_back(emit(*n.body(), sc));
      sc.names.resize(sc.names.size() - n.vars.size());
      sc.next -= static_cast<std::int32_t>(n.vars.size());
      break;
    }
    default:
      for (const auto& k : n.kids) c.kids.push_back(emit(*k, sc));
  }
  nodes_.push_back(std::move(c));
  return static_cast<std::int32_t>(nodes_.size() - 1);
}

// ---------------------------------------------------------------------------
// Evaluation

std::size_t Evaluator::KeyHash::operator()(const std::vector<std::uint64_t>& k) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (auto x : k) h = (h ^ x) * 0x100000001b3ULL;
  return h;
}

Evaluator::Evaluator(const Program& p, const std::vector<BVal>& rels, const BVal* witness,
                     std::vector<std::uint64_t> ctx_domains)
    : p_(p), u_(p.universe()), rels_(rels), witness_(witness), ctx_domains_(std::move(ctx_domains)) {
  std::uint64_t lo = u_.int_mask, hi = u_.int_mask;
  for (std::size_t r = 0; r < u_.rels.size(); ++r) {
    if (u_.rels[r].kind != RelKind::Sig) continue;
    lo |= rels_[r].lo.mask();
    hi |= rels_[r].upper().mask();
  }
  univ_ = BVal::between(TupleSet::unary(u_.size(), lo), TupleSet::unary(u_.size(), hi));
}

Truth Evaluator::formula(int code, const std::vector<BVal>& free) {
  Frame fr(free);
  fr.resize(p_.code(code).nslots);
  return f(p_.code(code).root, fr);
}

BVal Evaluator::expr(int code, const std::vector<BVal>& free) {
  Frame fr(free);
  fr.resize(p_.code(code).nslots);
  return e(p_.code(code).root, fr);
}

bool Evaluator::int_value(const BVal& v, std::int64_t& out) const {
  std::uint64_t lo = v.lo.mask() & u_.int_mask;
  if (!v.exact && (v.hi.mask() & u_.int_mask) != lo) return false;
  std::int64_t sum = 0;
  for (std::uint64_t b = lo; b; b &= b - 1) sum += u_.atom_value[std::countr_zero(b)];
  out = u_.wrap(sum);
  return true;
}

BVal Evaluator::int_set(std::int64_t v) const {
  return BVal::of(TupleSet::unary(u_.size(), std::uint64_t{1} << u_.int_atom(v)));
}

namespace {

template <class Op>
BVal lift2(const BVal& a, const BVal& b, Op op) {
  if (a.exact && b.exact) return BVal::of(op(a.lo, b.lo));
  return BVal::between(op(a.lo, b.lo), op(a.upper(), b.upper()));
}

template <class Op>
BVal lift1(const BVal& a, Op op) {
  if (a.exact) return BVal::of(op(a.lo));
  return BVal::between(op(a.lo), op(a.hi));
}

}  // namespace

BVal Evaluator::e(std::int32_t i, Frame& fr) {
  const auto& n = p_.node(i);
  const std::uint32_t N = u_.size();
  switch (n.op) {
    case Op::Ref: return n.is_var ? fr[n.index] : rels_[n.index];
    case Op::IntLit: return int_set(n.value);
    case Op::Iden:
      if (univ_.exact) return BVal::of(TupleSet::iden(N, univ_.lo.mask()));
      return BVal::between(TupleSet::iden(N, univ_.lo.mask()), TupleSet::iden(N, univ_.hi.mask()));
    case Op::Univ: return univ_;
    case Op::None: return BVal::of(TupleSet(N, 1));
    case Op::IntUniv: return BVal::of(TupleSet::unary(N, u_.int_mask));
    case Op::Union:
      return lift2(e(n.kids[0], fr), e(n.kids[1], fr), [](const TupleSet& a, const TupleSet& b) { return a | b; });
    case Op::Inter:
      return lift2(e(n.kids[0], fr), e(n.kids[1], fr), [](const TupleSet& a, const TupleSet& b) { return a & b; });
    case Op::Diff: {
      BVal a = e(n.kids[0], fr), b = e(n.kids[1], fr);
      if (a.exact && b.exact) return BVal::of(a.lo - b.lo);
      return BVal::between(a.lo - b.upper(), a.upper() - b.lo);
    }
    case Op::Join:
      return lift2(e(n.kids[0], fr), e(n.kids[1], fr),
                   [](const TupleSet& a, const TupleSet& b) { return join(a, b); });
    case Op::Product:
      return lift2(e(n.kids[0], fr), e(n.kids[1], fr),
                   [](const TupleSet& a, const TupleSet& b) { return product(a, b); });
    case Op::Transpose: return lift1(e(n.kids[0], fr), [](const TupleSet& a) { return transpose(a); });
    case Op::Closure: return lift1(e(n.kids[0], fr), [](const TupleSet& a) { return closure(a); });
    case Op::RClosure: {
      BVal a = e(n.kids[0], fr);
      TupleSet lo = closure(a.lo) | TupleSet::iden(N, univ_.lo.mask());
      if (a.exact && univ_.exact) return BVal::of(std::move(lo));
      return BVal::between(std::move(lo), closure(a.upper()) | TupleSet::iden(N, univ_.upper().mask()));
    }
    case Op::Card: {
      BVal a = e(n.kids[0], fr);
      std::size_t lc = a.lo.count();
      if (a.exact || lc == a.hi.count()) return int_set(static_cast<std::int64_t>(lc));
      return BVal{TupleSet(N, 1), TupleSet::unary(N, u_.int_mask), false};
    }
    case Op::Compr: return compr(n, fr);
    case Op::Witness: return witness_expr(n, fr);
    default: throw EvalError("not an expression");
  }
}

template <class Fn>
static bool each_binding(Evaluator& ev, const Program::CNode& n, std::vector<BVal>& fr, std::size_t k,
                         Truth m, std::vector<std::uint32_t>& atoms, std::uint32_t N,
                         BVal (Evaluator::*eval)(std::int32_t, std::vector<BVal>&), Fn& fn) {
  if (k == n.slots.size()) return fn(m, atoms);
  BVal dom = (ev.*eval)(n.kids[k], fr);
  const std::uint64_t lo = dom.lo.mask();
  for (std::uint64_t b = dom.upper().mask(); b; b &= b - 1) {
    const std::uint32_t atom = static_cast<std::uint32_t>(std::countr_zero(b));
    fr[n.slots[k]] = BVal::of(TupleSet::unary(N, std::uint64_t{1} << atom));
    atoms.push_back(atom);
    bool go = each_binding(ev, n, fr, k + 1, m && ((lo >> atom & 1) ? Truth::True : Truth::Unknown),
                           atoms, N, eval, fn);
    atoms.pop_back();
    if (!go) return false;
  }
  return true;
}

Truth Evaluator::quant(const Program::CNode& n, Frame& fr) {
  const std::int32_t body = n.kids.back();
  Truth acc = n.op == Op::QAll ? Truth::True : Truth::False;
  int lo_count = 0, hi_count = 0;
  std::vector<std::uint32_t> atoms;
  auto fn = [&](Truth m, const std::vector<std::uint32_t>&) {
    Truth v = f(body, fr);
    switch (n.op) {
      case Op::QAll:
        acc = acc && (!m || v);
        return acc != Truth::False;
      case Op::QSome:
        acc = acc || (m && v);
        return acc != Truth::True;
      default:
        lo_count += (m == Truth::True && v == Truth::True);
        hi_count += (m != Truth::False && v != Truth::False);
        // no/lone are settled once two definite witnesses exist; one too.
        return lo_count < 2;
    }
  };
  each_binding(*this, n, fr, 0, Truth::True, atoms, u_.size(), &Evaluator::e, fn);
  switch (n.op) {
    case Op::QAll:
    case Op::QSome: return acc;
    case Op::QNo:
      if (hi_count == 0) return Truth::True;
      return lo_count >= 1 ? Truth::False : Truth::Unknown;
    case Op::QLone:
      if (lo_count >= 2) return Truth::False;
      return hi_count <= 1 ? Truth::True : Truth::Unknown;
    case Op::QOne:
      if (lo_count >= 2 || hi_count == 0) return Truth::False;
      return lo_count == 1 && hi_count == 1 ? Truth::True : Truth::Unknown;
    default: return Truth::Unknown;
  }
}

BVal Evaluator::compr(const Program::CNode& n, Frame& fr) {
  const std::uint32_t N = u_.size();
  const auto arity = static_cast<std::uint32_t>(n.slots.size());
  TupleSet lo(N, arity), hi(N, arity);
  std::vector<std::uint32_t> atoms;
  auto fn = [&](Truth m, const std::vector<std::uint32_t>& t) {
    Truth v = f(n.kids.back(), fr);
    if ((m && v) == Truth::True) lo.insert(t);
    if ((m && v) != Truth::False) hi.insert(t);
    return true;
  };
  each_binding(*this, n, fr, 0, Truth::True, atoms, N, &Evaluator::e, fn);
  return BVal::between(std::move(lo), std::move(hi));
}

std::vector<std::uint32_t> Evaluator::witness_prefix(const Program::CNode& n, Frame& fr) {
  if (!witness_) throw EvalError("witness evaluated without a witness value");
  std::vector<std::uint32_t> t;
  for (std::size_t k = 0; k < n.slots.size(); ++k) {
    const BVal& v = fr[n.slots[k]];
    if (!v.exact || v.lo.arity() != 1 || v.lo.count() != 1) throw WitnessAbort{};
    auto atom = static_cast<std::uint32_t>(std::countr_zero(v.lo.mask()));
    if (k < ctx_domains_.size() && !(ctx_domains_[k] >> atom & 1)) throw WitnessAbort{};
    t.push_back(atom);
  }
  return t;
}

Truth Evaluator::witness_formula(const Program::CNode& n, Frame& fr) {
  auto t = witness_prefix(n, fr);
  if (t.empty()) t.push_back(0);
  if (witness_->lo.contains(t)) return Truth::True;
  return witness_->upper().contains(t) ? Truth::Unknown : Truth::False;
}

BVal Evaluator::witness_expr(const Program::CNode& n, Frame& fr) {
  auto t = witness_prefix(n, fr);
  BVal w = *witness_;
  for (auto atom : t) {
    TupleSet s = TupleSet::unary(u_.size(), std::uint64_t{1} << atom);
    w = lift1(w, [&](const TupleSet& x) { return join(s, x); });
  }
  return w;
}

Truth Evaluator::call(const Program::CNode& n, Frame& fr) {
  Frame callee;
  callee.reserve(p_.code(n.index).nslots);
  bool exact = true;
  for (auto k : n.kids) {
    callee.push_back(e(k, fr));
    exact &= callee.back().exact;
  }
  std::vector<std::uint64_t> key;
  if (exact) {
    key.push_back(static_cast<std::uint64_t>(n.index));
    for (const auto& a : callee) key.push_back(a.lo.mask());
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
  }
  callee.resize(p_.code(n.index).nslots);
  Truth r = f(p_.code(n.index).root, callee);
  if (exact) memo_.emplace(std::move(key), r);
  return r;
}

Truth Evaluator::f(std::int32_t i, Frame& fr) {
  const auto& n = p_.node(i);
  switch (n.op) {
    case Op::In:
    case Op::NotIn: {
      BVal a = e(n.kids[0], fr), b = e(n.kids[1], fr);
      Truth r = a.upper().subset_of(b.lo) ? Truth::True
                : !a.lo.subset_of(b.upper()) ? Truth::False
                                             : Truth::Unknown;
      return n.op == Op::In ? r : !r;
    }
    case Op::Eq:
    case Op::Neq: {
      BVal a = e(n.kids[0], fr), b = e(n.kids[1], fr);
      Truth r;
      if (a.exact && b.exact) r = truth(a.lo == b.lo);
      else if (!a.lo.subset_of(b.upper()) || !b.lo.subset_of(a.upper())) r = Truth::False;
      else if (a.upper().subset_of(b.lo) && b.upper().subset_of(a.lo)) r = Truth::True;
      else r = Truth::Unknown;
      return n.op == Op::Eq ? r : !r;
    }
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge: {
      std::int64_t x, y;
      if (!int_value(e(n.kids[0], fr), x) || !int_value(e(n.kids[1], fr), y)) return Truth::Unknown;
      switch (n.op) {
        case Op::Lt: return truth(x < y);
        case Op::Le: return truth(x <= y);
        case Op::Gt: return truth(x > y);
        default: return truth(x >= y);
      }
    }
    case Op::And: {
      Truth a = f(n.kids[0], fr);
      if (a == Truth::False) return a;
      return a && f(n.kids[1], fr);
    }
    case Op::Or: {
      Truth a = f(n.kids[0], fr);
      if (a == Truth::True) return a;
      return a || f(n.kids[1], fr);
    }
    case Op::Implies: {
      Truth a = f(n.kids[0], fr);
      if (a == Truth::False) return Truth::True;
      return !a || f(n.kids[1], fr);
    }
    case Op::Iff: {
      Truth a = f(n.kids[0], fr), b = f(n.kids[1], fr);
      if (a == Truth::Unknown || b == Truth::Unknown) return Truth::Unknown;
      return truth(a == b);
    }
    case Op::Not: return !f(n.kids[0], fr);
    case Op::Block: {
      Truth acc = Truth::True;
      for (auto k : n.kids) {
        acc = acc && f(k, fr);
        if (acc == Truth::False) break;
      }
      return acc;
    }
    case Op::QAll:
    case Op::QSome:
    case Op::QOne:
    case Op::QLone:
    case Op::QNo: return quant(n, fr);
    case Op::MNo:
    case Op::MSome: {
      BVal a = e(n.kids[0], fr);
      Truth r = a.upper().empty() ? Truth::True : !a.lo.empty() ? Truth::False : Truth::Unknown;
      return n.op == Op::MNo ? r : !r;
    }
    case Op::MOne:
    case Op::MLone: {
      BVal a = e(n.kids[0], fr);
      std::size_t lc = a.lo.count(), hc = a.exact ? lc : a.hi.count();
      if (n.op == Op::MLone) return hc <= 1 ? Truth::True : lc >= 2 ? Truth::False : Truth::Unknown;
      if (lc >= 2 || hc == 0) return Truth::False;
      return hc == 1 && lc == 1 ? Truth::True : Truth::Unknown;
    }
    case Op::PredCall: return call(n, fr);
    case Op::Witness: return witness_formula(n, fr);
    default: throw EvalError("not a formula");
  }
}

// ---------------------------------------------------------------------------

std::vector<BVal> exact_rels(const Instance& inst) {
  std::vector<BVal> out;
  out.reserve(inst.rels.size());
  for (const auto& r : inst.rels) out.push_back(BVal::of(r));
  return out;
}

namespace {

std::pair<std::vector<std::string>, std::vector<BVal>> split_env(const std::map<std::string, TupleSet>& env) {
  std::vector<std::string> names;
  std::vector<BVal> vals;
  for (const auto& [k, v] : env) {
    names.push_back(k);
    vals.push_back(BVal::of(v));
  }
  return {names, vals};
}

}  // namespace

TupleSet eval_expr(const Spec& s, const NodePtr& e, const Instance& inst,
                   const std::map<std::string, TupleSet>& env) {
  Program p(s, inst.universe);
  auto [names, vals] = split_env(env);
  int code = p.compile(e, names);
  auto rels = exact_rels(inst);
  return Evaluator(p, rels).expr(code, vals).lo;
}

bool eval_formula(const Spec& s, const NodePtr& f, const Instance& inst,
                  const std::map<std::string, TupleSet>& env) {
  Program p(s, inst.universe);
  auto [names, vals] = split_env(env);
  int code = p.compile(f, names);
  auto rels = exact_rels(inst);
  Truth t = Evaluator(p, rels).formula(code, vals);
  if (t == Truth::Unknown) throw EvalError("formula is undetermined on a concrete instance");
  return t == Truth::True;
}

}  // namespace relfix
