#include "relfix/solver.hpp"

#include <algorithm>
#include <bit>

#include "relfix/errors.hpp"
#include "relfix/eval.hpp"

namespace relfix {

Deadline Deadline::after(double seconds) {
  Deadline d;
  auto now = std::chrono::steady_clock::now();
  if (seconds < 1e9)
    d.at = now + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                     std::chrono::duration<double>(seconds));
  return d;
}

namespace {

struct RowLimit {
  std::uint32_t min = 0;
  std::uint32_t max = 64;
  void meet(std::uint32_t lo, std::uint32_t hi) {
    min = std::max(min, lo);
    max = std::min(max, hi);
  }
};

// Flattens top-level conjunctions of the facts.
void conjuncts(const NodePtr& f, std::vector<NodePtr>& out) {
  if (f->op == Op::Block || f->op == Op::And) {
    for (const auto& k : f->kids) conjuncts(k, out);
    return;
  }
  out.push_back(f);
}

bool is_ancestor_or_self(const Spec& s, const std::string& anc, std::string sig) {
  for (;;) {
    if (sig == anc) return true;
    const SigDecl* d = s.find_sig(sig);
    if (!d || !d->parent) return false;
    sig = *d->parent;
  }
}

// Row cardinalities implied by declarations and by facts of the shape
// `all v: S | mult v.f`.
std::vector<RowLimit> row_limits(const Spec& s, const Universe& u) {
  std::vector<RowLimit> lim(u.rels.size());
  for (std::size_t r = 0; r < u.rels.size(); ++r) {
    if (u.rels[r].kind != RelKind::Field) continue;
    if (u.rels[r].mult == FieldMult::One) lim[r].meet(1, 1);
    if (u.rels[r].mult == FieldMult::Lone) lim[r].meet(0, 1);
  }
  std::vector<NodePtr> cs;
  for (const auto& f : s.facts) conjuncts(f.body, cs);
  for (const auto& c : cs) {
    if (c->op != Op::QAll || c->vars.size() != 1 || c->kids[0]->op != Op::Ref) continue;
    const Node& body = *c->body();
    const Node* m = &body;
    if (m->op == Op::Block && m->kids.size() == 1) m = m->kids[0].get();
    if (!m->is_multiplicity()) continue;
    const Node& j = *m->kids[0];
    if (j.op != Op::Join || j.kids[0]->op != Op::Ref || j.kids[0]->name != c->vars[0] ||
        j.kids[1]->op != Op::Ref || j.kids[1]->name == c->vars[0])
      continue;
    auto it = u.rel_index.find(j.kids[1]->name);
    if (it == u.rel_index.end() || u.rels[it->second].kind != RelKind::Field) continue;
    const RelInfo& f = u.rels[it->second];
    if (!is_ancestor_or_self(s, c->kids[0]->name, u.rels[f.owner].name)) continue;
    switch (m->op) {
      case Op::MNo: lim[it->second].meet(0, 0); break;
      case Op::MOne: lim[it->second].meet(1, 1); break;
      case Op::MLone: lim[it->second].meet(0, 1); break;
      default: lim[it->second].meet(1, 64); break;
    }
  }
  return lim;
}

// Subsets of `range` with a popcount in [lim.min, lim.max], smallest first.
std::vector<std::uint64_t> row_choices(std::uint64_t range, RowLimit lim) {
  std::vector<std::uint32_t> atoms;
  for (std::uint64_t b = range; b; b &= b - 1) atoms.push_back(static_cast<std::uint32_t>(std::countr_zero(b)));
  const std::uint32_t k = static_cast<std::uint32_t>(atoms.size());
  const std::uint32_t hi = std::min(lim.max, k);
  std::vector<std::uint64_t> out;
  for (std::uint32_t pc = lim.min; pc <= hi; ++pc) {
    if (pc == 0) {
      out.push_back(0);
      continue;
    }
    if (k > 20 && pc > 2) throw ResourceError("field row over " + std::to_string(k) + " atoms is too wide to enumerate");
    // Gosper's hack over k-bit index masks.
    std::uint64_t idx = (std::uint64_t{1} << pc) - 1;
    while (idx < (std::uint64_t{1} << k)) {
      std::uint64_t m = 0;
      for (std::uint64_t b = idx; b; b &= b - 1) m |= std::uint64_t{1} << atoms[std::countr_zero(b)];
      out.push_back(m);
      std::uint64_t c = idx & -idx, r = idx + c;
      idx = (((r ^ idx) >> 2) / c) | r;
    }
    if (out.size() > (std::size_t{1} << 20)) throw ResourceError("too many choices for one field row");
  }
  return out;
}

class Search {
 public:
  Search(const Spec& s, const NodePtr& target, const Scope& scope, const Deadline& deadline)
      : u_(Universe::build(s, scope)), prog_(s, u_), deadline_(deadline) {
    for (const auto& f : s.facts) codes_.push_back(prog_.compile(f.body));
    codes_.push_back(prog_.compile(target));
    limits_ = row_limits(s, *u_);
    count_.assign(u_->pools.size(), -1);
    for (std::size_t r = 0; r < u_->rels.size(); ++r)
      if (u_->rels[r].kind == RelKind::Field) fields_.push_back(static_cast<int>(r));
    // Fields with fewer choices per row are decided first.
    auto width = [&](int r) {
      const RelInfo& f = u_->rels[r];
      std::uint32_t k = f.range < 0 ? static_cast<std::uint32_t>(std::popcount(u_->int_mask)) : extent_size(f.range);
      double c = 0;
      for (std::uint32_t pc = limits_[r].min; pc <= std::min(limits_[r].max, k); ++pc) {
        double binom = 1;
        for (std::uint32_t i = 0; i < pc; ++i) binom = binom * (k - i) / (i + 1);
        c += binom;
      }
      return c;
    };
    std::stable_sort(fields_.begin(), fields_.end(), [&](int a, int b) { return width(a) < width(b); });
  }

  SolveResult run() {
    SolveResult res;
    if (pools(0)) {
      res.sat = true;
      res.instance = Instance{u_, found_};
    }
    res.nodes = nodes_;
    return res;
  }

 private:
  struct Row {
    int field;
    std::uint32_t owner;
    std::vector<std::uint64_t> choices;
  };

  std::shared_ptr<const Universe> u_;
  Program prog_;
  const Deadline& deadline_;
  std::vector<int> codes_;
  std::vector<RowLimit> limits_;
  std::vector<int> fields_;
  std::vector<int> count_;
  std::vector<Row> rows_;
  std::vector<int> pick_;
  std::vector<BVal> rels_;
  std::vector<TupleSet> found_;
  std::uint64_t nodes_ = 0;

  std::uint32_t extent_size(int rel) const {
    std::uint32_t c = 0;
    for (int p : u_->sig_pools[rel]) c += u_->pools[p].size;
    return c;
  }

  std::uint64_t extent(int rel, bool upper) const {
    std::uint64_t m = 0;
    for (int p : u_->sig_pools[rel]) {
      const Pool& pool = u_->pools[p];
      std::uint32_t c = count_[p] >= 0 ? static_cast<std::uint32_t>(count_[p]) : upper ? pool.size : pool.min;
      m |= u_->pool_mask(pool, c);
    }
    return m;
  }

  void build_rels() {
    const std::uint32_t N = u_->size();
    rels_.assign(u_->rels.size(), BVal{});
    std::vector<std::uint64_t> lo_ext(u_->rels.size()), hi_ext(u_->rels.size());
    for (std::size_t r = 0; r < u_->rels.size(); ++r) {
      if (u_->rels[r].kind != RelKind::Sig) continue;
      lo_ext[r] = extent(static_cast<int>(r), false);
      hi_ext[r] = extent(static_cast<int>(r), true);
      rels_[r] = BVal::between(TupleSet::unary(N, lo_ext[r]), TupleSet::unary(N, hi_ext[r]));
    }
    for (int r : fields_) {
      const RelInfo& f = u_->rels[r];
      TupleSet lo(N, 2), hi(N, 2);
      std::uint64_t range = f.range < 0 ? u_->int_mask : hi_ext[f.range];
      if (limits_[r].max == 0) range = 0;
      for (std::uint64_t b = hi_ext[f.owner]; b; b &= b - 1) hi.word(std::countr_zero(b)) = range;
      rels_[r] = BVal{std::move(lo), std::move(hi), false};
    }
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (pick_[i] < 0) continue;
      BVal& v = rels_[rows_[i].field];
      v.lo.word(rows_[i].owner) = v.hi.word(rows_[i].owner) = rows_[i].choices[pick_[i]];
    }
    for (int r : fields_)
      if (rels_[r].lo == rels_[r].hi) rels_[r] = BVal::of(std::move(rels_[r].lo));
  }

  Truth evaluate() {
    if ((++nodes_ & 63) == 0 && deadline_.passed()) throw DeadlineExceeded();
    build_rels();
    Evaluator ev(prog_, rels_);
    Truth acc = Truth::True;
    for (int c : codes_) {
      acc = acc && ev.formula(c);
      if (acc == Truth::False) break;
    }
    return acc;
  }

  bool cardinality_ok(bool final) const {
    for (const SigBound& b : u_->bounds) {
      std::uint32_t lo = static_cast<std::uint32_t>(std::popcount(extent(b.rel, false)));
      std::uint32_t hi = static_cast<std::uint32_t>(std::popcount(extent(b.rel, true)));
      if (lo > b.count) return false;
      if (b.exact && hi < b.count) return false;
      if (final && b.exact && lo != b.count) return false;
    }
    return true;
  }

  bool pools(std::size_t k) {
    if (k == u_->pools.size()) {
      if (!cardinality_ok(true)) return false;
      make_rows();
      for (const auto& r : rows_)
        if (r.choices.empty()) return false;
      return decide_rows(0);
    }
    const Pool& p = u_->pools[k];
    for (std::uint32_t c = p.min; c <= p.size; ++c) {
      count_[k] = static_cast<int>(c);
      if (cardinality_ok(false) && evaluate() != Truth::False && pools(k + 1)) return true;
    }
    count_[k] = -1;
    return false;
  }

  void make_rows() {
    rows_.clear();
    for (int r : fields_) {
      const RelInfo& f = u_->rels[r];
      std::uint64_t range = f.range < 0 ? u_->int_mask : extent(f.range, false);
      auto choices = row_choices(range, limits_[r]);
      for (std::uint64_t b = extent(f.owner, false); b; b &= b - 1)
        rows_.push_back(Row{r, static_cast<std::uint32_t>(std::countr_zero(b)), choices});
    }
    pick_.assign(rows_.size(), -1);
  }

  bool decide_rows(std::size_t k) {
    if (k == rows_.size()) {
      if (evaluate() != Truth::True) return false;
      record();
      return true;
    }
    for (std::size_t c = 0; c < rows_[k].choices.size(); ++c) {
      pick_[k] = static_cast<int>(c);
      Truth t = evaluate();
      if (t == Truth::True) {
        // Every completion within the bounds satisfies the formulas.
        for (std::size_t j = k + 1; j < rows_.size(); ++j) pick_[j] = 0;
        build_rels();
        record();
        return true;
      }
      if (t == Truth::Unknown && decide_rows(k + 1)) return true;
    }
    pick_[k] = -1;
    return false;
  }

  void record() {
    found_.clear();
    for (const auto& r : rels_) found_.push_back(r.lo);
  }
};

}  // namespace

SolveResult solve(const Spec& s, const NodePtr& target, const Scope& scope, const Deadline& deadline) {
  return Search(s, target, scope, deadline).run();
}

NodePtr command_target(const Spec& s, const Command& cmd) {
  if (cmd.kind == CmdKind::Check) {
    const AssertDecl* a = s.find_assert(cmd.target);
    if (!a) throw ResolveError("unknown assertion '" + cmd.target + "'", cmd.span);
    return make_node(Op::Not, {a->body});
  }
  const PredDecl* p = s.find_pred(cmd.target);
  if (!p) throw ResolveError("unknown predicate '" + cmd.target + "'", cmd.span);
  if (p->params.empty()) return p->body;
  std::vector<std::string> vars;
  std::vector<NodePtr> kids;
  for (const auto& prm : p->params) {
    vars.push_back(prm.name);
    kids.push_back(prm.type == "Int" ? make_node(Op::IntUniv) : make_ref(prm.type));
  }
  kids.push_back(p->body);
  return make_binder(Op::QSome, std::move(vars), std::move(kids));
}

std::string CommandResult::verdict(const Command& cmd) const {
  if (cmd.kind == CmdKind::Run) return solve.sat ? "SAT" : "UNSAT";
  return solve.sat ? "CEX" : "VALID";
}

CommandResult check_command(const Spec& s, const Command& cmd, const Deadline& deadline) {
  CommandResult r;
  r.solve = solve(s, command_target(s, cmd), cmd.scope, deadline);
  if (cmd.kind == CmdKind::Check) r.pass = !r.solve.sat;
  else r.pass = r.solve.sat == (cmd.expect == Expect::Sat);
  return r;
}

std::string_view to_string(WitnessResult r) {
  switch (r) {
    case WitnessResult::True: return "true";
    case WitnessResult::False: return "false";
    case WitnessResult::Unknown: return "unknown";
  }
  return "?";
}

Spec variabilize(const Spec& s, const Location& loc, const Context& ctx) {
  auto w = std::make_shared<Node>();
  w->op = Op::Witness;
  for (const auto& [name, t] : ctx) w->vars.push_back(name);
  if (loc.sort == Sort::Expr) {
    TypeEnv env(s);
    Context scratch = context_at(env, loc.path.decl, loc.path.steps);
    TypeChecker tc(env);
    w->value = static_cast<std::int64_t>(tc.expr(*node_at(s, loc.path), scratch).arity());
  }
  w->span = loc.span;
  return with_body(s, loc.path.decl,
                   replace_at(s.body(loc.path.decl), loc.path.steps, normalize_replacement(loc, w)));
}

NodePtr rescue_target(const Spec& s, const Command& cmd) {
  const AssertDecl* a = s.find_assert(cmd.target);
  if (cmd.kind != CmdKind::Check || !a) throw EvalError("rescue target needs a check command");
  std::vector<NodePtr> facts;
  for (const auto& f : s.facts) facts.push_back(f.body);
  return make_node(Op::Implies, {make_node(Op::Block, std::move(facts)), a->body});
}

WitnessResult exists_relation_witness(const Instance& inst, const RelType& wtype, const Context& ctx,
                                      const Spec& s_var, const NodePtr& target, std::size_t cap,
                                      const Deadline& deadline) {
  const Universe& u = *inst.universe;
  const std::uint32_t N = u.size();
  const std::uint64_t present = inst.univ();

  std::vector<std::uint64_t> cols;
  for (Domain d : wtype.cols) {
    std::uint64_t m = 0;
    for (std::uint64_t b = present; b; b &= b - 1) {
      int a = std::countr_zero(b);
      int fam = u.atom_family[a];
      if (fam < 0 ? (d & kIntDomain) != 0 : (d >> fam & 1) != 0) m |= std::uint64_t{1} << a;
    }
    cols.push_back(m);
  }

  // All candidate tuples, lexicographic.
  std::vector<std::vector<std::uint32_t>> tuples(1);
  for (std::uint64_t m : cols) {
    std::vector<std::vector<std::uint32_t>> next;
    for (const auto& t : tuples)
      for (std::uint64_t b = m; b; b &= b - 1) {
        next.push_back(t);
        next.back().push_back(static_cast<std::uint32_t>(std::countr_zero(b)));
      }
    tuples = std::move(next);
    if (tuples.size() > cap) return WitnessResult::Unknown;
  }
  const std::uint32_t arity = std::max<std::uint32_t>(1, static_cast<std::uint32_t>(wtype.arity()));
  if (wtype.arity() == 0) tuples = {{0}};
  if (tuples.size() > cap) return WitnessResult::Unknown;

  Program prog(s_var, inst.universe);
  const int code = prog.compile(target);
  const auto rels = exact_rels(inst);
  std::vector<std::uint64_t> ctx_cols(cols.begin(), cols.begin() + static_cast<std::ptrdiff_t>(ctx.size()));

  BVal w{TupleSet(N, arity), TupleSet(N, arity), false};
  for (const auto& t : tuples) w.hi.insert(t);
  std::uint64_t nodes = 0;

  auto eval = [&]() {
    if ((++nodes & 63) == 0 && deadline.passed()) throw DeadlineExceeded();
    BVal cur = w.lo == w.hi ? BVal::of(w.lo) : w;
    return Evaluator(prog, rels, &cur, ctx_cols).formula(code);
  };
  // Decides tuples in order, "out" before "in".
  auto rec = [&](auto& self, std::size_t k) -> bool {
    Truth t = eval();
    if (t == Truth::True) return true;
    if (t == Truth::False || k == tuples.size()) return false;
    w.hi.erase(tuples[k]);
    if (self(self, k + 1)) return true;
    w.hi.insert(tuples[k]);
    w.lo.insert(tuples[k]);
    bool ok = self(self, k + 1);
    w.lo.erase(tuples[k]);
    return ok;
  };
  try {
    return rec(rec, 0) ? WitnessResult::True : WitnessResult::False;
  } catch (const WitnessAbort&) {
    return WitnessResult::Unknown;
  }
}

}  // namespace relfix
