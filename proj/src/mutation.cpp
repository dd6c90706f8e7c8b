#include "relfix/mutation.hpp"

#include <algorithm>

#include "relfix/errors.hpp"

namespace relfix {

std::string_view mut_op_name(MutOp op) {
  static constexpr std::string_view names[kMutOpCount] = {
      "logic-replace",     "compare-replace",  "setop-replace",     "quant-replace",  "mult-replace",
      "unary-replace",     "product-join-swap", "operand-swap",     "var-replace",    "field-replace",
      "sigconst-replace",  "int-nudge",        "join-extend-right", "join-extend-left", "join-truncate",
      "unary-insert",      "unary-remove",     "neg-insert",        "neg-remove",     "to-true",
      "to-false"};
  return names[static_cast<std::size_t>(op)];
}

MutationSite::MutationSite(const Spec& s, const Location& loc) : spec_(&s), loc_(loc), env_(s) {
  original_ = node_at(s, loc.path);
  if (!original_) throw LocationError(LocationError::Kind::NoMatch, "location does not resolve");
  ctx_ = context_at(env_, loc.path.decl, loc.path.steps);
  if (original_->sort() == Sort::Expr) {
    Context c = ctx_;
    arity_ = TypeChecker(env_).expr(*original_, c).arity();
  }
  bitwidth_ = 0;
  for (const auto& c : s.commands)
    bitwidth_ = bitwidth_ == 0 ? c.scope.bitwidth : std::min(bitwidth_, c.scope.bitwidth);
  if (bitwidth_ == 0) bitwidth_ = 4;
}

namespace {

bool stacked(const Node& n) {
  for (const auto& k : n.kids) {
    bool closure_pair = (n.op == Op::Closure || n.op == Op::RClosure) &&
                        (k->op == Op::Closure || k->op == Op::RClosure);
    if (closure_pair || (n.op == Op::Transpose && k->op == Op::Transpose) ||
        (n.op == Op::Not && k->op == Op::Not))
      return true;
    if (stacked(*k)) return true;
  }
  return false;
}

}  // namespace

bool MutationSite::acceptable(const NodePtr& c) const {
  if (c->sort() != original_->sort() || equal(*c, *original_) || stacked(*c)) return false;
  TypeChecker tc(env_);
  Context ctx = ctx_;
  try {
    RelType t = tc.any(*c, ctx);
    if (t.arity() != arity_) return false;
  } catch (const TypeError&) {
    return false;
  }
  return !tc.degenerate();
}

namespace {

constexpr Op kLogic[] = {Op::And, Op::Or, Op::Implies, Op::Iff};
constexpr Op kCompare[] = {Op::In, Op::NotIn, Op::Eq, Op::Neq, Op::Lt, Op::Le, Op::Gt, Op::Ge};
constexpr Op kSetOps[] = {Op::Union, Op::Diff, Op::Inter};
constexpr Op kQuants[] = {Op::QAll, Op::QSome, Op::QOne, Op::QLone, Op::QNo};
constexpr Op kMults[] = {Op::MNo, Op::MOne, Op::MLone, Op::MSome};
constexpr Op kUnary[] = {Op::Transpose, Op::Closure, Op::RClosure};

template <std::size_t K>
bool among(Op op, const Op (&set)[K]) {
  return std::find(std::begin(set), std::end(set), op) != std::end(set);
}

template <std::size_t K>
void replace_op(const Node& n, const Op (&set)[K], std::vector<NodePtr>& out) {
  if (!among(n.op, set)) return;
  for (Op o : set)
    if (o != n.op) out.push_back(with_op(n, o));
}

struct Position {
  std::vector<std::uint32_t> steps;
  NodePtr node;
  std::vector<std::string> vars;  // variables in scope, outermost first
};

bool is_true(const Node& n) { return n.op == Op::Block && n.kids.empty(); }
bool is_false(const Node& n) { return n.op == Op::Not && is_true(*n.kids[0]); }

}  // namespace

std::vector<Mutant> CatalogMutator::children(const Mutant& parent) const {
  const MutationSite& site = *site_;
  const Spec& s = site.spec();

  std::vector<std::string> base;
  for (const auto& [name, t] : site.context()) base.push_back(name);
  std::vector<Position> positions;
  {
    std::vector<std::uint32_t> steps;
    std::vector<std::string> vars = base;
    auto rec = [&](auto& self, const NodePtr& n) -> void {
      positions.push_back({steps, n, vars});
      const bool binds = n->is_quantifier() || n->op == Op::Compr;
      std::size_t pushed = 0;
      for (std::uint32_t i = 0; i < n->kids.size(); ++i) {
        if (binds && i > 0 && i <= n->vars.size()) {
          vars.push_back(n->vars[i - 1]);
          ++pushed;
        }
        steps.push_back(i);
        self(self, n->kids[i]);
        steps.pop_back();
      }
      vars.resize(vars.size() - pushed);
    };
    rec(rec, parent.node);
  }

  std::vector<std::string> fields, sigs = s.sig_names();
  for (const auto& d : s.sigs)
    for (const auto& f : d.fields) fields.push_back(f.name);
  const std::int64_t int_min = -(std::int64_t{1} << (site.bitwidth() - 1));
  const std::int64_t int_max = (std::int64_t{1} << (site.bitwidth() - 1)) - 1;

  std::vector<Mutant> out;
  std::vector<NodePtr> repl;
  for (std::size_t opi = 0; opi < kMutOpCount; ++opi) {
    const auto op = static_cast<MutOp>(opi);
    for (const auto& pos : positions) {
      const Node& n = *pos.node;
      const bool formula = n.sort() == Sort::Formula;
      const bool is_var = n.op == Op::Ref &&
                          std::find(pos.vars.begin(), pos.vars.end(), n.name) != pos.vars.end();
      repl.clear();
      switch (op) {
        case MutOp::LogicReplace: replace_op(n, kLogic, repl); break;
        case MutOp::NegInsert:
          if (formula && n.op != Op::Not) repl.push_back(make_node(Op::Not, {pos.node}));
          break;
        case MutOp::NegRemove:
          if (n.op == Op::Not) repl.push_back(n.kids[0]);
          break;
        case MutOp::CompareReplace:
          if (n.is_compare()) {
            // Integer comparisons first for an integer comparison, set ones first otherwise.
            const bool int_cmp = n.op >= Op::Lt && n.op <= Op::Ge;
            for (int pass = 0; pass < 2; ++pass)
              for (Op o : kCompare)
                if (o != n.op && ((o >= Op::Lt && o <= Op::Ge) == int_cmp) == (pass == 0))
                  repl.push_back(with_op(n, o));
          }
          break;
        case MutOp::SetOpReplace: replace_op(n, kSetOps, repl); break;
        case MutOp::QuantReplace: replace_op(n, kQuants, repl); break;
        case MutOp::MultReplace: replace_op(n, kMults, repl); break;
        case MutOp::UnaryInsert:
          if (!formula)
            for (Op u : kUnary) repl.push_back(make_node(u, {pos.node}));
          break;
        case MutOp::UnaryRemove:
          if (n.is_unary_rel()) repl.push_back(n.kids[0]);
          break;
        case MutOp::UnaryReplace: replace_op(n, kUnary, repl); break;
        case MutOp::JoinExtendRight:
          if (!formula)
            for (const auto& f : fields) repl.push_back(make_node(Op::Join, {pos.node, make_ref(f)}));
          break;
        case MutOp::JoinExtendLeft:
          if (!formula)
            for (const auto& f : fields) repl.push_back(make_node(Op::Join, {make_ref(f), pos.node}));
          break;
        case MutOp::JoinTruncate:
          if (n.op == Op::Join) repl.push_back(n.kids[0]);
          break;
        case MutOp::OperandSwap:
          if (n.op == Op::Diff || n.op == Op::Join || n.op == Op::Product || n.op == Op::Implies ||
              (n.is_compare() && n.op != Op::Eq && n.op != Op::Neq))
            repl.push_back(with_kids(n, {n.kids[1], n.kids[0]}));
          break;
        case MutOp::VarReplace:
          if (is_var) {
            std::vector<std::string> seen;
            for (auto it = pos.vars.rbegin(); it != pos.vars.rend(); ++it) {
              if (*it == n.name || std::find(seen.begin(), seen.end(), *it) != seen.end()) continue;
              seen.push_back(*it);
            }
            std::reverse(seen.begin(), seen.end());
            for (const auto& v : seen) repl.push_back(make_ref(v));
          }
          break;
        case MutOp::FieldReplace:
          if (n.op == Op::Ref && !is_var && std::find(fields.begin(), fields.end(), n.name) != fields.end())
            for (const auto& f : fields)
              if (f != n.name) repl.push_back(make_ref(f));
          break;
        case MutOp::SigConstReplace: {
          const bool sig_ref = n.op == Op::Ref && !is_var &&
                               std::find(sigs.begin(), sigs.end(), n.name) != sigs.end();
          if (sig_ref || is_var || n.op == Op::Univ || n.op == Op::None || n.op == Op::IntUniv) {
            for (const auto& g : sigs)
              if (!(sig_ref && g == n.name)) repl.push_back(make_ref(g));
            if (n.op != Op::Univ) repl.push_back(make_node(Op::Univ));
            if (n.op != Op::None) repl.push_back(make_node(Op::None));
            if (n.op != Op::IntUniv) repl.push_back(make_node(Op::IntUniv));
          }
          break;
        }
        case MutOp::ToTrue:
          if (formula && !is_true(n)) repl.push_back(make_true());
          break;
        case MutOp::ToFalse:
          if (formula && !is_false(n)) repl.push_back(make_false());
          break;
        case MutOp::IntNudge:
          if (n.op == Op::IntLit) {
            if (n.value - 1 >= int_min) repl.push_back(make_int(n.value - 1));
            if (n.value + 1 <= int_max) repl.push_back(make_int(n.value + 1));
          }
          break;
        case MutOp::ProductJoinSwap:
          if (n.op == Op::Join) repl.push_back(with_op(n, Op::Product));
          else if (n.op == Op::Product) repl.push_back(with_op(n, Op::Join));
          break;
      }
      for (auto& r : repl) {
        NodePtr whole = replace_at(parent.node, pos.steps, r);
        if (!site.acceptable(whole) || equal(*whole, *parent.node)) continue;
        Mutant m{whole, parent.lineage};
        m.lineage.push_back(op);
        out.push_back(std::move(m));
      }
    }
  }
  return out;
}

std::vector<Mutant> generate_mutants(const Spec& s, const Location& loc) {
  auto site = std::make_shared<const MutationSite>(s, loc);
  auto mut = std::make_shared<const CatalogMutator>(site);
  MutantStream stream(mut, site->original(), 1);
  std::vector<Mutant> out;
  for (std::size_t i = 0; const Mutant* m = stream.at(i); ++i) out.push_back(*m);
  return out;
}

bool is_well_formed_mutant(const Spec& s, const Location& loc, const NodePtr& m) {
  return MutationSite(s, loc).acceptable(m);
}

MutantStream::MutantStream(std::shared_ptr<const Mutator> mutator, NodePtr original, std::size_t max_depth)
    : mutator_(std::move(mutator)), max_depth_(max_depth) {
  // items_[0] is the original; it seeds depth 1 but is not part of the stream.
  seen_.insert(original);
  items_.push_back(Mutant{std::move(original), {}});
  level_end_.push_back(1);
}

bool MutantStream::grow() {
  const std::size_t d = level_end_.size() - 1;
  if (d >= max_depth_) return false;
  const std::size_t from = d == 0 ? 0 : level_end_[d - 1], to = level_end_[d];
  for (std::size_t i = from; i < to; ++i)
    for (auto& c : mutator_->children(items_[i]))
      if (seen_.insert(c.node).second) items_.push_back(std::move(c));
  level_end_.push_back(items_.size());
  return true;
}

const Mutant* MutantStream::at(std::size_t i) {
  while (i + 1 >= items_.size())
    if (!grow()) return nullptr;
  return &items_[i + 1];
}

std::size_t MutantStream::count_upto(std::size_t d) {
  d = std::min(d, max_depth_);
  while (level_end_.size() - 1 < d && grow()) {
  }
  return level_end_[d] - 1;
}

}  // namespace relfix
