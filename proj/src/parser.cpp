#include "relfix/parser.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <unordered_map>

#include "relfix/errors.hpp"
#include "relfix/lexer.hpp"

namespace relfix {

namespace {

bool is_keyword(std::string_view s) {
  static const std::set<std::string_view> kw = {
      "sig",  "abstract", "one",  "lone", "some",   "no",    "all",     "set",
      "extends", "fact",  "pred", "assert", "run",  "check", "for",     "but",
      "exactly", "expect", "in",  "not",  "and",    "or",    "implies", "iff",
      "iden", "univ",     "none", "Int"};
  return kw.count(s) > 0;
}

SourceSpan join_spans(const SourceSpan& a, const SourceSpan& b) {
  SourceSpan s = a;
  s.end_line = b.end_line;
  s.end_col = b.end_col;
  return s;
}

class Parser {
 public:
  Parser(std::vector<Token> raw) {
    // Strip marker tokens, remembering which real token each one precedes.
    for (auto& t : raw) {
      if (t.kind == TokKind::LocMarker) {
        loc_marks_.push_back({static_cast<int>(toks_.size()), t.span});
      } else if (t.kind == TokKind::OracleMarker) {
        oracle_marks_.insert(static_cast<int>(toks_.size()));
      } else {
        toks_.push_back(std::move(t));
      }
    }
  }

  Spec parse_spec(std::shared_ptr<const std::string> file) {
    Spec s;
    s.file = std::move(file);
    std::vector<int> cmd_tokens;
    while (!at_end()) {
      if (peek().is("abstract") || peek().is("one") || peek().is("sig")) {
        s.sigs.push_back(parse_sig());
      } else if (peek().is("fact")) {
        s.facts.push_back(parse_fact());
      } else if (peek().is("pred")) {
        s.preds.push_back(parse_pred());
      } else if (peek().is("assert")) {
        s.asserts.push_back(parse_assert());
      } else if (peek().is("run") || peek().is("check")) {
        cmd_tokens.push_back(pos_);
        s.commands.push_back(parse_command());
      } else {
        fail("expected declaration", {"sig", "fact", "pred", "assert", "run", "check"});
      }
    }
    bool any_oracle_mark = false;
    for (int t : cmd_tokens) any_oracle_mark |= oracle_marks_.count(t) > 0;
    for (int t : oracle_marks_)
      if (std::find(cmd_tokens.begin(), cmd_tokens.end(), t) == cmd_tokens.end())
        throw LocationError(LocationError::Kind::BadMarker,
                            "//@oracle must precede a run or check command", toks_[t].span);
    if (any_oracle_mark)
      for (std::size_t i = 0; i < cmd_tokens.size(); ++i)
        s.commands[i].is_oracle = oracle_marks_.count(cmd_tokens[i]) > 0;
    attach_markers(s);
    return s;
  }

  NodePtr parse_standalone() {
    auto n = parse_formula();
    if (!at_end()) fail("unexpected trailing input", {});
    return n;
  }

 private:
  struct Mark {
    int token;
    SourceSpan span;
  };

  std::vector<Token> toks_;
  int pos_ = 0;
  std::vector<Mark> loc_marks_;
  std::set<int> oracle_marks_;
  // Outermost node whose text starts at a token; node wrapped by a paren at a token.
  std::unordered_map<int, const Node*> starts_;
  std::unordered_map<int, const Node*> paren_groups_;

  const Token& peek(int k = 0) const {
    auto idx = std::min<std::size_t>(pos_ + k, toks_.size() - 1);
    return toks_[idx];
  }
  bool at_end() const { return peek().kind == TokKind::End; }
  const Token& take() {
    const Token& t = toks_[pos_];
    if (t.kind != TokKind::End) ++pos_;
    return t;
  }
  SourceSpan prev_end_span(const SourceSpan& start) const {
    if (pos_ == 0) return start;
    return join_spans(start, toks_[pos_ - 1].span);
  }

  [[noreturn]] void fail(const std::string& msg, std::vector<std::string> expected) const {
    std::string m = msg + ", found '" + peek().text + "'";
    if (!expected.empty()) {
      m += " (expected ";
      for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i) m += ", ";
        m += "'" + expected[i] + "'";
      }
      m += ")";
    }
    throw ParseError(m, peek().span);
  }

  bool accept(std::string_view s) {
    if (peek().is(s)) {
      take();
      return true;
    }
    return false;
  }
  const Token& expect(std::string_view s) {
    if (!peek().is(s)) fail("syntax error", {std::string(s)});
    return take();
  }
  std::string expect_name() {
    if (peek().kind != TokKind::Ident || is_keyword(peek().text)) fail("expected a name", {"name"});
    return take().text;
  }
  int expect_number() {
    if (peek().kind != TokKind::Number) fail("expected a number", {"number"});
    return static_cast<int>(take().number);
  }

  NodePtr finish(int start, NodePtr n) {
    starts_[start] = n.get();
    return n;
  }
  NodePtr build(int start, Op op, std::vector<NodePtr> kids) {
    SourceSpan sp = prev_end_span(toks_[start].span);
    return finish(start, make_node(op, std::move(kids), sp));
  }

  void need(const NodePtr& n, Sort s, const char* what) const {
    if (n->sort() != s)
      throw ParseError(std::string("expected ") + what + " but found " +
                           (n->sort() == Sort::Expr ? "an expression" : "a formula"),
                       n->span);
  }

  // ---- declarations ------------------------------------------------------

  SigDecl parse_sig() {
    SigDecl d;
    auto start = peek().span;
    if (accept("abstract")) {
      d.qual = SigQual::Abstract;
      if (peek().is("one")) fail("an abstract sig cannot be 'one'", {"sig"});
    } else if (accept("one")) {
      d.qual = SigQual::One;
      if (peek().is("abstract")) fail("an abstract sig cannot be 'one'", {"sig"});
    }
    expect("sig");
    d.names.push_back(expect_name());
    while (accept(",")) d.names.push_back(expect_name());
    if (accept("extends")) d.parent = expect_name();
    expect("{");
    if (!peek().is("}")) {
      do {
        auto fstart = peek().span;
        std::vector<std::string> names{expect_name()};
        while (accept(",")) names.push_back(expect_name());
        expect(":");
        FieldMult m = FieldMult::One;
        if (accept("set")) m = FieldMult::Set;
        else if (accept("lone")) m = FieldMult::Lone;
        else if (accept("one")) m = FieldMult::One;
        std::string range;
        if (accept("Int")) range = "Int";
        else range = expect_name();
        for (auto& n : names) d.fields.push_back({n, m, range, prev_end_span(fstart)});
      } while (accept(","));
    }
    expect("}");
    d.span = prev_end_span(start);
    return d;
  }

  FactDecl parse_fact() {
    FactDecl f;
    auto start = peek().span;
    expect("fact");
    if (peek().kind == TokKind::Ident && !is_keyword(peek().text)) f.name = take().text;
    f.body = parse_block();
    f.span = prev_end_span(start);
    return f;
  }

  PredDecl parse_pred() {
    PredDecl p;
    auto start = peek().span;
    expect("pred");
    p.name = expect_name();
    if (accept("[")) {
      if (!peek().is("]")) {
        do {
          std::vector<std::string> names{expect_name()};
          while (accept(",")) names.push_back(expect_name());
          expect(":");
          accept("one");
          std::string type = accept("Int") ? std::string("Int") : expect_name();
          for (auto& n : names) p.params.push_back({n, type});
        } while (accept(","));
      }
      expect("]");
    }
    p.body = parse_block();
    p.span = prev_end_span(start);
    return p;
  }

  AssertDecl parse_assert() {
    AssertDecl a;
    auto start = peek().span;
    expect("assert");
    a.name = expect_name();
    a.body = parse_block();
    a.span = prev_end_span(start);
    return a;
  }

  Command parse_command() {
    Command c;
    auto start = peek().span;
    c.kind = take().text == "run" ? CmdKind::Run : CmdKind::Check;
    c.target = expect_name();
    c.expect = c.kind == CmdKind::Run ? Expect::Sat : Expect::Valid;
    if (accept("for")) {
      auto typescope = [&](bool exactly, int n) {
        if (accept("Int")) {
          if (exactly) fail("'exactly' does not apply to Int", {});
          if (n < 1 || n > 8) throw ParseError("bitwidth must be between 1 and 8", peek().span);
          c.scope.bitwidth = n;
        } else {
          c.scope.overrides[expect_name()] = SigScope{n, exactly};
        }
      };
      auto typescope_follows = [&]() {
        if (peek().is("exactly")) return true;
        if (peek().kind != TokKind::Number) return false;
        const auto& t = peek(1);
        return t.is("Int") || (t.kind == TokKind::Ident && !is_keyword(t.text));
      };
      auto typescopes = [&]() {
        do {
          bool ex = accept("exactly");
          typescope(ex, expect_number());
        } while (accept(","));
      };
      if (typescope_follows()) {
        typescopes();
      } else {
        c.scope.default_count = expect_number();
        if (accept("but")) typescopes();
      }
    }
    if (accept("expect")) {
      int e = expect_number();
      if (e != 0 && e != 1) throw ParseError("expect must be 0 or 1", toks_[pos_ - 1].span);
      if (c.kind == CmdKind::Run) {
        c.expect = e == 1 ? Expect::Sat : Expect::Unsat;
      } else if (e != 0) {
        throw ParseError("check commands can only expect 0 (no counterexample)",
                         toks_[pos_ - 1].span);
      }
    }
    c.span = prev_end_span(start);
    return c;
  }

  NodePtr parse_block() {
    int start = pos_;
    expect("{");
    std::vector<NodePtr> items;
    while (!peek().is("}")) {
      if (at_end()) fail("unterminated block", {"}"});
      auto f = parse_formula();
      need(f, Sort::Formula, "a formula");
      items.push_back(std::move(f));
    }
    expect("}");
    return build(start, Op::Block, std::move(items));
  }

  // ---- formulas and expressions -----------------------------------------

  NodePtr parse_formula() { return parse_or(); }

  NodePtr logic(int start, Op op, NodePtr a, NodePtr b) {
    need(a, Sort::Formula, "a formula");
    need(b, Sort::Formula, "a formula");
    return build(start, op, {std::move(a), std::move(b)});
  }
  NodePtr rel(int start, Op op, NodePtr a, NodePtr b) {
    need(a, Sort::Expr, "an expression");
    need(b, Sort::Expr, "an expression");
    return build(start, op, {std::move(a), std::move(b)});
  }

  NodePtr parse_or() {
    int start = pos_;
    auto lhs = parse_iff();
    while (peek().is("||") || peek().is("or")) {
      take();
      lhs = logic(start, Op::Or, lhs, parse_iff());
    }
    return lhs;
  }

  NodePtr parse_iff() {
    int start = pos_;
    auto lhs = parse_implies();
    while (peek().is("<=>") || peek().is("iff")) {
      take();
      lhs = logic(start, Op::Iff, lhs, parse_implies());
    }
    return lhs;
  }

  NodePtr parse_implies() {
    int start = pos_;
    auto lhs = parse_and();
    if (peek().is("=>") || peek().is("implies")) {
      take();
      return logic(start, Op::Implies, lhs, parse_implies());
    }
    return lhs;
  }

  NodePtr parse_and() {
    int start = pos_;
    auto lhs = parse_unary_formula();
    while (peek().is("&&") || peek().is("and")) {
      take();
      lhs = logic(start, Op::And, lhs, parse_unary_formula());
    }
    return lhs;
  }

  bool at_quantifier() const {
    const auto& t = peek();
    if (!(t.is("all") || t.is("some") || t.is("no") || t.is("one") || t.is("lone"))) return false;
    if (peek(1).kind != TokKind::Ident || is_keyword(peek(1).text)) return false;
    return peek(2).is(":") || peek(2).is(",");
  }

  NodePtr parse_unary_formula() {
    int start = pos_;
    if ((peek().is("!") || peek().is("not")) && !peek(1).is("in")) {
      take();
      auto f = parse_unary_formula();
      need(f, Sort::Formula, "a formula");
      return build(start, Op::Not, {std::move(f)});
    }
    if (at_quantifier()) return parse_quantifier();
    return parse_compare();
  }

  std::vector<std::pair<std::string, NodePtr>> parse_decls() {
    std::vector<std::pair<std::string, NodePtr>> decls;
    do {
      std::vector<std::string> names{expect_name()};
      while (accept(",")) names.push_back(expect_name());
      expect(":");
      int bstart = pos_;
      auto bound = parse_union();
      need(bound, Sort::Expr, "an expression");
      for (std::size_t i = 0; i < names.size(); ++i) {
        // Each variable owns a copy of a shared bound so nodes keep a single parent.
        decls.emplace_back(names[i], i + 1 == names.size() ? bound : clone(bound));
      }
      (void)bstart;
    } while (accept(","));
    return decls;
  }

  static NodePtr clone(const NodePtr& n) {
    std::vector<NodePtr> kids;
    for (const auto& k : n->kids) kids.push_back(clone(k));
    return with_kids(*n, std::move(kids));
  }

  NodePtr parse_quantifier() {
    int start = pos_;
    auto q = take().text;
    Op op = q == "all" ? Op::QAll
            : q == "some" ? Op::QSome
            : q == "no" ? Op::QNo
            : q == "one" ? Op::QOne
                         : Op::QLone;
    auto decls = parse_decls();
    expect("|");
    auto body = parse_formula();
    need(body, Sort::Formula, "a formula");
    std::vector<std::string> vars;
    std::vector<NodePtr> kids;
    for (auto& [v, b] : decls) {
      vars.push_back(v);
      kids.push_back(b);
    }
    kids.push_back(body);
    SourceSpan sp = prev_end_span(toks_[start].span);
    return finish(start, make_binder(op, std::move(vars), std::move(kids), sp));
  }

  NodePtr parse_compare() {
    int start = pos_;
    auto lhs = parse_mult();
    Op op;
    if (peek().is("in")) {
      op = Op::In;
    } else if ((peek().is("!") || peek().is("not")) && peek(1).is("in")) {
      take();
      op = Op::NotIn;
    } else if (peek().is("=")) {
      op = Op::Eq;
    } else if (peek().is("!=")) {
      op = Op::Neq;
    } else if (peek().is("<")) {
      op = Op::Lt;
    } else if (peek().is("<=") || peek().is("=<")) {
      op = Op::Le;
    } else if (peek().is(">")) {
      op = Op::Gt;
    } else if (peek().is(">=")) {
      op = Op::Ge;
    } else {
      return lhs;
    }
    take();
    auto rhs = parse_mult();
    return rel(start, op, lhs, rhs);
  }

  NodePtr parse_mult() {
    int start = pos_;
    const auto& t = peek();
    if ((t.is("no") || t.is("some") || t.is("lone") || t.is("one")) && !at_quantifier()) {
      auto kw = take().text;
      Op op = kw == "no" ? Op::MNo : kw == "some" ? Op::MSome : kw == "lone" ? Op::MLone : Op::MOne;
      auto e = parse_union();
      need(e, Sort::Expr, "an expression");
      return build(start, op, {std::move(e)});
    }
    return parse_union();
  }

  NodePtr parse_union() {
    int start = pos_;
    auto lhs = parse_card();
    while (peek().is("+") || peek().is("-")) {
      Op op = take().text == "+" ? Op::Union : Op::Diff;
      lhs = rel(start, op, lhs, parse_card());
    }
    return lhs;
  }

  NodePtr parse_card() {
    int start = pos_;
    if (accept("#")) {
      auto e = parse_card();
      need(e, Sort::Expr, "an expression");
      return build(start, Op::Card, {std::move(e)});
    }
    return parse_inter();
  }

  NodePtr parse_inter() {
    int start = pos_;
    auto lhs = parse_product();
    while (accept("&")) lhs = rel(start, Op::Inter, lhs, parse_product());
    return lhs;
  }

  NodePtr parse_product() {
    int start = pos_;
    auto lhs = parse_join();
    while (accept("->")) lhs = rel(start, Op::Product, lhs, parse_join());
    return lhs;
  }

  NodePtr parse_join() {
    int start = pos_;
    auto lhs = parse_unary_expr();
    while (accept(".")) lhs = rel(start, Op::Join, lhs, parse_unary_expr());
    return lhs;
  }

  NodePtr parse_unary_expr() {
    int start = pos_;
    Op op;
    if (peek().is("~")) op = Op::Transpose;
    else if (peek().is("^")) op = Op::Closure;
    else if (peek().is("*")) op = Op::RClosure;
    else return parse_primary();
    take();
    auto e = parse_unary_expr();
    need(e, Sort::Expr, "an expression");
    return build(start, op, {std::move(e)});
  }

  NodePtr parse_primary() {
    int start = pos_;
    const auto& t = peek();
    if (t.kind == TokKind::Number) {
      auto v = take().number;
      return finish(start, make_int(v, prev_end_span(toks_[start].span)));
    }
    if (t.is("-") && peek(1).kind == TokKind::Number) {
      take();
      auto v = -take().number;
      return finish(start, make_int(v, prev_end_span(toks_[start].span)));
    }
    if (t.is("iden")) return take(), build(start, Op::Iden, {});
    if (t.is("univ")) return take(), build(start, Op::Univ, {});
    if (t.is("none")) return take(), build(start, Op::None, {});
    if (t.is("Int")) return take(), build(start, Op::IntUniv, {});
    if (t.is("(")) {
      take();
      auto inner = parse_formula();
      expect(")");
      paren_groups_[start] = inner.get();
      return inner;
    }
    if (t.is("{")) {
      if (peek(1).kind == TokKind::Ident && !is_keyword(peek(1).text) &&
          (peek(2).is(":") || peek(2).is(","))) {
        take();
        auto decls = parse_decls();
        expect("|");
        auto body = parse_formula();
        need(body, Sort::Formula, "a formula");
        expect("}");
        std::vector<std::string> vars;
        std::vector<NodePtr> kids;
        for (auto& [v, b] : decls) {
          vars.push_back(v);
          kids.push_back(b);
        }
        kids.push_back(body);
        SourceSpan sp = prev_end_span(toks_[start].span);
        return finish(start, make_binder(Op::Compr, std::move(vars), std::move(kids), sp));
      }
      return parse_block();
    }
    if (t.kind == TokKind::Ident && !is_keyword(t.text)) {
      auto name = take().text;
      if (accept("[")) {
        std::vector<NodePtr> args;
        if (!peek().is("]")) {
          do {
            auto a = parse_union();
            need(a, Sort::Expr, "an expression");
            args.push_back(std::move(a));
          } while (accept(","));
        }
        expect("]");
        SourceSpan sp = prev_end_span(toks_[start].span);
        return finish(start, make_call(name, std::move(args), sp));
      }
      return finish(start, make_ref(name, prev_end_span(toks_[start].span)));
    }
    fail("expected an expression or formula", {"name", "number", "(", "{"});
  }

  // ---- inline location markers ------------------------------------------

  const Node* marked_node(const Mark& m) const {
    if (m.token < static_cast<int>(toks_.size()) && toks_[m.token].is("(")) {
      auto it = paren_groups_.find(m.token);
      if (it != paren_groups_.end()) return it->second;
    }
    auto it = starts_.find(m.token);
    return it == starts_.end() ? nullptr : it->second;
  }

  void attach_markers(Spec& s) {
    for (const auto& m : loc_marks_) {
      const Node* target = marked_node(m);
      bool found = false;
      if (target) {
        for (auto d : s.formula_decls()) {
          visit(s.body(d), [&](const NodePtr& n, const std::vector<std::uint32_t>& steps) {
            if (!found && n.get() == target) {
              s.marked.push_back({d, steps});
              found = true;
            }
          });
          if (found) break;
        }
      }
      if (!found)
        throw LocationError(LocationError::Kind::Forbidden,
                            "//@loc must precede an expression or formula inside a fact, "
                            "predicate or assertion",
                            m.span);
    }
  }
};

// ---- name resolution ------------------------------------------------------

class Resolver {
 public:
  explicit Resolver(const Spec& s) : s_(s) {}

  void run() {
    std::set<std::string> sigs, fields, preds, asserts, facts;
    for (const auto& d : s_.sigs) {
      for (const auto& n : d.names) {
        if (n == "Int" || n == "univ") throw ResolveError("reserved sig name '" + n + "'", d.span);
        if (!sigs.insert(n).second) throw ResolveError("duplicate sig '" + n + "'", d.span);
      }
      for (const auto& f : d.fields)
        if (!fields.insert(f.name).second)
          throw ResolveError("duplicate field '" + f.name + "'", f.span);
    }
    for (const auto& d : s_.sigs) {
      if (d.parent && !sigs.count(*d.parent))
        throw ResolveError("unknown parent sig '" + *d.parent + "'", d.span);
      for (const auto& f : d.fields)
        if (f.range != "Int" && !sigs.count(f.range))
          throw ResolveError("unknown sig '" + f.range + "' in field '" + f.name + "'", f.span);
    }
    check_extends_acyclic();
    for (const auto& p : s_.preds)
      if (!preds.insert(p.name).second) throw ResolveError("duplicate pred '" + p.name + "'", p.span);
    for (const auto& a : s_.asserts)
      if (!asserts.insert(a.name).second)
        throw ResolveError("duplicate assert '" + a.name + "'", a.span);
    for (const auto& f : s_.facts)
      if (!f.name.empty() && !facts.insert(f.name).second)
        throw ResolveError("duplicate fact '" + f.name + "'", f.span);

    for (const auto& f : s_.facts) check_formula(f.body, {});
    for (const auto& p : s_.preds) {
      std::vector<std::string> scope;
      std::set<std::string> seen;
      for (const auto& prm : p.params) {
        if (!seen.insert(prm.name).second)
          throw ResolveError("duplicate parameter '" + prm.name + "'", p.span);
        if (prm.type != "Int" && !sigs.count(prm.type))
          throw ResolveError("unknown sig '" + prm.type + "'", p.span);
        scope.push_back(prm.name);
      }
      check_formula(p.body, scope);
    }
    for (const auto& a : s_.asserts) check_formula(a.body, {});
    for (const auto& c : s_.commands) {
      bool ok = c.kind == CmdKind::Run ? s_.find_pred(c.target) != nullptr
                                       : s_.find_assert(c.target) != nullptr;
      if (!ok)
        throw ResolveError(std::string("command refers to unknown ") +
                               (c.kind == CmdKind::Run ? "pred '" : "assert '") + c.target + "'",
                           c.span);
      if (c.scope.default_count < 0)
        throw ResolveError("scope must be non-negative", c.span);
      for (const auto& [name, sc] : c.scope.overrides) {
        if (!sigs.count(name)) throw ResolveError("scope for unknown sig '" + name + "'", c.span);
        if (sc.count < 0) throw ResolveError("scope must be non-negative", c.span);
      }
    }
    check_recursion();
    check_marked();
  }

 private:
  const Spec& s_;

  void check_extends_acyclic() {
    for (const auto& d : s_.sigs) {
      std::set<std::string> seen(d.names.begin(), d.names.end());
      auto cur = d.parent;
      while (cur) {
        if (!seen.insert(*cur).second) throw ResolveError("cyclic extends chain", d.span);
        cur = s_.find_sig(*cur)->parent;
      }
    }
  }

  void check_formula(const NodePtr& n, std::vector<std::string> scope) {
    switch (n->op) {
      case Op::Ref: {
        if (std::find(scope.rbegin(), scope.rend(), n->name) != scope.rend()) return;
        if (s_.find_field(n->name) || s_.find_sig(n->name)) return;
        throw ResolveError("unknown identifier '" + n->name + "'", n->span);
      }
      case Op::PredCall: {
        auto* p = s_.find_pred(n->name);
        if (!p) throw ResolveError("unknown predicate '" + n->name + "'", n->span);
        if (p->params.size() != n->kids.size())
          throw ResolveError("predicate '" + n->name + "' expects " +
                                 std::to_string(p->params.size()) + " arguments",
                             n->span);
        for (const auto& k : n->kids) check_formula(k, scope);
        return;
      }
      case Op::Compr:
      case Op::QAll:
      case Op::QSome:
      case Op::QOne:
      case Op::QLone:
      case Op::QNo: {
        for (std::size_t i = 0; i < n->vars.size(); ++i) {
          check_formula(n->kids[i], scope);
          scope.push_back(n->vars[i]);
        }
        check_formula(n->body(), scope);
        return;
      }
      default:
        for (const auto& k : n->kids) check_formula(k, scope);
    }
  }

  void calls_in(const NodePtr& n, std::set<std::string>& out) {
    if (n->op == Op::PredCall) out.insert(n->name);
    for (const auto& k : n->kids) calls_in(k, out);
  }

  void check_recursion() {
    std::map<std::string, std::set<std::string>> graph;
    for (const auto& p : s_.preds) calls_in(p.body, graph[p.name]);
    std::map<std::string, int> state;
    std::function<void(const std::string&)> dfs = [&](const std::string& v) {
      state[v] = 1;
      for (const auto& w : graph[v]) {
        if (state[w] == 1)
          throw ResolveError("recursive predicate call through '" + w + "' is not supported",
                             s_.find_pred(w)->span);
        if (state[w] == 0) dfs(w);
      }
      state[v] = 2;
    };
    for (const auto& p : s_.preds)
      if (state[p.name] == 0) dfs(p.name);
  }

  void check_marked() {
    std::set<std::uint32_t> oracle_asserts;
    for (const auto& c : s_.commands)
      if (c.is_oracle && c.kind == CmdKind::Check) oracle_asserts.insert(*s_.assert_index(c.target));
    for (std::size_t i = 0; i < s_.marked.size(); ++i) {
      const auto& m = s_.marked[i];
      auto n = node_at(s_, m);
      if (m.decl.kind == DeclKind::Assert && oracle_asserts.count(m.decl.index))
        throw LocationError(LocationError::Kind::Forbidden,
                            "location lies inside an oracle assertion", n ? n->span : SourceSpan{});
      for (std::size_t j = 0; j < s_.marked.size(); ++j) {
        if (i == j || s_.marked[j].decl != m.decl) continue;
        const auto& a = m.steps;
        const auto& b = s_.marked[j].steps;
        if (a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin()))
          throw LocationError(LocationError::Kind::NotUnique, "nested or repeated //@loc markers",
                              n ? n->span : SourceSpan{});
      }
    }
  }
};

}  // namespace

void resolve(const Spec& s) { Resolver(s).run(); }

Spec parse(std::string_view source, std::string file_name) {
  auto file = std::make_shared<const std::string>(std::move(file_name));
  Parser p(tokenize(source, file));
  Spec s = p.parse_spec(file);
  resolve(s);
  return s;
}

NodePtr parse_node(std::string_view source) {
  Parser p(tokenize(source, std::make_shared<const std::string>("<replacement>")));
  return p.parse_standalone();
}

}  // namespace relfix
