#include <chrono>

#include "doctest.h"
#include "relfix/errors.hpp"
#include "relfix/eval.hpp"
#include "relfix/solver.hpp"
#include "support/checks.hpp"

using namespace relfix;
using relfix::testing::load_spec;

namespace {

std::uint32_t atom(const Universe& u, const std::string& name) {
  for (std::uint32_t i = 0; i < u.size(); ++i)
    if (u.atom_names[i] == name) return i;
  throw std::runtime_error("no atom " + name);
}

Instance empty_instance(const Spec& s, const Scope& sc) {
  Instance inst{Universe::build(s, sc), {}};
  for (const auto& r : inst.universe->rels) inst.rels.emplace_back(inst.universe->size(), r.arity);
  return inst;
}

void add(Instance& inst, const std::string& rel, std::vector<std::string> atoms) {
  std::vector<std::uint32_t> t;
  for (const auto& a : atoms) t.push_back(atom(*inst.universe, a));
  inst.rels[inst.universe->rel(rel)].insert(t);
}

// Two nodes n0 -> n1 -> n1 under one list; elems 0 and 1.
Instance looped_pair(const Spec& s) {
  Scope sc;
  sc.default_count = 2;
  Instance inst = empty_instance(s, sc);
  add(inst, "List", {"List$0"});
  add(inst, "Node", {"Node$0"});
  add(inst, "Node", {"Node$1"});
  add(inst, "header", {"List$0", "Node$0"});
  add(inst, "link", {"Node$0", "Node$1"});
  add(inst, "link", {"Node$1", "Node$1"});
  std::uint32_t e0[] = {atom(*inst.universe, "Node$0"), inst.universe->int_atom(0)};
  std::uint32_t e1[] = {atom(*inst.universe, "Node$1"), inst.universe->int_atom(1)};
  inst.rels[inst.universe->rel("elem")].insert(e0);
  inst.rels[inst.universe->rel("elem")].insert(e1);
  return inst;
}

std::map<std::string, TupleSet> bind(const Instance& inst, const std::string& var, const std::string& a) {
  std::uint32_t t[] = {atom(*inst.universe, a)};
  return {{var, TupleSet::single(inst.universe->size(), t)}};
}

}  // namespace

TEST_CASE("tuple sets") {
  const std::uint32_t n = 5;
  TupleSet r(n, 2);
  std::uint32_t ab[] = {0, 1}, bc[] = {1, 2}, ca[] = {2, 0};
  r.insert(ab);
  r.insert(bc);
  CHECK(r.count() == 2);
  CHECK(r.contains(ab));
  CHECK_FALSE(r.contains(ca));
  TupleSet t = transpose(r);
  std::uint32_t ba[] = {1, 0};
  CHECK(t.contains(ba));
  CHECK(transpose(t) == r);
  TupleSet j = join(r, r);
  std::uint32_t ac[] = {0, 2};
  CHECK(j.count() == 1);
  CHECK(j.contains(ac));
  CHECK(product(TupleSet::unary(n, 0b11), TupleSet::unary(n, 0b100)).count() == 2);
  CHECK((r | j).count() == 3);
  CHECK((r & j).empty());
  CHECK((r - r).empty());
  CHECK(TupleSet::iden(n, 0b111).count() == 3);
  r.erase(ab);
  CHECK(r.count() == 1);
  std::vector<std::vector<std::uint32_t>> seen;
  (TupleSet::unary(n, 0b10110)).for_each([&](const auto& x) { seen.push_back(x); });
  CHECK(seen == std::vector<std::vector<std::uint32_t>>{{1}, {2}, {4}});
}

TEST_CASE("expression evaluation") {
  Spec s = load_spec("figures/list.rspec");
  Instance inst = looped_pair(s);
  const Universe& u = *inst.universe;
  TupleSet reach = eval_expr(s, parse_node("List.header.*link"), inst);
  CHECK(reach == TupleSet::unary(u.size(), (std::uint64_t{1} << atom(u, "Node$0")) | (std::uint64_t{1} << atom(u, "Node$1"))));
  TupleSet tr = eval_expr(s, parse_node("~link"), inst);
  std::uint32_t back[] = {atom(u, "Node$1"), atom(u, "Node$0")};
  CHECK(tr.contains(back));
  CHECK(tr.count() == 2);

  Scope three;
  three.overrides["Node"] = {3, true};
  Instance i3 = empty_instance(s, three);
  for (int k = 0; k < 3; ++k) add(i3, "Node", {"Node$" + std::to_string(k)});
  TupleSet c = eval_expr(s, parse_node("#{n: Node | n in Node}"), i3);
  std::uint32_t three_atom[] = {i3.universe->int_atom(3)};
  CHECK(c == TupleSet::single(i3.universe->size(), three_atom));
}

TEST_CASE("formula evaluation") {
  Spec s = load_spec("figures/list.rspec");
  Instance inst = looped_pair(s);
  CHECK(eval_formula(s, parse_node("all x: none | some x"), inst));
  CHECK(eval_formula(s, parse_node("Loop[List]"), inst));
  CHECK_FALSE(eval_formula(s, parse_node("Sorted[List]"), inst));
  CHECK(eval_formula(s, parse_node("n.elem < n.link.elem"), inst, bind(inst, "n", "Node$0")));

  Scope one;
  one.default_count = 1;
  Instance self = empty_instance(s, one);
  add(self, "List", {"List$0"});
  add(self, "Node", {"Node$0"});
  add(self, "header", {"List$0", "Node$0"});
  add(self, "link", {"Node$0", "Node$0"});
  std::uint32_t e[] = {atom(*self.universe, "Node$0"), self.universe->int_atom(0)};
  self.rels[self.universe->rel("elem")].insert(e);
  CHECK_FALSE(eval_formula(s, parse_node("Sorted[List]"), self));
  CHECK(eval_formula(s, parse_node("Loop[List]"), self));

  CHECK_THROWS_AS(parse("sig A {}\npred P { Q[] }\npred Q { P[] }\n"), Error);
}

TEST_CASE("instances print in a fixed order") {
  Spec s = load_spec("figures/list.rspec");
  const std::string text = looped_pair(s).str();
  CHECK(text.find("link = {(Node$0,Node$1), (Node$1,Node$1)}") != std::string::npos);
  CHECK(text.find("header = {(List$0,Node$0)}") != std::string::npos);
  CHECK(text.find("Node = {(Node$0), (Node$1)}") != std::string::npos);
}

TEST_CASE("solving the list figure") {
  Spec s = load_spec("figures/list.rspec");
  Scope sc = s.commands[0].scope;
  const auto repok = command_target(s, s.commands[0]);
  CHECK_FALSE(solve(s, repok, sc).sat);

  Spec fixed = load_spec("figures/list_fixed.rspec");
  SolveResult r = solve(fixed, command_target(fixed, fixed.commands[0]), fixed.commands[0].scope);
  REQUIRE(r.sat);
  const Instance& w = *r.instance;
  CHECK(w.rels[w.universe->rel("Node")].count() == 3);
  CHECK(eval_formula(fixed, parse_node("all n: Node | n.elem <= n.link.elem"), w));
  CHECK(eval_formula(fixed, parse_node("one n: Node | n.link = n"), w));
  CHECK(eval_formula(fixed, command_target(fixed, fixed.commands[0]), w));
  for (const auto& f : fixed.facts) CHECK(eval_formula(fixed, f.body, w));

  for (int k = 1; k <= 3; ++k) {
    Scope any;
    any.default_count = k;
    CHECK_FALSE(solve(s, parse_node("some none"), any).sat);
  }
}

TEST_CASE("commands against their expectations") {
  Spec s = load_spec("figures/list.rspec");
  auto run = check_command(s, s.commands[0]);
  CHECK(run.verdict(s.commands[0]) == "UNSAT");
  CHECK_FALSE(run.pass);
  auto chk = check_command(s, s.commands[1]);
  CHECK(chk.verdict(s.commands[1]) == "CEX");
  CHECK_FALSE(chk.pass);
  REQUIRE(chk.solve.instance);
  CHECK_FALSE(eval_formula(s, s.find_assert("ContainsCorrect")->body, *chk.solve.instance));

  Spec t = parse("sig A {}\nassert TrueAssert {\n  all x: univ | x in univ\n}\ncheck TrueAssert for 3\n");
  auto ok = check_command(t, t.commands[0]);
  CHECK(ok.verdict(t.commands[0]) == "VALID");
  CHECK(ok.pass);
}

TEST_CASE("solving is deterministic") {
  Spec s = load_spec("figures/list_fixed.rspec");
  auto a = solve(s, command_target(s, s.commands[0]), s.commands[0].scope);
  auto b = solve(s, command_target(s, s.commands[0]), s.commands[0].scope);
  REQUIRE(a.sat);
  CHECK(a.instance->str() == b.instance->str());
  CHECK(a.nodes == b.nodes);
}

TEST_CASE("scopes beyond the search are refused, deadlines are honoured") {
  Spec s = parse("sig A { f: set A }\nsig B {}\npred P { some f }\nrun P for 40\n");
  CHECK_THROWS_AS(solve(s, command_target(s, s.commands[0]), s.commands[0].scope), ResourceError);
  Spec fixed = load_spec("figures/list_fixed.rspec");
  Deadline past;
  past.at = std::chrono::steady_clock::now();
  CHECK_THROWS_AS(check_command(fixed, fixed.commands[1], past), DeadlineExceeded);
}

TEST_CASE("reference enumeration agrees with the search") {
  for (std::uint64_t seed = 1000; seed < 1060; ++seed) {
    auto r = relfix::testing::solver_vs_naive(seed);
    INFO(r.detail);
    CHECK(r.ok);
  }
}

TEST_CASE("evaluator laws") {
  for (std::uint64_t seed = 2000; seed < 2100; ++seed) {
    auto r = relfix::testing::evaluator_laws(seed);
    INFO(r.detail);
    CHECK(r.ok);
  }
}

// Changing a relation the formula never mentions leaves its value alone.
TEST_CASE("evaluation only reads referenced relations") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    relfix::testing::RandomSpecOptions opt;
    opt.max_fields = 3;
    opt.ints = false;
    relfix::testing::RandomSpecGen gen(seed, opt);
    Spec s = parse(gen.spec());
    if (gen.fields().empty()) continue;
    const std::string f = gen.formula(3);
    const std::string& victim = gen.fields().back().name;
    if (f.find(victim) != std::string::npos) continue;
    std::mt19937_64 rng(seed);
    Instance a = relfix::testing::random_instance(s, s.commands[0].scope, rng);
    Instance b = a;
    const Instance other = relfix::testing::random_instance(s, s.commands[0].scope, rng);
    const int id = a.universe->rel(victim);
    b.rels[id] = other.rels[id];
    INFO(f);
    CHECK(eval_formula(s, parse_node(f), a) == eval_formula(s, parse_node(f), b));
  }
}

TEST_CASE("relation witnesses on a fixed counterexample") {
  Spec s = load_spec("figures/list.rspec");
  const auto locs = marked_locations(s);
  const Location& sorted = locs[0];
  const Location& contains = locs[1];

  // Contains weakened so that it holds whenever RepOk fails: no value of the
  // Sorted quantifier rescues the counterexample.
  Spec weak = apply_patch(
      s, {{contains, parse_node("RepOk[This] || ((x !in This.header.*link.elem => res = False) || res = True)")}});
  auto cex = check_command(weak, weak.commands[1]);
  REQUIRE_FALSE(cex.pass);
  auto [ctx, wtype] = bounding_type(weak, sorted);
  Spec sv = variabilize(weak, sorted, ctx);
  CHECK(exists_relation_witness(*cex.solve.instance, wtype, ctx, sv, rescue_target(sv, weak.commands[1])) ==
        WitnessResult::False);

  // The original counterexample is rescued by making Sorted false.
  auto orig = check_command(s, s.commands[1]);
  Spec so = variabilize(s, sorted, ctx);
  CHECK(exists_relation_witness(*orig.solve.instance, wtype, ctx, so, rescue_target(so, s.commands[1])) ==
        WitnessResult::True);

  // Three context columns: more candidate tuples than a small cap allows.
  auto [cctx, ctype] = bounding_type(s, contains);
  Spec sc = variabilize(s, contains, cctx);
  CHECK(exists_relation_witness(*orig.solve.instance, ctype, cctx, sc, rescue_target(sc, s.commands[1]), 4) ==
        WitnessResult::Unknown);
}

TEST_CASE("witness search finds a unique required value") {
  Spec s = parse(
      "sig A { f: lone A }\npred R[x: A] {\n  //@loc\n  some x.f\n}\nassert X {\n  all x: A | R[x] <=> x in A.f\n}\ncheck X for 3\n");
  typecheck_spec(s);
  const Location loc = marked_locations(s).at(0);
  auto r = check_command(s, s.commands[0]);
  REQUIRE_FALSE(r.pass);
  auto [ctx, wtype] = bounding_type(s, loc);
  Spec sv = variabilize(s, loc, ctx);
  CHECK(exists_relation_witness(*r.solve.instance, wtype, ctx, sv, rescue_target(sv, s.commands[0])) ==
        WitnessResult::True);

  // An instance that is not a counterexample needs no particular witness.
  Instance none = empty_instance(s, s.commands[0].scope);
  CHECK(exists_relation_witness(none, wtype, ctx, sv, rescue_target(sv, s.commands[0])) == WitnessResult::True);
}
