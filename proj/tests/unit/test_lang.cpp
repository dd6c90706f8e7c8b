#include <fstream>
#include <sstream>

#include "doctest.h"
#include "relfix/analysis.hpp"
#include "relfix/errors.hpp"
#include "relfix/location.hpp"
#include "relfix/parser.hpp"
#include "relfix/printer.hpp"
#include "support/random_spec.hpp"

using namespace relfix;

static std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST_CASE("list figure parses with the expected shape") {
  Spec s = parse(slurp("figures/list.rspec"), "list.rspec");
  CHECK(s.sigs.size() == 4);
  CHECK(s.facts.size() == 2);
  CHECK(s.preds.size() == 5);
  CHECK(s.asserts.size() == 1);
  CHECK(s.commands.size() == 2);
  CHECK(s.marked.size() == 2);
  std::string text = pretty_print(s);
  Spec t = parse(text, "again.rspec");
  CHECK(equal(s, t));
  CHECK(pretty_print(t) == text);
}

TEST_CASE("minimal and small specs") {
  Spec s = parse("sig A {}");
  REQUIRE(s.sigs.size() == 1);
  CHECK(s.sigs[0].fields.empty());
  CHECK(pretty_print(s).find("sig A {}") != std::string::npos);

  Spec t = parse("sig A { f: one A } pred P[x:A]{ x.f = x }");
  CHECK(equal(t, parse(pretty_print(t))));
}

TEST_CASE("random specs survive a print and re-parse") {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    testing::RandomSpecOptions opt;
    opt.rich = true;
    opt.depth = 4;
    testing::RandomSpecGen gen(seed, opt);
    const std::string text = gen.spec();
    Spec s = parse(text, "random.rspec");
    const std::string printed = pretty_print(s);
    Spec again = parse(printed, "printed.rspec");
    INFO(text);
    INFO(printed);
    REQUIRE(equal(s, again));
    REQUIRE(pretty_print(again) == printed);
  }
}

TEST_CASE("parse errors carry a span and the expected tokens") {
  try {
    parse("sig A { f: set }", "bad.rspec");
    FAIL("no error");
  } catch (const ParseError& e) {
    CHECK(e.span().start_line == 1);
    CHECK(e.describe().find("bad.rspec:1:") == 0);
  }
  CHECK_THROWS_AS(parse("sig A {} sig A {}"), ResolveError);
  CHECK_THROWS_AS(parse("pred P { Q[] }"), ResolveError);
  CHECK_THROWS_AS(parse("sig A {} fact { some B }"), ResolveError);
}

TEST_CASE("location markers") {
  Spec s = parse(slurp("figures/list.rspec"), "list.rspec");
  Location sorted = resolve_location(s, "Sorted/0/1");
  CHECK(sorted.sort == Sort::Formula);
  CHECK(to_string(node_at(s, sorted.path)) == "n.elem < n.link.elem");
  CHECK(describe(s, sorted) == "Sorted/0/1");

  auto marked = marked_locations(s);
  REQUIRE(marked.size() == 2);
  CHECK(describe(s, marked[0]) == "Sorted/0");
  CHECK(describe(s, marked[1]) == "Contains/0");
  CHECK(read_locations(s, slurp("figures/list.locs")) == marked);

  // A sig or field name is not mutable territory.
  CHECK_THROWS_AS(resolve_location(s, "Node"), LocationError);
  CHECK_THROWS_AS(resolve_location(s, "link"), LocationError);
  // Inside the oracle assertion.
  CHECK_THROWS_AS(resolve_location(s, "ContainsCorrect/0"), LocationError);
  CHECK_THROWS_AS(resolve_location(s, "Sorted/7"), LocationError);
}

TEST_CASE("span markers resolve to the exact node or fail") {
  Spec s = parse("sig A { f: set A }\npred P {\n  some f\n  no f.f\n}\n", "p.rspec");
  Location l = resolve_location(s, "3:3..3:9");
  CHECK(to_string(node_at(s, l.path)) == "some f");
  CHECK(describe(s, l) == "P/0");
  // Two sibling conjuncts: no single node has that span.
  try {
    resolve_location(s, "3:3..4:9");
    FAIL("no error");
  } catch (const LocationError& e) {
    CHECK(e.kind() == LocationError::Kind::NotUnique);
  }
  try {
    resolve_location(s, "1:1..1:19");
    FAIL("no error");
  } catch (const LocationError& e) {
    CHECK(e.kind() == LocationError::Kind::Forbidden);
  }
}

TEST_CASE("apply_patch") {
  Spec s = parse(slurp("figures/list.rspec"), "list.rspec");
  Location body = resolve_location(s, "Sorted/0/1");
  Spec p = apply_patch(s, {{body, parse_node("n.elem <= n.link.elem")}});
  CHECK(to_string(node_at(p, body.path)) == "n.elem <= n.link.elem");
  CHECK(pretty_print(p).find("n.elem <= n.link.elem") != std::string::npos);
  CHECK(equal(parse(pretty_print(p)), p));

  CHECK(equal(apply_patch(s, {}), s));

  Location join = resolve_location(s, "Sorted/0/1/0");  // n.elem, arity 1
  CHECK_THROWS_AS(apply_patch(s, {{join, parse_node("link")}}), TypeError);
  CHECK_THROWS_AS(apply_patch(s, {{body, parse_node("n.elem")}}), TypeError);

  // Disjoint patches compose, and other locations keep their paths.
  Location contains = resolve_location(s, "Contains/0");
  auto a1 = Patch{{body, parse_node("n.elem <= n.link.elem")}};
  auto a2 = Patch{{contains, parse_node("RepOk[This]")}};
  Patch both = a1;
  both.insert(both.end(), a2.begin(), a2.end());
  CHECK(equal(apply_patch(s, both), apply_patch(apply_patch(s, a1), a2)));
  CHECK(to_string(node_at(apply_patch(s, a1), contains.path)) == to_string(node_at(s, contains.path)));
}
