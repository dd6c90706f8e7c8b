#include <chrono>

#include "doctest.h"
#include "relfix/printer.hpp"
#include "relfix/repair.hpp"
#include "support/checks.hpp"

using namespace relfix;
using relfix::testing::load_spec;

namespace {

std::uint32_t mutant_id(const Spec& s, const Location& loc, const std::string& text) {
  const auto ms = generate_mutants(s, loc);
  for (std::size_t i = 0; i < ms.size(); ++i)
    if (to_string(ms[i].node) == text) return static_cast<std::uint32_t>(i + 1);
  throw std::runtime_error("no mutant " + text);
}

RepairConfig quick(std::size_t depth, bool prune) {
  RepairConfig cfg;
  cfg.max_depth = depth;
  cfg.timeout = 120;
  cfg.prune = {prune, prune};
  return cfg;
}

std::uint64_t catalog_stream_size(const Spec& s, const Location& loc, std::size_t depth) {
  auto site = std::make_shared<const MutationSite>(s, loc);
  MutantStream st(std::make_shared<const CatalogMutator>(site), site->original(), depth);
  return st.count_upto(depth);
}

bool accounted(const RepairStats& st) { return st.generated == st.visited + st.pruned + st.remaining; }

const char* kSortedNeq = "all n: This.header.*link | n.elem != n.link.elem";
const char* kContainsAnd = "RepOk[This] && ((x !in This.header.*link.elem => res = False) && res = True)";

}  // namespace

TEST_CASE("fault detection") {
  Spec s = load_spec("figures/list.rspec");
  const auto faults = detect_faults(s);
  REQUIRE(faults.size() == 2);
  CHECK(faults[0].command == 0);
  CHECK(faults[1].command == 1);
  CHECK(faults[1].result.solve.instance.has_value());
  CHECK(detect_faults(load_spec("figures/list_fixed.rspec")).empty());
  Spec none = parse("sig A {}\npred P { some A }\n");
  CHECK_THROWS_AS(detect_faults(none), Error);
}

TEST_CASE("prune records") {
  PruneSet set;
  CHECK_FALSE(prune_filter({3, 7}, set));
  PruneRecord r{0b01, {3, 0}, PruneReason::PartialRepair, 0};
  CHECK(set.add(r));
  CHECK_FALSE(set.add(r));
  CHECK(set.size() == 1);
  CHECK(prune_filter({3, 7}, set));
  CHECK(prune_filter({3, 0}, set));
  CHECK_FALSE(prune_filter({2, 7}, set));
  CHECK(set.match({3, 7}, 0b01) != nullptr);
  CHECK(set.match({3, 7}, 0b10) == nullptr);
  PruneRecord all{0, {0, 0}, PruneReason::Variabilization, 1};
  set.add(all);
  CHECK(prune_filter({9, 9}, set));
}

TEST_CASE("partial repair pruning in the list figure") {
  Spec s = load_spec("figures/list.rspec");
  const auto locs = marked_locations(s);
  const Assignment a = {mutant_id(s, locs[0], kSortedNeq), mutant_id(s, locs[1], kContainsAnd)};
  Spec p = apply_patch(s, {{locs[0], parse_node(kSortedNeq)}, {locs[1], parse_node(kContainsAnd)}});
  REQUIRE_FALSE(check_command(p, p.commands[0]).pass);
  auto rec = partial_repair_prune(p, a, 0, locs);
  REQUIRE(rec);
  CHECK(rec->mask == 0b01);
  CHECK(rec->fragment[0] == a[0]);
  CHECK(rec->reason == PruneReason::PartialRepair);
  PruneSet set;
  set.add(*rec);
  for (std::uint32_t k = 0; k < 50; ++k) CHECK(prune_filter({a[0], k}, set));
  CHECK_FALSE(prune_filter({a[0] + 1, a[1]}, set));

  CHECK_FALSE(partial_repair_prune(p, a, 1, locs));
  CHECK_FALSE(partial_repair_prune(p, {a[0]}, 0, {locs[0]}));
}

TEST_CASE("variabilization pruning in the list figure") {
  Spec s = load_spec("figures/list.rspec");
  const auto locs = marked_locations(s);
  const std::string weak = "RepOk[This] || ((x !in This.header.*link.elem => res = False) || res = True)";
  const Assignment a = {0, mutant_id(s, locs[1], weak)};
  Spec p = apply_patch(s, {{locs[1], parse_node(weak)}});
  auto cex = check_command(p, p.commands[1]);
  REQUIRE_FALSE(cex.pass);
  WitnessResult wr;
  auto rec = variabilization_prune(p, a, 1, *cex.solve.instance, locs, 0, 24, &wr);
  CHECK(wr == WitnessResult::False);
  REQUIRE(rec);
  CHECK(rec->mask == 0b10);
  CHECK(rec->fragment[1] == a[1]);
  CHECK(rec->reason == PruneReason::Variabilization);

  // The original counterexample can be rescued through Sorted: no prune.
  auto orig = check_command(s, s.commands[1]);
  CHECK_FALSE(variabilization_prune(s, {0, 0}, 1, *orig.solve.instance, locs, 0, 24, &wr));
  CHECK(wr == WitnessResult::True);
  // A cap below the witness domain gives Unknown, which never prunes.
  CHECK_FALSE(variabilization_prune(s, {0, 0}, 1, *orig.solve.instance, locs, 1, 2, &wr));
  CHECK(wr == WitnessResult::Unknown);
  // Run commands have no counterexample to reason about.
  CHECK_FALSE(variabilization_prune(s, {0, 0}, 0, *orig.solve.instance, locs, 0, 24));
}

TEST_CASE("repairing the list figure") {
  Spec s = load_spec("figures/list.rspec");
  const auto locs = read_locations(s, relfix::testing::slurp("figures/list.locs"));
  RepairOutcome out = repair(s, locs, quick(2, true));
  REQUIRE(out.verdict == Verdict::Fixed);
  CHECK(out.total_depth == 2);
  CHECK(to_string(out.replacements[0]) == "all n: This.header.*link | n.elem <= n.link.elem");
  CHECK(to_string(out.replacements[1]) ==
        "RepOk[This] && ((x !in This.header.*link.elem => res = False) && res = True)");
  REQUIRE(out.patched);
  CHECK(detect_faults(*out.patched).empty());
  Spec reparsed = parse(pretty_print(*out.patched));
  for (const auto& c : reparsed.commands) CHECK(check_command(reparsed, c).pass);
  CHECK(accounted(out.stats));
  CHECK(out.stats.remaining == 0);
}

TEST_CASE("an oracle no candidate can pass exhausts the space") {
  Spec s = parse(
      "sig A { f: set A }\npred P {\n  //@loc\n  some f\n}\nassert FalseAssert {\n  some none\n}\n"
      "check FalseAssert for 2\n");
  typecheck_spec(s);
  const auto locs = marked_locations(s);
  for (std::size_t d = 1; d <= 2; ++d) {
    auto out = repair(s, locs, quick(d, false));
    CHECK(out.verdict == Verdict::SpaceExhausted);
    auto st = catalog_stream_size(s, locs[0], d);
    CHECK(out.stats.visited == st);
    CHECK(out.stats.generated == st);
    CHECK(accounted(out.stats));
  }
}

TEST_CASE("timeouts") {
  Spec s = load_spec("figures/list.rspec");
  RepairConfig cfg = quick(2, true);
  cfg.timeout = 0.001;
  auto out = repair(s, marked_locations(s), cfg);
  CHECK(out.verdict == Verdict::Timeout);
  CHECK_FALSE(out.cause.empty());
  CHECK(accounted(out.stats));
}

TEST_CASE("fan-out accounting") {
  Spec s = parse(relfix::testing::kFanOutSpec);
  typecheck_spec(s);
  for (std::size_t d = 1; d <= 3; ++d) {
    auto out = repair(s, marked_locations(s), relfix::testing::fan_out_config(d));
    CHECK(out.verdict == Verdict::SpaceExhausted);
    CHECK(out.stats.visited == relfix::testing::geometric_space(3, d));
    CHECK(accounted(out.stats));
  }
}

TEST_CASE("pruning never changes the outcome on the corpus") {
  for (const auto& file : relfix::testing::corpus_files()) {
    Spec s = load_spec(file);
    const auto locs = marked_locations(s);
    auto off = repair(s, locs, quick(1, false));
    auto on = repair(s, locs, quick(1, true));
    INFO(file);
    CHECK(off.verdict == on.verdict);
    CHECK(off.assignment == on.assignment);
    CHECK(off.total_depth == on.total_depth);
    CHECK(on.stats.solver_calls <= off.stats.solver_calls);
    CHECK(accounted(on.stats));
    CHECK(accounted(off.stats));
    if (on.patched) CHECK(pretty_print(*on.patched) == pretty_print(*off.patched));
    for (const auto& ev : on.variabilizations) {
      auto r = relfix::testing::variabilization_sound(s, locs, quick(1, true), ev);
      INFO(r.detail);
      CHECK(r.ok);
    }
  }
}

// No passing assignment of smaller total depth exists in the bounded space.
TEST_CASE("the first fix has minimal total depth") {
  for (const char* name : {"tests/corpus/account.rspec", "tests/corpus/matching.rspec", "tests/corpus/ring.rspec"}) {
    Spec s = load_spec(name);
    const auto locs = marked_locations(s);
    auto out = repair(s, locs, quick(1, true));
    REQUIRE(out.verdict == Verdict::Fixed);
    std::vector<std::vector<Mutant>> ms;
    for (const auto& l : locs) ms.push_back(generate_mutants(s, l));
    REQUIRE(locs.size() == 2);
    for (std::size_t i = 0; i <= ms[0].size(); ++i)
      for (std::size_t j = 0; j <= ms[1].size(); ++j) {
        const std::size_t depth = (i > 0) + (j > 0);
        if (depth == 0 || depth >= out.total_depth) continue;
        Patch p;
        if (i) p.emplace_back(locs[0], ms[0][i - 1].node);
        if (j) p.emplace_back(locs[1], ms[1][j - 1].node);
        INFO(name);
        CHECK_FALSE(detect_faults(apply_patch(s, p)).empty());
      }
  }
}

TEST_CASE("parallel evaluation finds the serial fix") {
  Spec s = load_spec("figures/list.rspec");
  const auto locs = marked_locations(s);
  RepairConfig cfg = quick(2, true);
  auto serial = repair(s, locs, cfg);
  cfg.deterministic = false;
  cfg.jobs = 4;
  auto par = repair(s, locs, cfg);
  REQUIRE(par.verdict == Verdict::Fixed);
  CHECK(par.assignment == serial.assignment);
  CHECK(accounted(par.stats));

  for (const auto& file : {"tests/corpus/three_bank.rspec", "tests/corpus/stack.rspec"}) {
    Spec c = load_spec(file);
    RepairConfig q = quick(1, true);
    auto a = repair(c, marked_locations(c), q);
    q.deterministic = false;
    q.jobs = 3;
    auto b = repair(c, marked_locations(c), q);
    INFO(file);
    CHECK(a.verdict == b.verdict);
    CHECK(a.assignment == b.assignment);
  }
}

TEST_CASE("deterministic runs repeat exactly") {
  Spec s = load_spec("tests/corpus/lookup.rspec");
  const auto locs = marked_locations(s);
  auto a = repair(s, locs, quick(1, true));
  auto b = repair(s, locs, quick(1, true));
  CHECK(a.stats == b.stats);
  CHECK(a.assignment == b.assignment);
}

TEST_CASE("scope overrides reach every oracle") {
  Spec s = load_spec("figures/list.rspec");
  RepairConfig cfg;
  cfg.scope_overrides["Node"] = {2, true};
  cfg.bitwidth = 3;
  Spec o = with_scope_overrides(s, cfg);
  for (const auto& c : o.commands) {
    CHECK(c.scope.overrides.at("Node").count == 2);
    CHECK(c.scope.overrides.at("Node").exact);
    CHECK(c.scope.bitwidth == 3);
  }
}
