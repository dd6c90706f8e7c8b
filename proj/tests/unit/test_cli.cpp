#include <sys/wait.h>

#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "relfix/report.hpp"
#include "support/checks.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run relfix_cli(const std::string& args) {
  const std::string cmd = std::string(RELFIX_BIN) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "relfix-cli-test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("repair of the list figure") {
  const fs::path report = scratch("list.report"), patched = scratch("list.patched.rspec");
  Run r = relfix_cli("repair figures/list.rspec --locs figures/list.locs --max-depth 2 --prune all --deterministic"
                     " --report " + report.string() + " --output " + patched.string());
  CHECK(r.code == 0);
  CHECK(r.out.find("verdict: Fixed") != std::string::npos);
  CHECK(r.out.find("+    (all n: This.header.*link | n.elem <= n.link.elem)") != std::string::npos);
  CHECK(r.out.find("stats.wall_ms") == std::string::npos);
  const std::string written = relfix::testing::slurp(report.string());
  CHECK(written == r.out);

  // The patched file passes its oracles, and the report's stats are the run's.
  CHECK(relfix_cli("check " + patched.string()).code == 4);
  relfix::Spec s = relfix::testing::load_spec("figures/list.rspec");
  relfix::RepairConfig cfg;
  auto out = relfix::repair(s, relfix::marked_locations(s), cfg);
  CHECK(relfix::parse_report_stats(written) == out.stats);
}

TEST_CASE("check exit codes") {
  Run fixed = relfix_cli("check figures/list_fixed.rspec");
  CHECK(fixed.code == 4);
  CHECK(fixed.out.find("run RepOk: SAT (pass)") != std::string::npos);
  Run buggy = relfix_cli("check figures/list.rspec");
  CHECK(buggy.code == 0);
  CHECK(buggy.out.find("check ContainsCorrect: CEX (fail)") != std::string::npos);
}

TEST_CASE("usage and input errors") {
  CHECK(relfix_cli("repair figures/list.rspec --prune bogus").code == 1);
  CHECK(relfix_cli("repair").code == 1);
  CHECK(relfix_cli("frobnicate figures/list.rspec").code == 1);
  CHECK(relfix_cli("repair /nonexistent.rspec").code == 1);
  CHECK(relfix_cli("repair figures/list.rspec --locs Node").code == 1);
  CHECK(relfix_cli("repair figures/list.rspec --scope Node").code == 1);
  const fs::path bad = scratch("bad.rspec");
  { std::ofstream(bad) << "sig A {\n"; }
  CHECK(relfix_cli("check " + bad.string()).code == 1);
}

TEST_CASE("exhaustion, timeout and fault-free inputs") {
  Run ex = relfix_cli("repair tests/corpus/single_unfixable.rspec --max-depth 1 --deterministic");
  CHECK(ex.code == 2);
  CHECK(ex.out.find("verdict: SpaceExhausted") != std::string::npos);
  Run to = relfix_cli("repair figures/list.rspec --timeout 0.001");
  CHECK(to.code == 3);
  CHECK(to.out.find("verdict: Timeout") != std::string::npos);
  CHECK(relfix_cli("repair figures/list_fixed.rspec --locs Sorted/0").code == 4);
}

TEST_CASE("inline location markers and mutant dumps") {
  Run r = relfix_cli("repair figures/list.rspec --locs 'Sorted/0,Contains/0' --deterministic --prune none");
  CHECK(r.code == 0);
  CHECK(r.out.find("prune: none") != std::string::npos);
  Run d = relfix_cli("repair figures/list.rspec --dump-mutants Sorted/0");
  CHECK(d.code == 0);
  CHECK(std::count(d.out.begin(), d.out.end(), '\n') == 64);
  CHECK(d.out.find("all n: This.header.*link | n.elem <= n.link.elem\n") != std::string::npos);
}

TEST_CASE("prune settings give the same exit code across the corpus") {
  for (const auto& f : relfix::testing::corpus_files()) {
    const int all = relfix_cli("repair " + f + " --max-depth 1 --deterministic --prune all").code;
    const int none = relfix_cli("repair " + f + " --max-depth 1 --deterministic --prune none").code;
    INFO(f);
    CHECK(all == none);
    CHECK((all == 0 || all == 2));
  }
}
