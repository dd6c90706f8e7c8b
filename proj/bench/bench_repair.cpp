// Serial reference traversal against the OpenMP block evaluation.

#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "relfix/analysis.hpp"
#include "relfix/parser.hpp"
#include "relfix/repair.hpp"

using namespace relfix;

namespace {

Spec load(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  Spec s = parse(ss.str(), path);
  typecheck_spec(s);
  return s;
}

void run(benchmark::State& state, const char* path, std::size_t depth, bool prune) {
  const Spec s = load(path);
  const auto locs = marked_locations(s);
  RepairConfig cfg;
  cfg.max_depth = depth;
  cfg.prune = {prune, prune};
  const int jobs = static_cast<int>(state.range(0));
  cfg.deterministic = jobs == 1;
  cfg.jobs = jobs;
  std::uint64_t visited = 0;
  for (auto _ : state) {
    RepairOutcome out = repair(s, locs, cfg);
    visited = out.stats.visited;
    benchmark::DoNotOptimize(out.assignment);
  }
  state.counters["visited"] = static_cast<double>(visited);
}

void BM_ListPruned(benchmark::State& st) { run(st, "figures/list.rspec", 2, true); }
void BM_ListUnpruned(benchmark::State& st) { run(st, "figures/list.rspec", 1, false); }
void BM_ThreeGraphUnpruned(benchmark::State& st) { run(st, "tests/corpus/three_graph.rspec", 1, false); }
void BM_StackUnpruned(benchmark::State& st) { run(st, "tests/corpus/stack.rspec", 1, false); }

}  // namespace

BENCHMARK(BM_ListPruned)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ListUnpruned)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ThreeGraphUnpruned)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StackUnpruned)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
