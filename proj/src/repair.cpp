#include "relfix/repair.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <limits>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "relfix/analysis.hpp"
#include "relfix/errors.hpp"

namespace relfix {

namespace {

Assignment masked(const Assignment& a, std::uint64_t mask) {
  Assignment out(a.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (mask >> i & 1) out[i] = a[i];
  return out;
}

std::uint64_t location_mask(const std::vector<Location>& locs, const std::vector<Location>& subset) {
  std::uint64_t m = 0;
  for (const auto& l : subset)
    for (std::size_t i = 0; i < locs.size(); ++i)
      if (locs[i] == l) m |= std::uint64_t{1} << i;
  return m;
}

}  // namespace

bool PruneSet::add(const PruneRecord& r) {
  auto g = std::find_if(groups_.begin(), groups_.end(), [&](const Group& x) { return x.mask == r.mask; });
  if (g == groups_.end()) {
    groups_.push_back({r.mask, {}, {}});
    g = groups_.end() - 1;
  }
  PruneRecord rec = r;
  rec.fragment = masked(r.fragment, r.mask);
  if (!g->index.emplace(rec.fragment, g->records.size()).second) return false;
  g->records.push_back(std::move(rec));
  ++count_;
  return true;
}

const PruneRecord* PruneSet::match(const Assignment& a, std::uint64_t within) const {
  for (const auto& g : groups_) {
    if (g.mask & ~within) continue;
    auto it = g.index.find(masked(a, g.mask));
    if (it != g.index.end()) return &g.records[it->second];
  }
  return nullptr;
}

bool prune_filter(const Assignment& a, const PruneSet& records) { return records.match(a) != nullptr; }

std::vector<OracleFailure> detect_faults(const Spec& s, const Deadline& deadline) {
  if (s.oracles().empty()) throw Error("no oracle commands");
  std::vector<OracleFailure> out;
  for (std::size_t i = 0; i < s.commands.size(); ++i) {
    if (!s.commands[i].is_oracle) continue;
    CommandResult r = check_command(s, s.commands[i], deadline);
    if (!r.pass) out.push_back({i, std::move(r)});
  }
  return out;
}

Spec with_scope_overrides(const Spec& s, const RepairConfig& cfg) {
  Spec out = s;
  for (auto& c : out.commands) {
    for (const auto& [sig, sc] : cfg.scope_overrides) c.scope.overrides[sig] = sc;
    if (cfg.bitwidth) c.scope.bitwidth = *cfg.bitwidth;
  }
  return out;
}

std::optional<PruneRecord> partial_repair_prune(const Spec& s, const Assignment& a, std::size_t cmd,
                                                const std::vector<Location>& locs) {
  const std::uint64_t deps = location_mask(locs, check_dependencies(s, s.commands[cmd], locs));
  const std::uint64_t all = locs.size() >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << locs.size()) - 1;
  if (deps == all) return std::nullopt;
  return PruneRecord{deps, masked(a, deps), PruneReason::PartialRepair, cmd};
}

std::optional<PruneRecord> variabilization_prune(const Spec& patched, const Assignment& a, std::size_t cmd,
                                                 const Instance& cex, const std::vector<Location>& locs,
                                                 std::size_t target, std::size_t cap,
                                                 WitnessResult* result, const Deadline& deadline) {
  const Command& c = patched.commands[cmd];
  if (c.kind != CmdKind::Check) return std::nullopt;
  const std::uint64_t deps = location_mask(locs, check_dependencies(patched, c, locs));
  if (!(deps >> target & 1)) return std::nullopt;
  WitnessResult r = WitnessResult::Unknown;
  try {
    auto [ctx, wtype] = bounding_type(patched, locs[target]);
    Spec sv = variabilize(patched, locs[target], ctx);
    r = exists_relation_witness(cex, wtype, ctx, sv, rescue_target(sv, c), cap, deadline);
  } catch (const TypeError&) {
    r = WitnessResult::Unknown;
  }
  if (result) *result = r;
  if (r != WitnessResult::False) return std::nullopt;
  const std::uint64_t m = deps & ~(std::uint64_t{1} << target);
  return PruneRecord{m, masked(a, m), PruneReason::Variabilization, cmd};
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Fixed: return "Fixed";
    case Verdict::SpaceExhausted: return "SpaceExhausted";
    case Verdict::Timeout: return "Timeout";
  }
  return "?";
}

Patch assignment_patch(const std::vector<Location>& locs, const std::vector<NodePtr>& replacements) {
  Patch p;
  for (std::size_t i = 0; i < locs.size(); ++i) p.emplace_back(locs[i], replacements[i]);
  return p;
}

namespace {

class Engine {
 public:
  Engine(const Spec& s, const std::vector<Location>& locs, const RepairConfig& cfg)
      : spec_(with_scope_overrides(s, cfg)), locs_(locs), cfg_(cfg), deadline_(Deadline::after(cfg.timeout)) {
    if (locs_.empty()) throw Error("no suspicious locations");
    if (locs_.size() > 63) throw ResourceError("too many locations");
    if (cfg_.max_depth < 1) throw Error("max depth must be at least 1");
    if (spec_.oracles().empty()) throw Error("no oracle commands");
    for (std::size_t i = 0; i < locs_.size(); ++i) {
      location_of(spec_, locs_[i].path);  // rejects locations inside oracles
      originals_.push_back(node_at(spec_, locs_[i].path));
      auto mut = cfg_.mutator ? cfg_.mutator(spec_, locs_[i])
                              : std::make_shared<const CatalogMutator>(
                                    std::make_shared<const MutationSite>(spec_, locs_[i]));
      streams_.push_back(std::make_unique<MutantStream>(mut, originals_[i], cfg_.max_depth));
    }
    for (std::size_t c = 0; c < spec_.commands.size(); ++c) {
      if (!spec_.commands[c].is_oracle) continue;
      order_.push_back(c);
      deps_.push_back(location_mask(locs_, check_dependencies(spec_, spec_.commands[c], locs_)));
    }
    std::vector<std::size_t> idx(order_.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
      return std::popcount(deps_[x]) < std::popcount(deps_[y]);
    });
    std::vector<std::size_t> o;
    std::vector<std::uint64_t> d;
    for (auto i : idx) {
      o.push_back(order_[i]);
      d.push_back(deps_[i]);
    }
    order_ = std::move(o);
    deps_ = std::move(d);
  }

  RepairOutcome run();

 private:
  struct Range {
    std::uint32_t lo, hi;
  };
  struct Key {
    std::size_t cmd;
    Assignment frag;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::size_t h = k.cmd;
      boost::hash_combine(h, boost::hash_range(k.frag.begin(), k.frag.end()));
      return h;
    }
  };

  const Spec spec_;
  const std::vector<Location>& locs_;
  const RepairConfig& cfg_;
  Deadline deadline_;
  std::vector<NodePtr> originals_;
  std::vector<std::unique_ptr<MutantStream>> streams_;
  std::vector<std::size_t> order_;    // oracle command indices, cheapest first
  std::vector<std::uint64_t> deps_;   // location mask per entry of order_

  std::mutex mu_;
  PruneSet records_;
  std::unordered_map<Key, bool, KeyHash> cache_;
  RepairStats stats_;
  std::vector<VariabilizationEvent> events_;
  bool prune_all_ = false;  // a record with an empty fragment exists

  const NodePtr& replacement(std::size_t loc, std::uint32_t id) {
    return id == 0 ? originals_[loc] : streams_[loc]->at(id - 1)->node;
  }
  std::vector<NodePtr> replacements(const Assignment& a) {
    std::vector<NodePtr> r;
    for (std::size_t i = 0; i < a.size(); ++i) r.push_back(replacement(i, a[i]));
    return r;
  }
  Spec patched(const Assignment& a) {
    Patch p;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] != 0) p.emplace_back(locs_[i], replacement(i, a[i]));
    return apply_patch(spec_, p);
  }

  void add_record(const PruneRecord& r) {
    if (!records_.add(r)) return;
    if (r.reason == PruneReason::PartialRepair) ++stats_.records_partial;
    else ++stats_.records_variabilization;
    if (r.mask == 0) prune_all_ = true;
  }

  /// Counts the assignment as pruned when it extends a record.
  bool skip(const Assignment& a, std::uint64_t weight, std::uint64_t within = ~std::uint64_t{0}) {
    std::lock_guard lock(mu_);
    const PruneRecord* r = records_.match(a, prune_all_ ? 0 : within);
    if (!r) return false;
    stats_.generated += weight;
    stats_.pruned += weight;
    (r->reason == PruneReason::PartialRepair ? stats_.pruned_partial : stats_.pruned_variabilization) += weight;
    return true;
  }

  bool evaluate(const Assignment& a);
  bool reverify(const Spec& p);
  std::vector<Range> ranges(const std::vector<std::size_t>& depths);
  bool block(const std::vector<Range>& rs, RepairOutcome& out);
  bool block_parallel(const std::vector<Range>& rs, RepairOutcome& out);
  bool finish(const Assignment& a, RepairOutcome& out);
};

bool Engine::evaluate(const Assignment& a) {
  std::optional<Spec> p;
  for (std::size_t k = 0; k < order_.size(); ++k) {
    const std::size_t cmd = order_[k];
    Key key{cmd, masked(a, deps_[k])};
    {
      std::lock_guard lock(mu_);
      auto it = cache_.find(key);
      if (it != cache_.end()) {
        ++stats_.cache_hits;
        if (it->second) continue;
        return false;
      }
    }
    if (!p) p = patched(a);
    CommandResult r = check_command(*p, p->commands[cmd], deadline_);
    std::vector<PruneRecord> recs;
    std::vector<VariabilizationEvent> evs;
    std::uint64_t unknown = 0;
    if (!r.pass) {
      if (cfg_.prune.partial_repair)
        if (auto rec = partial_repair_prune(*p, a, cmd, locs_)) recs.push_back(*rec);
      if (cfg_.prune.variabilization && r.solve.instance && p->commands[cmd].kind == CmdKind::Check) {
        for (std::size_t t = locs_.size(); t-- > 0;) {
          if (!(deps_[k] >> t & 1)) continue;
          WitnessResult wr;
          auto rec = variabilization_prune(*p, a, cmd, *r.solve.instance, locs_, t, cfg_.witness_cap, &wr,
                                           deadline_);
          if (wr == WitnessResult::Unknown) ++unknown;
          if (rec) {
            recs.push_back(*rec);
            evs.push_back({a, cmd, t});
            break;
          }
        }
      }
    }
    std::lock_guard lock(mu_);
    ++stats_.solver_calls;
    stats_.witness_unknown += unknown;
    cache_.emplace(std::move(key), r.pass);
    for (const auto& rec : recs) add_record(rec);
    for (auto& e : evs) events_.push_back(std::move(e));
    if (!r.pass) return false;
  }
  return true;
}

bool Engine::reverify(const Spec& p) {
  for (std::size_t cmd : order_)
    if (!check_command(p, p.commands[cmd], deadline_).pass) return false;
  return true;
}

std::vector<Engine::Range> Engine::ranges(const std::vector<std::size_t>& depths) {
  std::vector<Range> rs;
  for (std::size_t i = 0; i < depths.size(); ++i) {
    if (depths[i] == 0) {
      rs.push_back({0, 1});
      continue;
    }
    auto lo = static_cast<std::uint32_t>(streams_[i]->count_upto(depths[i] - 1) + 1);
    auto hi = static_cast<std::uint32_t>(streams_[i]->count_upto(depths[i]) + 1);
    rs.push_back({lo, hi});
  }
  return rs;
}

bool Engine::finish(const Assignment& a, RepairOutcome& out) {
  Spec p = patched(a);
  if (!reverify(p)) return false;
  out.verdict = Verdict::Fixed;
  out.assignment = a;
  out.replacements = replacements(a);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != 0) out.total_depth += streams_[i]->at(a[i] - 1)->depth();
  out.patched = std::move(p);
  return true;
}

// Serial reference traversal of one depth vector: location 0 outermost.
// A prefix extending a record skips its whole sub-product.
bool Engine::block(const std::vector<Range>& rs, RepairOutcome& out) {
  const std::size_t n = rs.size();
  std::vector<std::uint64_t> below(n + 1, 1);
  for (std::size_t i = n; i-- > 0;) below[i] = below[i + 1] * (rs[i].hi - rs[i].lo);
  Assignment a(n, 0);
  auto rec = [&](auto& self, std::size_t i) -> bool {
    if (i == n) {
      if (deadline_.passed()) throw DeadlineExceeded();
      if (skip(a, 1)) return false;
      ++stats_.generated;
      ++stats_.visited;
      return evaluate(a) && finish(a, out);
    }
    for (std::uint32_t id = rs[i].lo; id < rs[i].hi; ++id) {
      a[i] = id;
      for (std::size_t j = i + 1; j < n; ++j) a[j] = 0;
      if (i + 1 < n) {
        // Only records confined to locations 0..i can match a prefix.
        if (skip(a, below[i + 1], (std::uint64_t{2} << i) - 1)) continue;
      }
      if (self(self, i + 1)) return true;
    }
    return false;
  };
  return rec(rec, 0);
}

// Parallel evaluation of one depth vector in chunks; the passing candidate
// with the smallest index in traversal order wins, as in the serial order.
bool Engine::block_parallel(const std::vector<Range>& rs, RepairOutcome& out) {
  const std::size_t n = rs.size();
  std::uint64_t total = 1;
  for (const auto& r : rs) total *= r.hi - r.lo;
  const std::uint64_t chunk = 64 * static_cast<std::uint64_t>(std::max(cfg_.jobs, 1));
  auto decode = [&](std::uint64_t k) {
    Assignment a(n);
    for (std::size_t i = n; i-- > 0;) {
      const std::uint64_t w = rs[i].hi - rs[i].lo;
      a[i] = rs[i].lo + static_cast<std::uint32_t>(k % w);
      k /= w;
    }
    return a;
  };
  for (std::uint64_t base = 0; base < total; base += chunk) {
    const std::uint64_t end = std::min(total, base + chunk);
    if (deadline_.passed()) throw DeadlineExceeded();
    std::atomic<std::uint64_t> best{std::numeric_limits<std::uint64_t>::max()};
    std::atomic<bool> timed_out{false};
    std::string error;
    std::uint64_t done = 0;
#pragma omp parallel for schedule(dynamic, 1) num_threads(cfg_.jobs) reduction(+ : done)
    for (std::int64_t k = static_cast<std::int64_t>(base); k < static_cast<std::int64_t>(end); ++k) {
      const auto uk = static_cast<std::uint64_t>(k);
      if (timed_out.load() || uk > best.load()) continue;
      Assignment a = decode(uk);
      ++done;
      if (skip(a, 1)) continue;
      {
        std::lock_guard lock(mu_);
        ++stats_.generated;
        ++stats_.visited;
      }
      try {
        if (evaluate(a)) {
          std::uint64_t cur = best.load();
          while (uk < cur && !best.compare_exchange_weak(cur, uk)) {
          }
        }
      } catch (const DeadlineExceeded&) {
        timed_out = true;
      } catch (const std::exception& e) {
        std::lock_guard lock(mu_);
        error = e.what();
        timed_out = true;
      }
    }
    stats_.generated += (end - base) - done;
    stats_.remaining += (end - base) - done;
    if (!error.empty()) throw ResourceError(error);
    if (timed_out) throw DeadlineExceeded();
    if (best.load() != std::numeric_limits<std::uint64_t>::max() && finish(decode(best.load()), out))
      return true;
  }
  return false;
}

RepairOutcome Engine::run() {
  RepairOutcome out;
  const std::size_t n = locs_.size();
  const bool parallel = !cfg_.deterministic && cfg_.jobs > 1;
  try {
    for (std::size_t t = 1; t <= n * cfg_.max_depth; ++t) {
      // Depth vectors with sum t, each entry <= max_depth, in lexicographic order.
      std::vector<std::size_t> d(n, 0);
      auto rec = [&](auto& self, std::size_t i, std::size_t left) -> bool {
        if (i + 1 == n) {
          if (left > cfg_.max_depth) return false;
          d[i] = left;
          auto rs = ranges(d);
          std::uint64_t size = 1;
          for (const auto& r : rs) size *= r.hi - r.lo;
          if (size == 0) return false;
          if (prune_all_ && skip(Assignment(n, 0), size)) return false;
          return parallel ? block_parallel(rs, out) : block(rs, out);
        }
        for (std::size_t v = 0; v <= std::min(left, cfg_.max_depth); ++v) {
          d[i] = v;
          if (self(self, i + 1, left - v)) return true;
        }
        return false;
      };
      if (rec(rec, 0, t)) break;
    }
  } catch (const DeadlineExceeded&) {
    out.verdict = Verdict::Timeout;
    out.cause = "deadline exceeded";
  } catch (const ResourceError& e) {
    out.verdict = Verdict::Timeout;
    out.cause = e.what();
  }
  for (const auto& s : streams_) stats_.mutants += s->generated() - 1;
  out.stats = stats_;
  out.variabilizations = std::move(events_);
  return out;
}

}  // namespace

RepairOutcome repair(const Spec& s, const std::vector<Location>& locs, const RepairConfig& cfg) {
  Engine e(s, locs, cfg);
  return e.run();
}

}  // namespace relfix
