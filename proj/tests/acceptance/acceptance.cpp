// Acceptance gate: one line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "bench.hpp"
#include "fixtures.hpp"
#include "obgraph/apps.hpp"
#include "obgraph/baselines.hpp"
#include "obgraph/graph_io.hpp"
#include "obgraph/grid.hpp"
#include "obgraph/oprims.hpp"
#include "obgraph/pipeline.hpp"
#include "obgraph/scan.hpp"
#include "trace_check.hpp"

namespace {

using namespace obg;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::map<std::string, std::uint64_t> merged_results(const RunResult& r) {
  std::map<std::string, std::uint64_t> out;
  for (const auto& party : r.keyed_results) {
    for (const auto& [k, v] : party) out.emplace(k, v);
  }
  return out;
}

bool same(AppKind kind, const std::map<std::string, std::uint64_t>& a,
          const std::map<std::string, std::uint64_t>& b) {
  if (a.size() != b.size()) return false;
  for (const auto& [k, v] : a) {
    auto it = b.find(k);
    if (it == b.end() || !result_words_match(kind, v, it->second)) return false;
  }
  return true;
}

AppConfig app_of(AppKind kind, std::size_t t) {
  AppConfig a;
  a.kind = kind;
  a.iterations = t;
  a.bfs_source = "0";
  return a;
}

// 1. Every stage and app leaves identical per-worker traces across random
// secrets with equal public parameters.
Outcome trace_purity() {
  std::string failed;
  std::size_t checked = 0;
  for (std::size_t workers : {1u, 4u}) {
    for (const auto& stage : tools::trace_check_stages()) {
      if (stage == "leaky-pr") continue;
      tools::TraceCheckOptions o;
      o.stage = stage;
      o.trials = 20;
      o.workers = workers;
      o.granularity = 0;
      const auto r = tools::trace_check(o);
      ++checked;
      if (!r.passed) failed += fmt(" %s/w%zu", stage.c_str(), workers);
    }
  }
  if (!failed.empty()) return {false, "digest mismatch in" + failed};
  return {true, fmt("%zu stage/worker combinations x 20 trials identical", checked)};
}

// 2. The leaky PageRank control is caught and the divergence located.
Outcome leak_detected() {
  tools::TraceCheckOptions o;
  o.stage = "leaky-pr";
  o.trials = 20;
  const auto r = tools::trace_check(o);
  if (r.passed) return {false, "leaky control passed the checker"};
  if (!r.failing_trial || !r.divergence) return {false, "failure not located"};
  return {true, fmt("trial %zu worker %zu event %llu", *r.failing_trial, r.divergence->worker,
                    static_cast<unsigned long long>(r.divergence->index))};
}

// 3. Grid and sort-scan engines equal the reference on 50 graphs x 5 splits.
Outcome oracle_equivalence() {
  std::size_t runs = 0;
  for (unsigned i = 0; i < 50; ++i) {
    const unsigned sn = 8 + i % 5;
    const unsigned sm = std::min(sn + 2, 14u);
    const EdgeList g = kronecker_graph(sn, sm, 1000 + i);
    for (unsigned split = 0; split < 5; ++split) {
      const std::size_t p = 1 + (i + split) % 4;
      const auto parties = split_edges_randomly(g, p, 77 * i + split);
      const Salt salt = salt_from_seed(i * 5 + split);
      for (auto kind : {AppKind::kPageRank, AppKind::kBfs, AppKind::kWcc}) {
        const AppConfig app = app_of(kind, 10);
        RunOptions o;
        o.om_bytes = 32 * 1024;
        o.trace = false;
        o.engine = Engine::kReference;
        const auto ref = merged_results(run_end_to_end(parties, app, o, salt));
        for (auto engine : {Engine::kGrid, Engine::kSortScan}) {
          o.engine = engine;
          o.workers = 1 + (i + split) % 3;
          const auto got = merged_results(run_end_to_end(parties, app, o, salt));
          ++runs;
          if (!same(kind, got, ref)) {
            return {false, fmt("graph %u split %u %s %s differs", i, split,
                               std::string(to_string(kind)).c_str(),
                               std::string(to_string(engine)).c_str())};
          }
        }
      }
    }
  }
  return {true, fmt("%zu engine runs match the reference", runs)};
}

// 4. No OM allocation exceeded capacity, and a scan peaks at exactly
// 2 k vwidth + reserve.
Outcome om_budget() {
  std::mt19937_64 rng(4);
  std::string detail;
  for (std::size_t om : {std::size_t{1310720}, std::size_t{4096 + 2 * 16 * 4096}}) {
    const GridShape s = make_shape(1 << 16, om, vertex_width(AppKind::kPageRank), 8);
    const GridGraph g = tools::random_grid(s, rng);
    Runtime rt(om, 4);
    pagerank(g, 1, kDefaultDamping, rt);
    const std::size_t expect =
        2 * s.chunk_size * vertex_width(AppKind::kPageRank) + kScanReserve;
    if (expect > om) return {false, "peak exceeds capacity"};
    // Workers beyond the chunk count have no column to scan.
    for (std::size_t w = 0; w < 4; ++w) {
      const std::size_t want = w < s.chunk_count ? expect : 0;
      if (rt.om(w).peak() != want) {
        return {false, fmt("worker %zu peak %zu, expected %zu", w, rt.om(w).peak(), want)};
      }
    }
    detail += fmt("; peak %zu of %zu bytes at k=%zu", expect, om, s.chunk_size);
  }
  const auto v = OMArena::violations();
  if (v != 0) return {false, fmt("%llu refused allocations", static_cast<unsigned long long>(v))};
  return {true, "0 refusals" + detail};
}

std::vector<tools::BenchRow> sweep_rows;

void run_sweep() {
  if (!sweep_rows.empty()) return;
  tools::BenchConfig c;
  c.om_bytes = 1310720;
  c.workers = 4;
  c.iterations = 4;
  sweep_rows = tools::bench_om_sweep(16, 18, {0.25, 0.5, 1.0, 2.0, 4.0}, c);
}

// 5. n=2^16, m=2^18, 1.25 MiB, 4 workers: grid PR at least 5x faster per
// iteration than sort-scan.
Outcome speedup_floor() {
  run_sweep();
  const auto& r = sweep_rows[2];
  const std::string d = fmt("grid %.4fs sortscan %.4fs per iteration, speedup %.1fx", r.grid,
                            r.sortscan, r.speedup());
  return {r.speedup() >= 5.0, d};
}

// 6. Across OM 1/4x..4x the grid engine varies by < 3x and always wins.
Outcome om_sweep() {
  run_sweep();
  double lo = 1e300, hi = 0, worst = 1e300;
  for (const auto& r : sweep_rows) {
    lo = std::min(lo, r.grid);
    hi = std::max(hi, r.grid);
    worst = std::min(worst, r.speedup());
  }
  const bool pass = hi / lo < 3.0 && worst > 1.0;
  return {pass, fmt("grid time varies %.2fx; smallest speedup %.1fx", hi / lo, worst)};
}

// 7. Block codec: the k=2 worked example and 10^4 random round-trips.
Outcome codec() {
  const MappedEdge block[] = {MappedEdge::make(1, 0), MappedEdge::null()};
  const auto bytes = encode_block(block, 2);
  if (bytes.size() != 1 || bytes[0] != 0xA1) return {false, "worked example does not encode to 0xA1"};
  std::mt19937_64 rng(7);
  for (int i = 0; i < 10000; ++i) {
    const std::size_t k = 1 + rng() % (i % 10 == 0 ? 1000000 : 64);
    const std::size_t l = rng() % 32;
    const std::size_t r = rng() % 8, c = rng() % 8;
    std::vector<MappedEdge> b(l);
    for (auto& e : b) {
      e = rng() % 3 == 0 ? MappedEdge::null()
                         : MappedEdge::make(static_cast<std::uint32_t>(r * k + rng() % k),
                                            static_cast<std::uint32_t>(c * k + rng() % k));
    }
    if (decode_block(encode_block(b, k), k, l, r, c) != b) {
      return {false, fmt("round trip %d failed (k=%zu l=%zu)", i, k, l)};
    }
  }
  return {true, "0xA1 and 10000 round trips"};
}

// 8. The bitonic network performs exactly the analytic number of external
// compare-exchanges: sum over merge stages 2^j > B of (j - log B) * n/2.
Outcome sort_exchanges() {
  const std::size_t n = 1 << 14, block = 1 << 10;
  std::uint64_t analytic = 0;
  for (unsigned j = 11; j <= 14; ++j) analytic += (j - 10) * (n / 2);
  Runtime rt(block * sizeof(std::uint64_t));
  std::mt19937_64 rng(8);
  std::vector<std::uint64_t> v(n);
  for (auto& x : v) x = rng();
  auto a = ExtArray<std::uint64_t>::adopt("sort.in", v);
  o_sort(a, std::less<>{}, rt);
  const auto got = rt.stats().compare_exchanges();
  std::sort(v.begin(), v.end());
  const auto sorted = a.peek();
  if (!std::equal(v.begin(), v.end(), sorted.begin())) return {false, "output not sorted"};
  return {got == analytic && analytic == 81920,
          fmt("%llu compare-exchanges, analytic %llu", static_cast<unsigned long long>(got),
              static_cast<unsigned long long>(analytic))};
}

// 9. Splitting the same graph across 1, 2, 3 or 5 parties changes nothing.
Outcome partition_invariance() {
  const EdgeList g = kronecker_graph(10, 12, 9);
  for (auto kind : {AppKind::kPageRank, AppKind::kBfs, AppKind::kWcc}) {
    const AppConfig app = app_of(kind, 10);
    std::map<std::string, std::uint64_t> first;
    for (std::size_t p : {1u, 2u, 3u, 5u}) {
      RunOptions o;
      o.om_bytes = 32 * 1024;
      o.trace = false;
      const auto parties = partition_graph(g, p, PartitionMode::kRandom, 3 + p);
      const auto r = merged_results(run_end_to_end(parties, app, o, salt_from_seed(5)));
      if (first.empty()) {
        first = r;
      } else if (!same(kind, r, first)) {
        return {false, fmt("%s differs at p=%zu", std::string(to_string(kind)).c_str(), p)};
      }
    }
  }
  return {true, "pr, bfs, wcc equal for p in {1,2,3,5}"};
}

// 10. The 2-cycle is a PageRank fixed point: 100 iterations stay at 1.
Outcome fixed_point() {
  std::vector<PartyInput> parties{{{"a", "b"}, {{"a", "b"}, {"b", "a"}}}};
  RunOptions o;
  const auto r = merged_results(run_end_to_end(parties, app_of(AppKind::kPageRank, 100), o,
                                               salt_from_seed(1)));
  double drift = 0;
  for (const auto& [k, w] : r) drift = std::max(drift, std::abs(decode_weight(w) - 1.0));
  return {drift <= 1e-12, fmt("max drift %.3g", drift)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"trace purity", trace_purity},
      {"leak detection", leak_detected},
      {"oracle equivalence", oracle_equivalence},
      {"OM budget", om_budget},
      {"speedup floor", speedup_floor},
      {"OM sweep", om_sweep},
      {"block codec", codec},
      {"sort network size", sort_exchanges},
      {"partition invariance", partition_invariance},
      {"PageRank fixed point", fixed_point},
  };
  int failures = 0;
  // The OM budget check reads the global refusal count, so it runs after
  // everything that allocates except the sweep.
  const std::vector<std::size_t> order{0, 1, 2, 6, 7, 8, 9, 4, 5, 3};
  std::vector<std::string> lines(criteria.size());
  for (std::size_t i : order) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    lines[i] = fmt("criterion %zu %s: %s (%s; %.1fs)", i + 1, o.pass ? "PASS" : "FAIL",
                   criteria[i].first.c_str(), o.detail.c_str(), s);
    std::fprintf(stderr, "%s\n", lines[i].c_str());
    failures += o.pass ? 0 : 1;
  }
  for (const auto& l : lines) std::printf("%s\n", l.c_str());
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
