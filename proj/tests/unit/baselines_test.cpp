#include <gtest/gtest.h>

#include <random>

#include "obgraph/baselines.hpp"
#include "obgraph/graph_io.hpp"
#include "test_support.hpp"

namespace obg {
namespace {

using test::values;

constexpr std::size_t kOm = 1 << 16;

ExtArray<MappedEdge> edge_array(std::span<const PlainEdge> edges, std::size_t nulls = 0) {
  std::vector<MappedEdge> me;
  for (const auto& [u, v] : edges) {
    me.push_back(MappedEdge::make(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v)));
  }
  me.resize(me.size() + nulls, MappedEdge::null());
  return ExtArray<MappedEdge>::adopt("edges", std::move(me));
}

AppConfig app_of(AppKind kind, std::size_t t) {
  AppConfig a;
  a.kind = kind;
  a.iterations = t;
  return a;
}

TEST(SortScan, TwoCyclePageRank) {
  const std::vector<PlainEdge> e{{0, 1}, {1, 0}};
  Runtime rt(kOm);
  const auto r = values(sortscan_run(edge_array(e, 3), 2, app_of(AppKind::kPageRank, 10), 0, rt));
  EXPECT_NEAR(decode_weight(r[0]), 1.0, 1e-12);
  EXPECT_NEAR(decode_weight(r[1]), 1.0, 1e-12);
}

TEST(SortScan, BfsPath) {
  const std::vector<PlainEdge> e{{0, 1}, {1, 2}};
  Runtime rt(kOm);
  EXPECT_EQ(values(sortscan_run(edge_array(e), 3, app_of(AppKind::kBfs, 2), 0, rt)),
            (std::vector<std::uint64_t>{0, 1, 2}));
  EXPECT_EQ(values(sortscan_run(edge_array(e), 3, app_of(AppKind::kBfs, 1), 0, rt)),
            (std::vector<std::uint64_t>{0, 1, kInfinity}));
}

TEST(SortScan, WccComponents) {
  const std::vector<PlainEdge> e{{0, 1}, {3, 2}};
  Runtime rt(kOm);
  const auto both = test::with_reverses(e);
  EXPECT_EQ(values(sortscan_run(edge_array(both, 2), 4, app_of(AppKind::kWcc, 3), 0, rt)),
            (std::vector<std::uint64_t>{0, 0, 2, 2}));
}

TEST(Reference, SmallCases) {
  const std::vector<PlainEdge> cyc{{0, 1}, {1, 0}};
  const auto pr = reference_run(app_of(AppKind::kPageRank, 5), cyc, 3);
  EXPECT_EQ(decode_weight(pr[0]), 1.0);
  EXPECT_NEAR(decode_weight(pr[2]), 0.15, 1e-15);
  const std::vector<PlainEdge> path{{0, 1}, {1, 2}};
  EXPECT_EQ(reference_run(app_of(AppKind::kBfs, 5), path, 3, 0),
            (std::vector<std::uint64_t>{0, 1, 2}));
  // Reference WCC reads edges as undirected.
  const std::vector<PlainEdge> two{{0, 1}, {3, 2}};
  EXPECT_EQ(reference_run(app_of(AppKind::kWcc, 3), two, 4),
            (std::vector<std::uint64_t>{0, 0, 2, 2}));
}

// Every iteration is two oblivious sorts over all n + m records.
TEST(SortScan, TwoSortsPerIteration) {
  const EdgeList g = kronecker_graph(6, 8, 1);
  Runtime rt(kOm);
  const auto edges = edge_array(g.edges, 11);
  const std::size_t total = g.vertices + edges.size();
  for (auto kind : {AppKind::kPageRank, AppKind::kBfs, AppKind::kWcc}) {
    auto el = sortscan_build(edges, g.vertices, app_of(kind, 1), 0, rt);
    ASSERT_EQ(el.size(), total);
    rt.stats().clear();
    sortscan_iteration(el, SortScanProgram{kind, kDefaultDamping}, rt);
    const auto sorts = rt.stats().sorts();
    ASSERT_EQ(sorts.size(), 2u);
    for (const auto& s : sorts) EXPECT_EQ(s.length, total);
  }
}

TEST(SortScan, IterationTraceIgnoresEdges) {
  std::mt19937_64 rng(2);
  const std::size_t n = 64, m = 200;
  std::vector<Digest> seen;
  for (int g = 0; g < 3; ++g) {
    std::vector<PlainEdge> e(m - 20 * g);
    for (auto& x : e) x = {rng() % n, rng() % n};
    Runtime rt(8192);
    const auto edges = edge_array(e, 20 * g);
    auto el = sortscan_build(edges, n, app_of(AppKind::kPageRank, 1), 0, rt);
    auto t = test::traced(
        [&] { sortscan_iteration(el, SortScanProgram{AppKind::kPageRank, 0.85}, rt); });
    seen.push_back(t->digest());
  }
  EXPECT_EQ(seen[0], seen[1]);
  EXPECT_EQ(seen[0], seen[2]);
}

// Grid engine, sort-scan and reference agree on random graphs.
TEST(Engines, ThreeWayAgreement) {
  std::mt19937_64 rng(31);
  for (int round = 0; round < 12; ++round) {
    const std::size_t n = 2 + rng() % 120;
    std::vector<PlainEdge> e(rng() % (3 * n));
    for (auto& x : e) x = {rng() % n, rng() % n};
    const std::uint64_t src = rng() % n;
    for (auto kind : {AppKind::kPageRank, AppKind::kBfs, AppKind::kWcc}) {
      const AppConfig app = app_of(kind, 1 + rng() % 8);
      const bool sym = kind == AppKind::kWcc;
      const auto used = sym ? test::with_reverses(e) : e;
      const std::size_t om = 4096 + 2 * vertex_width(kind) * (1 + rng() % n);
      Runtime rt(om, 1 + rng() % 3);
      const GridShape s = make_shape(n, om, vertex_width(kind));
      const GridGraph grid = test::grid_of(used, n, s.chunk_size, 0, sym);
      std::vector<std::uint64_t> grid_words;
      if (kind == AppKind::kPageRank) {
        for (double w : values(pagerank(grid, app.iterations, app.damping, rt))) {
          grid_words.push_back(encode_weight(w));
        }
      } else if (kind == AppKind::kBfs) {
        grid_words = values(bfs(grid, src, app.iterations, rt));
      } else {
        grid_words = values(wcc(grid, app.iterations, rt));
      }
      const auto ss = values(sortscan_run(edge_array(used, rng() % 5), n, app, src, rt));
      const auto ref = reference_run(app, e, n, src);
      ASSERT_TRUE(results_match(kind, grid_words, ref)) << round << " " << to_string(kind);
      ASSERT_TRUE(results_match(kind, ss, ref)) << round << " " << to_string(kind);
    }
  }
}

}  // namespace
}  // namespace obg
