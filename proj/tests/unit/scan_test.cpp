#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "obgraph/scan.hpp"
#include "test_support.hpp"

namespace obg {
namespace {

using test::values;
using U64 = std::uint64_t;

ExtArray<U64> vec(std::vector<U64> v, const std::string& name) {
  return ExtArray<U64>::adopt(name, std::move(v));
}

void add_src(const MappedEdge&, const U64& s, U64& d) { d += s; }

TEST(FullScan, MicroGrid) {
  const GridGraph g = test::micro_grid();
  Runtime rt(2 * 2 * 8 + kScanReserve);
  auto src = vec({1, 1, 1, 1}, "src");
  auto dst = vec({0, 0, 0, 0}, "dst");
  full_scan(g, src, dst, add_src, rt);
  EXPECT_EQ(values(dst), (std::vector<U64>{1, 0, 0, 2}));
  EXPECT_EQ(values(src), (std::vector<U64>{1, 1, 1, 1}));
}

TEST(FullScan, AllNullGridRewritesEveryChunk) {
  GridShape s{5, 2, 3, 2};
  const GridGraph g = build_grid({}, s);
  Runtime rt(1 << 16);
  auto src = vec({1, 2, 3, 4, 5}, "src");
  auto dst = vec({9, 8, 7, 6, 5}, "dst");
  auto t = test::traced([&] { full_scan(g, src, dst, add_src, rt); });
  EXPECT_EQ(values(dst), (std::vector<U64>{9, 8, 7, 6, 5}));
  std::size_t writes = 0;
  for (const auto& e : t->worker(0).events()) {
    if (e.kind == AccessKind::kWrite) {
      EXPECT_EQ(e.region, dst.region());
      ++writes;
    }
  }
  EXPECT_EQ(writes, 5u);
}

TEST(FullScan, TraceShape) {
  // Per column: k dst reads, then per block k src reads and l edge reads,
  // then k dst writes.
  const GridGraph g = test::micro_grid();
  Runtime rt(1 << 16);
  auto src = vec({1, 1, 1, 1}, "src");
  auto dst = vec({0, 0, 0, 0}, "dst");
  auto t = test::traced([&] { full_scan(g, src, dst, add_src, rt); });
  const std::size_t b = 2, k = 2, l = 2;
  EXPECT_EQ(t->total_events(), b * (k + b * (k + l) + k));
}

TEST(FullScan, TracePurityForDifferentGraphs) {
  const std::vector<PlainEdge> e1{{0, 3}, {1, 0}, {3, 3}};
  const std::vector<PlainEdge> e2{{1, 2}, {0, 0}, {2, 1}};
  // Same public shape: n=4, k=2, l=2.
  const GridGraph g1 = test::grid_of(e1, 4, 2, 2);
  const GridGraph g2 = test::grid_of(e2, 4, 2, 2);
  Runtime rt(1 << 16);
  auto run = [&](const GridGraph& g, std::vector<U64> init) {
    auto src = vec(init, "src");
    auto dst = vec({0, 0, 0, 0}, "dst");
    return test::traced([&] { full_scan(g, src, dst, add_src, rt); });
  };
  EXPECT_EQ(run(g1, {1, 2, 3, 4})->digest(), run(g2, {5, 6, 7, 8})->digest());
}

TEST(FullScanRows, OutDegrees) {
  const GridGraph g = test::micro_grid();
  Runtime rt(1 << 16);
  auto deg = vec({0, 0, 0, 0}, "deg");
  auto other = vec({0, 0, 0, 0}, "other");
  full_scan_rows(
      g, deg, other, [](const MappedEdge&, U64& s, const U64&) { ++s; }, rt);
  EXPECT_EQ(values(deg), (std::vector<U64>{1, 1, 0, 1}));
}

TEST(FullScanRows, AllNullUnchangedAndPure) {
  GridShape s{6, 4, 2, 3};
  const GridGraph empty = build_grid({}, s);
  std::mt19937_64 rng(1);
  const GridGraph full = tools::random_grid(s, rng);
  Runtime rt(1 << 16);
  auto run = [&](const GridGraph& g, ExtArray<U64>& src) {
    auto dst = vec({1, 1, 1, 1, 1, 1}, "dst");
    return test::traced([&] {
      full_scan_rows(
          g, src, dst, [](const MappedEdge&, U64& a, const U64& b) { a += b; }, rt);
    });
  };
  auto a = vec({3, 1, 4, 1, 5, 9}, "src");
  auto b = vec({2, 7, 1, 8, 2, 8}, "src");
  auto ta = run(empty, a);
  auto tb = run(full, b);
  EXPECT_EQ(values(a), (std::vector<U64>{3, 1, 4, 1, 5, 9}));
  EXPECT_EQ(ta->digest(), tb->digest());
}

TEST(FullScan, RejectsWrongLengths) {
  const GridGraph g = test::micro_grid();
  Runtime rt(1 << 16);
  auto src = vec({1, 1, 1}, "src");
  auto dst = vec({0, 0, 0, 0}, "dst");
  try {
    full_scan(g, src, dst, add_src, rt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSizeMismatch);
  }
}

// Random graphs against an edge-list fold, single and multi-worker.
TEST(FullScan, MatchesEdgeListFold) {
  std::mt19937_64 rng(13);
  for (int round = 0; round < 40; ++round) {
    const std::size_t n = 1 + rng() % 300;
    const std::size_t k = 1 + rng() % n;
    std::vector<PlainEdge> edges(rng() % 1000);
    for (auto& e : edges) e = {rng() % n, rng() % n};
    const GridGraph g = test::grid_of(edges, n, k);
    std::vector<U64> init(n);
    for (auto& x : init) x = rng() % 1000;
    std::vector<U64> in(n, 0), out(n, 0);
    for (const auto& [u, v] : edges) {
      in[v] += init[u];
      out[u] += init[v];
    }
    Runtime rt(2 * k * 8 + kScanReserve, 1 + rng() % 4);
    auto src = vec(init, "src");
    auto dst = vec(std::vector<U64>(n, 0), "dst");
    full_scan(g, src, dst, add_src, rt);
    ASSERT_EQ(values(dst), in);
    auto rows = vec(std::vector<U64>(n, 0), "rows");
    full_scan_rows(
        g, rows, src, [](const MappedEdge&, U64& a, const U64& b) { a += b; }, rt);
    ASSERT_EQ(values(rows), out);
  }
}

TEST(FullScan, PaddingIsTransparent) {
  std::mt19937_64 rng(17);
  std::vector<PlainEdge> edges(200);
  for (auto& e : edges) e = {rng() % 40, rng() % 40};
  const GridGraph tight = test::grid_of(edges, 40, 9);
  const GridGraph padded = test::grid_of(edges, 40, 9, tight.shape.block_length + 13);
  std::vector<U64> init(40);
  for (auto& x : init) x = rng() % 100;
  Runtime rt(1 << 16);
  auto s1 = vec(init, "s");
  auto s2 = vec(init, "s");
  auto d1 = vec(std::vector<U64>(40, 0), "d");
  auto d2 = vec(std::vector<U64>(40, 0), "d");
  full_scan(tight, s1, d1, add_src, rt);
  full_scan(padded, s2, d2, add_src, rt);
  EXPECT_EQ(values(d1), values(d2));
}

TEST(FullScan, PeakOmIsTwoChunksPlusReserve) {
  std::mt19937_64 rng(5);
  for (std::size_t vwidth_case = 0; vwidth_case < 2; ++vwidth_case) {
    const std::size_t om = 40000;
    const GridShape s = make_shape(10000, om, sizeof(U64), 8);
    const GridGraph g = tools::random_grid(s, rng);
    Runtime rt(om, 2);
    auto src = vec(std::vector<U64>(s.vertices, 1), "src");
    auto dst = vec(std::vector<U64>(s.vertices, 0), "dst");
    full_scan(g, src, dst, add_src, rt);
    for (std::size_t w = 0; w < 2; ++w) {
      EXPECT_EQ(rt.om(w).peak(), 2 * s.chunk_size * sizeof(U64) + kScanReserve);
      EXPECT_LE(rt.om(w).peak(), om);
      EXPECT_EQ(rt.om(w).used(), 0u);
    }
  }
}

TEST(FullScan, WorkerTracesArePure) {
  std::mt19937_64 rng(23);
  const GridShape s = make_shape(500, 4096 + 2 * 64 * 8, 8, 6);
  ASSERT_GT(s.chunk_count, 3u);
  Runtime rt(4096 + 2 * 64 * 8, 3);
  std::vector<std::vector<Digest>> seen;
  for (int trial = 0; trial < 4; ++trial) {
    const GridGraph g = tools::random_grid(s, rng);
    std::vector<U64> init(500);
    for (auto& x : init) x = rng();
    auto src = vec(init, "src");
    auto dst = vec(std::vector<U64>(500, 0), "dst");
    auto t = test::traced([&] { full_scan(g, src, dst, add_src, rt); }, 3);
    seen.push_back(t->worker_digests());
  }
  for (const auto& d : seen) EXPECT_EQ(d, seen[0]);
}

}  // namespace
}  // namespace obg
