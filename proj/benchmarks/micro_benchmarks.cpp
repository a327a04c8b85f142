#include <benchmark/benchmark.h>

#include <random>

#include "fixtures.hpp"
#include "obgraph/apps.hpp"
#include "obgraph/baselines.hpp"
#include "obgraph/graph_io.hpp"
#include "obgraph/oprims.hpp"
#include "obgraph/scan.hpp"

namespace {

using namespace obg;

void BM_OSort(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const std::size_t om = static_cast<std::size_t>(state.range(1));
  std::mt19937_64 rng(1);
  std::vector<std::uint64_t> v(n);
  for (auto& x : v) x = rng();
  Runtime rt(om);
  for (auto _ : state) {
    state.PauseTiming();
    auto a = ExtArray<std::uint64_t>::adopt("bench.sort", v);
    state.ResumeTiming();
    o_sort(a, std::less<>{}, rt);
    benchmark::DoNotOptimize(a.peek().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_OSort)
    ->Args({1 << 14, 1 << 13})
    ->Args({1 << 14, 1 << 16})
    ->Args({1 << 18, 1 << 16})
    ->Args({1 << 18, 1 << 20})
    ->Unit(benchmark::kMillisecond);

// One PageRank accumulation scan over a random grid.
void BM_FullScan(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const std::size_t om = static_cast<std::size_t>(state.range(1));
  const std::size_t workers = static_cast<std::size_t>(state.range(2));
  const GridShape s = make_shape(n, om, sizeof(std::uint64_t));
  GridShape shape = s;
  shape.block_length = std::max<std::size_t>(1, 4 * n / s.blocks());
  std::mt19937_64 rng(2);
  const GridGraph g = tools::random_grid(shape, rng);
  Runtime rt(om, workers);
  ExtArray<std::uint64_t> src("bench.src", n, 1), dst("bench.dst", n, 0);
  for (auto _ : state) {
    full_scan(g, src, dst,
              [](const MappedEdge&, const std::uint64_t& a, std::uint64_t& b) { b += a; }, rt);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.edges.size()));
}
BENCHMARK(BM_FullScan)
    ->Args({1 << 16, 1310720, 1})
    ->Args({1 << 16, 1310720, 4})
    ->Args({1 << 16, 1 << 17, 4})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

void BM_PageRankIteration(benchmark::State& state) {
  const EdgeList g = kronecker_graph(14, 16, 3);
  const std::size_t om = 1310720;
  const GridShape s = make_shape(g.vertices, om, vertex_width(AppKind::kPageRank));
  std::vector<MappedEdge> me;
  for (const auto& [u, v] : g.edges) {
    me.push_back(MappedEdge::make(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v)));
  }
  GridShape shape = s;
  shape.block_length = max_block_occupancy(me, shape);
  const GridGraph grid = build_grid(me, shape);
  Runtime rt(om, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(pagerank(grid, 1, kDefaultDamping, rt));
}
BENCHMARK(BM_PageRankIteration)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_SortScanIteration(benchmark::State& state) {
  const EdgeList g = kronecker_graph(12, 14, 3);
  std::vector<MappedEdge> me;
  for (const auto& [u, v] : g.edges) {
    me.push_back(MappedEdge::make(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v)));
  }
  const auto edges = ExtArray<MappedEdge>::adopt("bench.edges", me);
  Runtime rt(1310720, static_cast<std::size_t>(state.range(0)));
  AppConfig app;
  auto el = sortscan_build(edges, g.vertices, app, 0, rt);
  const SortScanProgram prog{AppKind::kPageRank, kDefaultDamping};
  for (auto _ : state) sortscan_iteration(el, prog, rt);
}
BENCHMARK(BM_SortScanIteration)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
