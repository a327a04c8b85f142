#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "obgraph/apps.hpp"
#include "obgraph/ext_array.hpp"
#include "obgraph/grid.hpp"
#include "obgraph/runtime.hpp"

namespace obg {

// One record of the combined vertex+edge list of the sort-scan baseline.
// Vertices have src == dst == id; null edges sort after everything.
struct SortScanElement {
  std::uint64_t src = 0;
  std::uint64_t dst = 0;
  std::uint64_t value = 0;  // vertex state, or the message an edge carries
  std::uint64_t aux = 0;    // out-degree (vertices, PageRank)
  std::uint64_t kind = 0;   // kVertex / kEdge / kNullEdge

  static constexpr std::uint64_t kVertex = 0;
  static constexpr std::uint64_t kEdge = 1;
  static constexpr std::uint64_t kNullEdge = 2;
};

// Per-app message rules for the scatter and gather scans.
struct SortScanProgram {
  AppKind kind = AppKind::kPageRank;
  double damping = kDefaultDamping;

  std::uint64_t message(const SortScanElement& vertex) const;
  std::uint64_t identity() const;
  std::uint64_t combine(std::uint64_t acc, std::uint64_t msg) const;
  std::uint64_t apply(const SortScanElement& vertex, std::uint64_t acc) const;
};

// Lays out n vertices followed by the edges (nulls kept as kNullEdge) with
// initial states; PageRank degrees are filled by one counting sort-scan.
ExtArray<SortScanElement> sortscan_build(const ExtArray<MappedEdge>& edges,
                                         std::size_t vertices, const AppConfig& app,
                                         std::uint64_t source_mapped, Runtime& rt);

// Sort by source, propagate vertex messages onto out-edges, sort by
// destination, fold messages into vertices. Two o_sorts of n + m records.
void sortscan_iteration(ExtArray<SortScanElement>& elements,
                        const SortScanProgram& program, Runtime& rt);

// Vertex results ordered by MappedID (n public).
ExtArray<std::uint64_t> sortscan_results(ExtArray<SortScanElement>& elements,
                                         std::size_t vertices, Runtime& rt);

ExtArray<std::uint64_t> sortscan_run(const ExtArray<MappedEdge>& edges,
                                     std::size_t vertices, const AppConfig& app,
                                     std::uint64_t source_mapped, Runtime& rt,
                                     const IterationHook& hook = {});

using PlainEdge = std::pair<std::uint64_t, std::uint64_t>;

// Non-oblivious adjacency-list engine with the same t-round semantics.
// WCC treats edges as undirected. Results use the encode_weight convention.
std::vector<std::uint64_t> reference_run(const AppConfig& app,
                                         std::span<const PlainEdge> edges,
                                         std::size_t vertices,
                                         std::uint64_t source = 0);

}  // namespace obg
