#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "obgraph/ext_array.hpp"
#include "obgraph/grid.hpp"
#include "obgraph/ids.hpp"
#include "obgraph/runtime.hpp"

namespace obg {

enum class AppKind { kPageRank, kBfs, kWcc };

std::string_view to_string(AppKind kind);
AppKind parse_app(std::string_view name);

inline constexpr double kDefaultDamping = 0.85;
inline constexpr std::uint64_t kInfinity = ~std::uint64_t{0};

struct AppConfig {
  AppKind kind = AppKind::kPageRank;
  std::size_t iterations = 10;
  double damping = kDefaultDamping;
  std::string bfs_source;  // raw key of the BFS source vertex
};

struct PRState {
  double weight = 1.0;
  std::uint64_t degree = 0;
};

// Bytes per vertex record the app's scan keeps in OM; fixes k.
std::size_t vertex_width(AppKind kind);

// Called after every iteration with its 0-based index.
using IterationHook = std::function<void(std::size_t)>;

// Out-degree of every vertex via a row-major scan.
ExtArray<std::uint64_t> compute_out_degrees(const GridGraph& grid, Runtime& rt);

// w_t(v) = (1 - f) + f * sum_{(u,v)} w_{t-1}(u) / d(u), w_0 = 1. Vertices
// without out-edges contribute nothing.
ExtArray<double> pagerank(const GridGraph& grid, std::size_t iterations, double damping,
                          Runtime& rt, const IterationHook& hook = {});

// Negative control for the trace checker: identical results, but the edge
// kernel reads the source weight from external memory at the edge's source
// ID, so the trace depends on the graph.
ExtArray<double> pagerank_leaky(const GridGraph& grid, std::size_t iterations,
                                double damping, Runtime& rt);

// MappedID of `source` via one equality pass over the owning party's map.
// Throws kUnknownSource if absent.
std::uint64_t resolve_source(const ExtArray<IdMapping>& party_map,
                             const OriginalID& source);

// Exactly `iterations` synchronous relaxation rounds; unreachable = kInfinity.
ExtArray<std::uint64_t> bfs(const GridGraph& grid, std::uint64_t source_mapped,
                            std::size_t iterations, Runtime& rt,
                            const IterationHook& hook = {});

// Exactly `iterations` rounds of min-label propagation from label(v) = v.
// The grid must have been built with reverse edges (kSymmetryRequired).
ExtArray<std::uint64_t> wcc(const GridGraph& grid, std::size_t iterations, Runtime& rt,
                            const IterationHook& hook = {});

// Result words: PageRank stores the IEEE-754 bits of the weight.
std::uint64_t encode_weight(double w);
double decode_weight(std::uint64_t bits);

// Exact for BFS/WCC, relative tolerance per vertex for PageRank.
bool results_match(AppKind kind, std::span<const std::uint64_t> a,
                   std::span<const std::uint64_t> b, double rel_tol = 1e-9);
bool result_words_match(AppKind kind, std::uint64_t a, std::uint64_t b,
                        double rel_tol = 1e-9);

}  // namespace obg
