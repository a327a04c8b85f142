#include "obgraph/apps.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "obgraph/error.hpp"
#include "obgraph/oprims.hpp"
#include "obgraph/scan.hpp"

namespace obg {

std::string_view to_string(AppKind kind) {
  switch (kind) {
    case AppKind::kPageRank: return "pr";
    case AppKind::kBfs: return "bfs";
    case AppKind::kWcc: return "wcc";
  }
  return "?";
}

AppKind parse_app(std::string_view name) {
  if (name == "pr" || name == "pagerank") return AppKind::kPageRank;
  if (name == "bfs") return AppKind::kBfs;
  if (name == "wcc") return AppKind::kWcc;
  throw Error(ErrorCode::kInvalidArgument, "unknown app '" + std::string(name) + "'");
}

std::size_t vertex_width(AppKind kind) {
  return kind == AppKind::kPageRank ? sizeof(PRState) : sizeof(std::uint64_t);
}

std::uint64_t encode_weight(double w) { return std::bit_cast<std::uint64_t>(w); }
double decode_weight(std::uint64_t bits) { return std::bit_cast<double>(bits); }

ExtArray<std::uint64_t> compute_out_degrees(const GridGraph& grid, Runtime& rt) {
  const std::size_t n = grid.shape.vertices;
  ExtArray<std::uint64_t> degree("app.degree", n, 0);
  ExtArray<std::uint64_t> peer("app.degree.peer", n, 0);
  full_scan_rows(
      grid, degree, peer,
      [](const MappedEdge&, std::uint64_t& src, const std::uint64_t&) { ++src; }, rt);
  return degree;
}

namespace {

ExtArray<PRState> pagerank_state(const GridGraph& grid, Runtime& rt) {
  auto degree = compute_out_degrees(grid, rt);
  return o_trans(
      degree, [](std::uint64_t d) { return PRState{1.0, d}; }, "pr.state");
}

template <class Kernel>
ExtArray<double> pagerank_with(const GridGraph& grid, std::size_t iterations,
                               double damping, Runtime& rt, const IterationHook& hook,
                               Kernel kernel) {
  auto state = pagerank_state(grid, rt);
  const double base = 1.0 - damping;
  for (std::size_t it = 0; it < iterations; ++it) {
    auto acc = o_trans(
        state, [](const PRState& s) { return PRState{0.0, s.degree}; }, "pr.acc");
    kernel(state, acc);
    state = o_trans(
        acc,
        [&](const PRState& s) { return PRState{base + damping * s.weight, s.degree}; },
        "pr.state");
    if (hook) hook(it);
  }
  return o_trans(state, [](const PRState& s) { return s.weight; }, "pr.result");
}

}  // namespace

ExtArray<double> pagerank(const GridGraph& grid, std::size_t iterations, double damping,
                          Runtime& rt, const IterationHook& hook) {
  return pagerank_with(grid, iterations, damping, rt, hook,
                       [&](const ExtArray<PRState>& prev, ExtArray<PRState>& acc) {
                         full_scan(
                             grid, prev, acc,
                             [](const MappedEdge&, const PRState& u, PRState& v) {
                               if (u.degree != 0) {
                                 v.weight += u.weight / static_cast<double>(u.degree);
                               }
                             },
                             rt);
                       });
}

ExtArray<double> pagerank_leaky(const GridGraph& grid, std::size_t iterations,
                                double damping, Runtime& rt) {
  return pagerank_with(grid, iterations, damping, rt, {},
                       [&](const ExtArray<PRState>& prev, ExtArray<PRState>& acc) {
                         full_scan(
                             grid, prev, acc,
                             [&prev](const MappedEdge& e, const PRState&, PRState& v) {
                               const PRState u = prev.read(e.src);
                               if (u.degree != 0) {
                                 v.weight += u.weight / static_cast<double>(u.degree);
                               }
                             },
                             rt);
                       });
}

std::uint64_t resolve_source(const ExtArray<IdMapping>& party_map,
                             const OriginalID& source) {
  std::uint64_t found = kInfinity;
  [[maybe_unused]] auto scratch = o_trans(
      party_map,
      [&](const IdMapping& m) {
        const bool hit = m.id == source;
        found = hit ? m.mapped : found;
        return static_cast<std::uint8_t>(hit);
      },
      "bfs.source.scan");
  if (found == kInfinity) {
    throw Error(ErrorCode::kUnknownSource, "source " + source.hex() + " not in party map");
  }
  return found;
}

namespace {

template <class Init, class Kernel>
ExtArray<std::uint64_t> label_rounds(const GridGraph& grid, std::size_t iterations,
                                     Runtime& rt, const IterationHook& hook,
                                     const std::string& name, Init init, Kernel kernel) {
  ExtArray<std::uint64_t> ids(name + ".init", grid.shape.vertices, 0);
  std::uint64_t next = 0;
  auto state = o_trans(
      ids, [&](std::uint64_t) { return init(next++); }, name + ".state");
  for (std::size_t it = 0; it < iterations; ++it) {
    auto out = o_trans(state, [](std::uint64_t x) { return x; }, name + ".next");
    full_scan(grid, state, out, kernel, rt);
    state = std::move(out);
    if (hook) hook(it);
  }
  return state;
}

}  // namespace

ExtArray<std::uint64_t> bfs(const GridGraph& grid, std::uint64_t source_mapped,
                            std::size_t iterations, Runtime& rt,
                            const IterationHook& hook) {
  if (source_mapped >= grid.shape.vertices) {
    throw Error(ErrorCode::kUnknownSource, "source MappedID beyond n");
  }
  return label_rounds(
      grid, iterations, rt, hook, "bfs",
      [source_mapped](std::uint64_t v) { return v == source_mapped ? 0 : kInfinity; },
      [](const MappedEdge&, const std::uint64_t& u, std::uint64_t& v) {
        const std::uint64_t via = u == kInfinity ? kInfinity : u + 1;
        v = std::min(v, via);
      });
}

ExtArray<std::uint64_t> wcc(const GridGraph& grid, std::size_t iterations, Runtime& rt,
                            const IterationHook& hook) {
  if (!grid.symmetric) {
    throw Error(ErrorCode::kSymmetryRequired,
                "WCC needs a grid built with reverse edges");
  }
  return label_rounds(
      grid, iterations, rt, hook, "wcc", [](std::uint64_t v) { return v; },
      [](const MappedEdge&, const std::uint64_t& u, std::uint64_t& v) {
        v = std::min(v, u);
      });
}

bool result_words_match(AppKind kind, std::uint64_t a, std::uint64_t b,
                        double rel_tol) {
  if (kind != AppKind::kPageRank) return a == b;
  const double x = decode_weight(a);
  const double y = decode_weight(b);
  const double scale = std::max(std::abs(x), std::abs(y));
  return std::abs(x - y) <= rel_tol * scale;
}

bool results_match(AppKind kind, std::span<const std::uint64_t> a,
                   std::span<const std::uint64_t> b, double rel_tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!result_words_match(kind, a[i], b[i], rel_tol)) return false;
  }
  return true;
}

}  // namespace obg
