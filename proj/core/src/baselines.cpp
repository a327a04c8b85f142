#include "obgraph/baselines.hpp"

#include <algorithm>
#include <tuple>

#include "obgraph/error.hpp"
#include "obgraph/oprims.hpp"

namespace obg {

using Elem = SortScanElement;

std::uint64_t SortScanProgram::message(const Elem& vertex) const {
  switch (kind) {
    case AppKind::kPageRank:
      return encode_weight(vertex.aux == 0 ? 0.0
                                           : decode_weight(vertex.value) /
                                                 static_cast<double>(vertex.aux));
    case AppKind::kBfs:
      return vertex.value == kInfinity ? kInfinity : vertex.value + 1;
    case AppKind::kWcc:
      return vertex.value;
  }
  return 0;
}

std::uint64_t SortScanProgram::identity() const {
  return kind == AppKind::kPageRank ? encode_weight(0.0) : kInfinity;
}

std::uint64_t SortScanProgram::combine(std::uint64_t acc, std::uint64_t msg) const {
  if (kind == AppKind::kPageRank) {
    return encode_weight(decode_weight(acc) + decode_weight(msg));
  }
  return std::min(acc, msg);
}

std::uint64_t SortScanProgram::apply(const Elem& vertex, std::uint64_t acc) const {
  if (kind == AppKind::kPageRank) {
    return encode_weight((1.0 - damping) + damping * decode_weight(acc));
  }
  return std::min(vertex.value, acc);
}

namespace {

// Source order, vertex before its out-edges.
bool scatter_less(const Elem& a, const Elem& b) {
  const auto ka = a.kind == Elem::kVertex ? 0 : 1;
  const auto kb = b.kind == Elem::kVertex ? 0 : 1;
  return std::tie(a.src, ka, a.dst) < std::tie(b.src, kb, b.dst);
}

// Destination order, in-edges before their vertex.
bool gather_less(const Elem& a, const Elem& b) {
  const auto ka = a.kind == Elem::kVertex ? 1 : 0;
  const auto kb = b.kind == Elem::kVertex ? 1 : 0;
  return std::tie(a.dst, ka, a.src) < std::tie(b.dst, kb, b.src);
}

// Source order, out-edges before their vertex.
bool degree_less(const Elem& a, const Elem& b) {
  const auto ka = a.kind == Elem::kVertex ? 1 : 0;
  const auto kb = b.kind == Elem::kVertex ? 1 : 0;
  return std::tie(a.src, ka, a.dst) < std::tie(b.src, kb, b.dst);
}

std::uint64_t initial_value(const AppConfig& app, std::uint64_t v,
                            std::uint64_t source_mapped) {
  switch (app.kind) {
    case AppKind::kPageRank: return encode_weight(1.0);
    case AppKind::kBfs: return v == source_mapped ? 0 : kInfinity;
    case AppKind::kWcc: return v;
  }
  return 0;
}

}  // namespace

ExtArray<Elem> sortscan_build(const ExtArray<MappedEdge>& edges, std::size_t vertices,
                              const AppConfig& app, std::uint64_t source_mapped,
                              Runtime& rt) {
  const std::size_t m = edges.size();
  ExtArray<Elem> el("sortscan.elements", vertices + m);
  for (std::size_t v = 0; v < vertices; ++v) {
    el.write(v, Elem{v, v, initial_value(app, v, source_mapped), 0, Elem::kVertex});
  }
  for (std::size_t j = 0; j < m; ++j) {
    const MappedEdge e = edges.read(j);
    Elem x;
    x.kind = e.is_null ? Elem::kNullEdge : Elem::kEdge;
    x.src = e.is_null ? kNullField : e.src;
    x.dst = e.is_null ? kNullField : e.dst;
    el.write(vertices + j, x);
  }
  if (app.kind == AppKind::kPageRank) {
    o_sort(el, degree_less, rt);
    std::uint64_t count = 0;
    for (std::size_t i = 0; i < el.size(); ++i) {
      Elem x = el.read(i);
      const bool vertex = x.kind == Elem::kVertex;
      count += x.kind == Elem::kEdge ? 1 : 0;
      x.aux = vertex ? count : x.aux;
      count = vertex ? 0 : count;
      el.write(i, x);
    }
  }
  return el;
}

void sortscan_iteration(ExtArray<Elem>& el, const SortScanProgram& program,
                        Runtime& rt) {
  o_sort(el, scatter_less, rt);
  std::uint64_t carried = program.identity();
  for (std::size_t i = 0; i < el.size(); ++i) {
    Elem x = el.read(i);
    if (x.kind == Elem::kVertex) {
      carried = program.message(x);
    } else {
      x.value = carried;
    }
    el.write(i, x);
  }

  o_sort(el, gather_less, rt);
  std::uint64_t acc = program.identity();
  for (std::size_t i = 0; i < el.size(); ++i) {
    Elem x = el.read(i);
    if (x.kind == Elem::kEdge) {
      acc = program.combine(acc, x.value);
    } else if (x.kind == Elem::kVertex) {
      x.value = program.apply(x, acc);
      acc = program.identity();
    }
    el.write(i, x);
  }
}

ExtArray<std::uint64_t> sortscan_results(ExtArray<Elem>& el, std::size_t vertices,
                                         Runtime& rt) {
  auto verts = o_filter(
      el, [](const Elem& x) { return x.kind == Elem::kVertex; }, vertices, rt,
      "sortscan.vertices", [](const Elem& a, const Elem& b) { return a.src < b.src; });
  return o_trans(verts, [](const Elem& x) { return x.value; }, "sortscan.result");
}

ExtArray<std::uint64_t> sortscan_run(const ExtArray<MappedEdge>& edges,
                                     std::size_t vertices, const AppConfig& app,
                                     std::uint64_t source_mapped, Runtime& rt,
                                     const IterationHook& hook) {
  auto el = sortscan_build(edges, vertices, app, source_mapped, rt);
  const SortScanProgram program{app.kind, app.damping};
  for (std::size_t it = 0; it < app.iterations; ++it) {
    sortscan_iteration(el, program, rt);
    if (hook) hook(it);
  }
  return sortscan_results(el, vertices, rt);
}

std::vector<std::uint64_t> reference_run(const AppConfig& app,
                                         std::span<const PlainEdge> edges,
                                         std::size_t vertices, std::uint64_t source) {
  const std::size_t n = vertices;
  for (const auto& [u, v] : edges) {
    if (u >= n || v >= n) {
      throw Error(ErrorCode::kInvalidArgument, "edge endpoint beyond vertex count");
    }
  }
  std::vector<std::vector<std::uint64_t>> out(n);
  for (const auto& [u, v] : edges) out[u].push_back(v);

  std::vector<std::uint64_t> result(n);
  switch (app.kind) {
    case AppKind::kPageRank: {
      std::vector<double> w(n, 1.0);
      std::vector<double> acc(n);
      for (std::size_t it = 0; it < app.iterations; ++it) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t u = 0; u < n; ++u) {
          if (out[u].empty()) continue;
          const double share = w[u] / static_cast<double>(out[u].size());
          for (auto v : out[u]) acc[v] += share;
        }
        for (std::size_t v = 0; v < n; ++v) {
          w[v] = (1.0 - app.damping) + app.damping * acc[v];
        }
      }
      for (std::size_t v = 0; v < n; ++v) result[v] = encode_weight(w[v]);
      break;
    }
    case AppKind::kBfs: {
      if (source >= n) throw Error(ErrorCode::kUnknownSource, "source beyond n");
      std::vector<std::uint64_t> dist(n, kInfinity);
      dist[source] = 0;
      for (std::size_t it = 0; it < app.iterations; ++it) {
        auto next = dist;
        for (std::size_t u = 0; u < n; ++u) {
          if (dist[u] == kInfinity) continue;
          for (auto v : out[u]) next[v] = std::min(next[v], dist[u] + 1);
        }
        dist = std::move(next);
      }
      result = std::move(dist);
      break;
    }
    case AppKind::kWcc: {
      std::vector<std::uint64_t> label(n);
      for (std::size_t v = 0; v < n; ++v) label[v] = v;
      for (std::size_t it = 0; it < app.iterations; ++it) {
        auto next = label;
        for (const auto& [u, v] : edges) {
          next[v] = std::min(next[v], label[u]);
          next[u] = std::min(next[u], label[v]);
        }
        label = std::move(next);
      }
      result = std::move(label);
      break;
    }
  }
  return result;
}

}  // namespace obg
