#pragma once

// Full-graph scans over a GridGraph. Per worker, the external trace is fixed
// by (b, k, l, n, vertex width, worker count): chunk loads, the complete
// edge list of every block including padding, and an unconditional
// write-back of the accumulating chunk. Kernels only see OM-resident records.

#include <cstddef>
#include <string>

#include "obgraph/error.hpp"
#include "obgraph/ext_array.hpp"
#include "obgraph/grid.hpp"
#include "obgraph/om.hpp"
#include "obgraph/runtime.hpp"

namespace obg {

namespace detail {

inline void check_scan_arrays(const GridShape& s, std::size_t a, std::size_t b) {
  if (a != s.vertices || b != s.vertices) {
    throw Error(ErrorCode::kSizeMismatch,
                "vertex arrays must have exactly n = " + std::to_string(s.vertices) +
                    " records");
  }
}

template <class V>
void load_chunk(const ExtArray<V>& from, std::size_t base, std::size_t len,
                OmBuffer<V>& to) {
  for (std::size_t i = 0; i < len; ++i) to[i] = from.read(base + i);
}

template <class V>
void store_chunk(const OmBuffer<V>& from, std::size_t base, std::size_t len,
                 ExtArray<V>& to) {
  for (std::size_t i = 0; i < len; ++i) to.write(base + i, from[i]);
}

}  // namespace detail

// Column-major scan. For each destination chunk c (assigned to worker
// c mod W): load it, then for every source chunk r load it and stream block
// (r, c), applying kernel(edge, src_record, dst_record&) to each real edge;
// finally write chunk c back. `dst` is updated in place; `src` is only read.
template <class V, class Kernel>
void full_scan(const GridGraph& grid, const ExtArray<V>& src, ExtArray<V>& dst,
               Kernel&& kernel, Runtime& rt) {
  const GridShape& s = grid.shape;
  detail::check_scan_arrays(s, src.size(), dst.size());
  const std::size_t workers = rt.workers();
  rt.parallel([&](std::size_t w) {
    if (w >= s.chunk_count) return;
    OMArena& om = rt.om(w);
    OmBlock reserve = om.allocate(kScanReserve);
    OmBuffer<V> dst_chunk(om, s.chunk_size);
    OmBuffer<V> src_chunk(om, s.chunk_size);
    for (std::size_t c = w; c < s.chunk_count; c += workers) {
      const std::size_t dst_base = s.chunk_begin(c);
      const std::size_t dst_len = s.chunk_length(c);
      detail::load_chunk(dst, dst_base, dst_len, dst_chunk);
      for (std::size_t r = 0; r < s.chunk_count; ++r) {
        const std::size_t src_base = s.chunk_begin(r);
        detail::load_chunk(src, src_base, s.chunk_length(r), src_chunk);
        const std::size_t off = s.block_offset(r, c);
        for (std::size_t e = 0; e < s.block_length; ++e) {
          const MappedEdge edge = grid.edges.read(off + e);
          if (!edge.is_null) {
            kernel(edge, src_chunk[edge.src - src_base],
                   dst_chunk[edge.dst - dst_base]);
          }
        }
      }
      detail::store_chunk(dst_chunk, dst_base, dst_len, dst);
    }
  });
}

// Row-major twin of full_scan: source chunk r (worker r mod W) accumulates
// kernel(edge, src_record&, dst_record) over blocks (r, 0..b-1) and is written
// back; `dst` is only read.
template <class V, class Kernel>
void full_scan_rows(const GridGraph& grid, ExtArray<V>& src, const ExtArray<V>& dst,
                    Kernel&& kernel, Runtime& rt) {
  const GridShape& s = grid.shape;
  detail::check_scan_arrays(s, src.size(), dst.size());
  const std::size_t workers = rt.workers();
  rt.parallel([&](std::size_t w) {
    if (w >= s.chunk_count) return;
    OMArena& om = rt.om(w);
    OmBlock reserve = om.allocate(kScanReserve);
    OmBuffer<V> src_chunk(om, s.chunk_size);
    OmBuffer<V> dst_chunk(om, s.chunk_size);
    for (std::size_t r = w; r < s.chunk_count; r += workers) {
      const std::size_t src_base = s.chunk_begin(r);
      const std::size_t src_len = s.chunk_length(r);
      detail::load_chunk(src, src_base, src_len, src_chunk);
      for (std::size_t c = 0; c < s.chunk_count; ++c) {
        const std::size_t dst_base = s.chunk_begin(c);
        detail::load_chunk(dst, dst_base, s.chunk_length(c), dst_chunk);
        const std::size_t off = s.block_offset(r, c);
        for (std::size_t e = 0; e < s.block_length; ++e) {
          const MappedEdge edge = grid.edges.read(off + e);
          if (!edge.is_null) {
            kernel(edge, src_chunk[edge.src - src_base],
                   dst_chunk[edge.dst - dst_base]);
          }
        }
      }
      detail::store_chunk(src_chunk, src_base, src_len, src);
    }
  });
}

}  // namespace obg
