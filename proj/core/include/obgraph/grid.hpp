#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "obgraph/ext_array.hpp"

namespace obg {

// OM bytes set aside for the scan's own temporaries next to the two chunks.
inline constexpr std::size_t kScanReserve = 4096;

// Everything about a run that may be observed. Secret edge counts are
// deliberately absent.
struct PublicParams {
  std::size_t parties = 0;                       // p
  std::vector<std::size_t> party_vertices;       // n_i
  std::size_t total_vertices = 0;                // N = sum n_i
  std::size_t vertices = 0;                      // n (merged)
  std::size_t iterations = 0;                    // t
  std::size_t om_bytes = 0;                      // s
  std::size_t chunk_size = 0;                    // k
  std::size_t chunk_count = 0;                   // b = ceil(n / k)
  std::vector<std::size_t> party_block_lengths;  // l_i
  std::size_t block_length = 0;                  // l = sum l_i
  std::size_t vertex_width = 0;                  // bytes per vertex record
  std::size_t workers = 1;

  // Throws kParamMismatch when the derived fields are inconsistent.
  void validate() const;
};

struct GridShape {
  std::size_t vertices = 0;      // n
  std::size_t chunk_size = 0;    // k
  std::size_t chunk_count = 0;   // b
  std::size_t block_length = 0;  // l

  std::size_t blocks() const { return chunk_count * chunk_count; }
  std::size_t block_offset(std::size_t row, std::size_t col) const {
    return (row * chunk_count + col) * block_length;
  }
  // First vertex and vertex count of chunk c; the last chunk may be short.
  std::size_t chunk_begin(std::size_t c) const { return c * chunk_size; }
  std::size_t chunk_length(std::size_t c) const;

  friend bool operator==(const GridShape&, const GridShape&) = default;
};

struct MappedEdge {
  std::uint32_t src = 0;
  std::uint32_t dst = 0;
  std::uint32_t is_null = 1;

  static MappedEdge make(std::uint32_t src, std::uint32_t dst) {
    return {src, dst, 0};
  }
  static MappedEdge null() { return {}; }

  friend bool operator==(const MappedEdge&, const MappedEdge&) = default;
};

// k = floor((s - reserve) / (2 * vwidth)); throws kOMTooSmall when k < 1.
std::size_t choose_chunk_size(std::size_t om_bytes, std::size_t vertex_width,
                              std::size_t reserve = kScanReserve);

// Grid geometry for n vertices: k from the OM budget, capped at n.
GridShape make_shape(std::size_t vertices, std::size_t om_bytes,
                     std::size_t vertex_width, std::size_t block_length = 0);

// Largest number of edges falling in any single block.
std::size_t max_block_occupancy(std::span<const MappedEdge> edges,
                                const GridShape& shape);

// b x b blocks, row-major, each exactly `shape.block_length` edges.
struct GridGraph {
  GridShape shape;
  bool symmetric = false;
  ExtArray<MappedEdge> edges;

  // Untraced count of real edges (the secret m); for tests and reports.
  std::size_t non_null_count() const;
};

// Client-side (non-oblivious) construction: places each edge in block
// (src / k, dst / k) in arrival order and pads with nulls.
GridGraph build_grid(std::span<const MappedEdge> edges, const GridShape& shape,
                     std::string name = "grid.edges");

// Bits per offset field: ceil(log2(k + 1)); offset value k marks null.
std::uint32_t offset_field_width(std::size_t chunk_size);
std::size_t encoded_block_bytes(std::size_t chunk_size, std::size_t block_length);

// Each edge becomes (src % k, dst % k) in two w-bit fields, little-endian,
// bit 0 first; null edges are (k, k). Zero-padded to a byte boundary.
std::vector<std::uint8_t> encode_block(std::span<const MappedEdge> block,
                                       std::size_t chunk_size);

// Inverse of encode_block for block (row, col); offsets are rebased to
// absolute vertex IDs. Throws kMalformedBlock on a wrong length, an offset in
// (k, 2^w), or a half-null edge.
std::vector<MappedEdge> decode_block(std::span<const std::uint8_t> bytes,
                                     std::size_t chunk_size,
                                     std::size_t block_length, std::size_t row,
                                     std::size_t col);

// Container: "OBGE", u32 version, then u64 n, k, b, l, per-block bytes, then
// b^2 encoded blocks row-major. Little-endian throughout.
inline constexpr std::uint32_t kGridFormatVersion = 1;
inline constexpr std::size_t kGridHeaderBytes = 4 + 4 + 5 * 8;

std::vector<std::uint8_t> encode_grid(const GridGraph& grid);
// Reading writes every decoded edge into the new grid's external array, so a
// server-side receive is traced as one sequential write pass.
GridGraph decode_grid(std::span<const std::uint8_t> bytes,
                      std::string name = "grid.edges");
GridShape peek_grid_shape(std::span<const std::uint8_t> bytes);

void write_grid_file(const std::filesystem::path& path, const GridGraph& grid);
GridGraph read_grid_file(const std::filesystem::path& path);

}  // namespace obg
