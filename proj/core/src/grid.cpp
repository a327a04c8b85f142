#include "obgraph/grid.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>

#include "byte_io.hpp"
#include "obgraph/error.hpp"

namespace obg {

void PublicParams::validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kParamMismatch, what);
  };
  if (party_vertices.size() != parties) fail("one vertex count per party");
  if (std::accumulate(party_vertices.begin(), party_vertices.end(),
                      std::size_t{0}) != total_vertices) {
    fail("N differs from the sum of n_i");
  }
  if (vertices > total_vertices) fail("n exceeds N");
  if (chunk_size == 0) fail("chunk size must be positive");
  if (chunk_count != (vertices + chunk_size - 1) / chunk_size) {
    fail("b differs from ceil(n / k)");
  }
  if (!party_block_lengths.empty()) {
    if (party_block_lengths.size() != parties) fail("one block length per party");
    if (std::accumulate(party_block_lengths.begin(), party_block_lengths.end(),
                        std::size_t{0}) != block_length) {
      fail("l differs from the sum of l_i");
    }
  }
  if (vertex_width > 0 && 2 * chunk_size * vertex_width + kScanReserve > om_bytes) {
    fail("two chunks plus the scan reserve exceed the OM size");
  }
}

std::size_t GridShape::chunk_length(std::size_t c) const {
  const std::size_t begin = chunk_begin(c);
  return std::min(chunk_size, vertices - std::min(vertices, begin));
}

std::size_t choose_chunk_size(std::size_t om_bytes, std::size_t vertex_width,
                              std::size_t reserve) {
  if (vertex_width == 0) {
    throw Error(ErrorCode::kInvalidArgument, "vertex width must be positive");
  }
  if (om_bytes < reserve + 2 * vertex_width) {
    throw Error(ErrorCode::kOMTooSmall,
                "OM of " + std::to_string(om_bytes) +
                    " bytes cannot hold two vertex records of " +
                    std::to_string(vertex_width) + " bytes plus " +
                    std::to_string(reserve) + " reserved");
  }
  return (om_bytes - reserve) / (2 * vertex_width);
}

GridShape make_shape(std::size_t vertices, std::size_t om_bytes,
                     std::size_t vertex_width, std::size_t block_length) {
  if (vertices == 0) {
    throw Error(ErrorCode::kInvalidArgument, "graph has no vertices");
  }
  GridShape s;
  s.vertices = vertices;
  s.chunk_size = std::min(choose_chunk_size(om_bytes, vertex_width), vertices);
  s.chunk_count = (vertices + s.chunk_size - 1) / s.chunk_size;
  s.block_length = block_length;
  return s;
}

std::size_t max_block_occupancy(std::span<const MappedEdge> edges,
                                const GridShape& shape) {
  std::vector<std::size_t> counts(shape.blocks(), 0);
  std::size_t best = 0;
  for (const auto& e : edges) {
    if (e.is_null) continue;
    const std::size_t x =
        (e.src / shape.chunk_size) * shape.chunk_count + e.dst / shape.chunk_size;
    best = std::max(best, ++counts.at(x));
  }
  return best;
}

std::size_t GridGraph::non_null_count() const {
  const auto all = edges.peek();
  return static_cast<std::size_t>(std::count_if(
      all.begin(), all.end(), [](const MappedEdge& e) { return !e.is_null; }));
}

GridGraph build_grid(std::span<const MappedEdge> edges, const GridShape& shape,
                     std::string name) {
  const std::size_t l = shape.block_length;
  std::vector<MappedEdge> storage(shape.blocks() * l, MappedEdge::null());
  std::vector<std::size_t> fill(shape.blocks(), 0);
  for (const auto& e : edges) {
    if (e.is_null || e.src >= shape.vertices || e.dst >= shape.vertices) {
      throw Error(ErrorCode::kInvalidArgument,
                  "edge endpoints must be mapped IDs below n");
    }
    const std::size_t row = e.src / shape.chunk_size;
    const std::size_t col = e.dst / shape.chunk_size;
    const std::size_t x = row * shape.chunk_count + col;
    if (fill[x] == l) {
      throw Error(ErrorCode::kBlockOverflow,
                  "block (" + std::to_string(row) + "," + std::to_string(col) +
                      ") exceeds declared length " + std::to_string(l));
    }
    storage[x * l + fill[x]++] = e;
  }
  return GridGraph{shape, false,
                   ExtArray<MappedEdge>::adopt(std::move(name), std::move(storage))};
}

std::uint32_t offset_field_width(std::size_t chunk_size) {
  return static_cast<std::uint32_t>(std::bit_width(chunk_size));
}

std::size_t encoded_block_bytes(std::size_t chunk_size, std::size_t block_length) {
  const std::size_t bits = 2 * offset_field_width(chunk_size) * block_length;
  return (bits + 7) / 8;
}

std::vector<std::uint8_t> encode_block(std::span<const MappedEdge> block,
                                       std::size_t chunk_size) {
  const std::uint32_t w = offset_field_width(chunk_size);
  std::vector<std::uint8_t> out;
  out.reserve(encoded_block_bytes(chunk_size, block.size()));
  std::uint64_t acc = 0;
  std::uint32_t bits = 0;
  auto put = [&](std::uint64_t field) {
    acc |= field << bits;
    bits += w;
    while (bits >= 8) {
      out.push_back(static_cast<std::uint8_t>(acc));
      acc >>= 8;
      bits -= 8;
    }
  };
  for (const auto& e : block) {
    if (e.is_null) {
      put(chunk_size);
      put(chunk_size);
    } else {
      put(e.src % chunk_size);
      put(e.dst % chunk_size);
    }
  }
  if (bits > 0) out.push_back(static_cast<std::uint8_t>(acc));
  return out;
}

std::vector<MappedEdge> decode_block(std::span<const std::uint8_t> bytes,
                                     std::size_t chunk_size,
                                     std::size_t block_length, std::size_t row,
                                     std::size_t col) {
  if (chunk_size == 0) throw Error(ErrorCode::kMalformedBlock, "chunk size 0");
  if (bytes.size() != encoded_block_bytes(chunk_size, block_length)) {
    throw Error(ErrorCode::kMalformedBlock,
                "expected " +
                    std::to_string(encoded_block_bytes(chunk_size, block_length)) +
                    " bytes, got " + std::to_string(bytes.size()));
  }
  const std::uint32_t w = offset_field_width(chunk_size);
  const std::uint64_t mask = (std::uint64_t{1} << w) - 1;
  std::size_t pos = 0;
  std::uint64_t acc = 0;
  std::uint32_t bits = 0;
  auto get = [&]() {
    while (bits < w) {
      acc |= std::uint64_t{bytes[pos++]} << bits;
      bits += 8;
    }
    const std::uint64_t v = acc & mask;
    acc >>= w;
    bits -= w;
    return v;
  };
  std::vector<MappedEdge> out;
  out.reserve(block_length);
  for (std::size_t i = 0; i < block_length; ++i) {
    const std::uint64_t s = get();
    const std::uint64_t d = get();
    if (s == chunk_size && d == chunk_size) {
      out.push_back(MappedEdge::null());
    } else if (s >= chunk_size || d >= chunk_size) {
      throw Error(ErrorCode::kMalformedBlock,
                  "offset out of range in edge " + std::to_string(i));
    } else {
      out.push_back(MappedEdge::make(
          static_cast<std::uint32_t>(row * chunk_size + s),
          static_cast<std::uint32_t>(col * chunk_size + d)));
    }
  }
  return out;
}

std::vector<std::uint8_t> encode_grid(const GridGraph& grid) {
  const auto& s = grid.shape;
  const std::size_t block_bytes = encoded_block_bytes(s.chunk_size, s.block_length);
  std::vector<std::uint8_t> out;
  out.reserve(kGridHeaderBytes + s.blocks() * block_bytes);
  for (char c : {'O', 'B', 'G', 'E'}) out.push_back(static_cast<std::uint8_t>(c));
  detail::put_u32(out, kGridFormatVersion);
  detail::put_u64(out, s.vertices);
  detail::put_u64(out, s.chunk_size);
  detail::put_u64(out, s.chunk_count);
  detail::put_u64(out, s.block_length);
  detail::put_u64(out, block_bytes);
  const auto all = grid.edges.peek();
  for (std::size_t x = 0; x < s.blocks(); ++x) {
    auto enc = encode_block(all.subspan(x * s.block_length, s.block_length),
                            s.chunk_size);
    out.insert(out.end(), enc.begin(), enc.end());
  }
  return out;
}

namespace {

GridShape read_header(detail::ByteReader& in) {
  const auto magic = in.bytes(4);
  if (std::memcmp(magic.data(), "OBGE", 4) != 0) {
    throw Error(ErrorCode::kMalformedBlock, "bad grid magic");
  }
  if (in.u32() != kGridFormatVersion) {
    throw Error(ErrorCode::kMalformedBlock, "unsupported grid version");
  }
  GridShape s;
  s.vertices = in.u64();
  s.chunk_size = in.u64();
  s.chunk_count = in.u64();
  s.block_length = in.u64();
  const std::uint64_t block_bytes = in.u64();
  if (s.vertices == 0 || s.chunk_size == 0 ||
      s.chunk_count != (s.vertices + s.chunk_size - 1) / s.chunk_size ||
      s.vertices > 0xffffffffULL) {
    throw Error(ErrorCode::kMalformedBlock, "inconsistent grid header");
  }
  if (block_bytes != encoded_block_bytes(s.chunk_size, s.block_length)) {
    throw Error(ErrorCode::kMalformedBlock, "block byte length mismatch");
  }
  if (in.remaining() != s.blocks() * block_bytes) {
    throw Error(ErrorCode::kMalformedBlock, "grid body length mismatch");
  }
  return s;
}

}  // namespace

GridShape peek_grid_shape(std::span<const std::uint8_t> bytes) {
  detail::ByteReader in(bytes, ErrorCode::kMalformedBlock);
  return read_header(in);
}

GridGraph decode_grid(std::span<const std::uint8_t> bytes, std::string name) {
  detail::ByteReader in(bytes, ErrorCode::kMalformedBlock);
  const GridShape s = read_header(in);
  const std::size_t block_bytes = encoded_block_bytes(s.chunk_size, s.block_length);
  GridGraph g{s, false, ExtArray<MappedEdge>(std::move(name), s.blocks() * s.block_length)};
  std::size_t pos = 0;
  for (std::size_t row = 0; row < s.chunk_count; ++row) {
    for (std::size_t col = 0; col < s.chunk_count; ++col) {
      const auto block =
          decode_block(in.bytes(block_bytes), s.chunk_size, s.block_length, row, col);
      for (const auto& e : block) {
        if (!e.is_null && (e.src >= s.vertices || e.dst >= s.vertices)) {
          throw Error(ErrorCode::kMalformedBlock, "vertex ID beyond n");
        }
        g.edges.write(pos++, e);
      }
    }
  }
  return g;
}

void write_grid_file(const std::filesystem::path& path, const GridGraph& grid) {
  const auto bytes = encode_grid(grid);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

GridGraph read_grid_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_grid(bytes);
}

}  // namespace obg
