#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <random>

#include "obgraph/error.hpp"
#include "obgraph/grid.hpp"
#include "test_support.hpp"

namespace obg {
namespace {

using test::values;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kInvalidArgument;
}

TEST(ChunkSize, Examples) {
  EXPECT_EQ(choose_chunk_size(1 << 20, 8, 4096), 65280u);
  EXPECT_EQ(choose_chunk_size(2 * 8 + 4096, 8, 4096), 1u);
  EXPECT_EQ(code_of([] { choose_chunk_size(4096, 8, 4096); }), ErrorCode::kOMTooSmall);
}

TEST(ChunkSize, ShapeCapsAtVertexCount) {
  const GridShape s = make_shape(10, 1 << 20, 8);
  EXPECT_EQ(s.chunk_size, 10u);
  EXPECT_EQ(s.chunk_count, 1u);
  const GridShape t = make_shape(100000, 1 << 20, 8);
  EXPECT_EQ(t.chunk_size, 65280u);
  EXPECT_EQ(t.chunk_count, 2u);
  EXPECT_EQ(t.chunk_length(1), 100000u - 65280u);
}

TEST(PublicParams, Validation) {
  PublicParams p;
  p.parties = 2;
  p.party_vertices = {3, 4};
  p.total_vertices = 7;
  p.vertices = 5;
  p.om_bytes = 1 << 16;
  p.chunk_size = 2;
  p.chunk_count = 3;
  p.party_block_lengths = {1, 2};
  p.block_length = 3;
  p.vertex_width = 8;
  EXPECT_NO_THROW(p.validate());
  auto bad = p;
  bad.chunk_count = 2;
  EXPECT_EQ(code_of([&] { bad.validate(); }), ErrorCode::kParamMismatch);
  bad = p;
  bad.block_length = 4;
  EXPECT_THROW(bad.validate(), Error);
  bad = p;
  bad.total_vertices = 8;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(BuildGrid, MicroCase) {
  const GridGraph g = test::micro_grid();
  ASSERT_EQ(g.shape.chunk_count, 2u);
  ASSERT_EQ(g.shape.block_length, 2u);
  const auto e = values(g.edges);
  const auto block = [&](std::size_t r, std::size_t c) {
    const auto off = g.shape.block_offset(r, c);
    return std::vector<MappedEdge>(e.begin() + off, e.begin() + off + 2);
  };
  const auto pad = MappedEdge::null();
  EXPECT_EQ(block(0, 1), (std::vector<MappedEdge>{MappedEdge::make(0, 3), pad}));
  EXPECT_EQ(block(0, 0), (std::vector<MappedEdge>{MappedEdge::make(1, 0), pad}));
  EXPECT_EQ(block(1, 1), (std::vector<MappedEdge>{MappedEdge::make(3, 3), pad}));
  EXPECT_EQ(block(1, 0), (std::vector<MappedEdge>{pad, pad}));
  EXPECT_EQ(g.non_null_count(), 3u);
}

TEST(BuildGrid, EmptyAndOverflow) {
  GridShape s{4, 2, 2, 3};
  const GridGraph g = build_grid({}, s);
  EXPECT_EQ(g.edges.size(), 12u);
  EXPECT_EQ(g.non_null_count(), 0u);
  s.block_length = 0;
  const MappedEdge one[] = {MappedEdge::make(0, 0)};
  EXPECT_EQ(code_of([&] { build_grid(one, s); }), ErrorCode::kBlockOverflow);
}

TEST(BuildGrid, PlacementAndConservation) {
  std::mt19937_64 rng(8);
  for (int round = 0; round < 30; ++round) {
    const std::size_t n = 1 + rng() % 200;
    const std::size_t k = 1 + rng() % n;
    std::vector<MappedEdge> edges(rng() % 500);
    for (auto& e : edges) {
      e = MappedEdge::make(static_cast<std::uint32_t>(rng() % n),
                           static_cast<std::uint32_t>(rng() % n));
    }
    GridShape s{n, k, (n + k - 1) / k, 0};
    s.block_length = max_block_occupancy(edges, s) + rng() % 3;
    const GridGraph g = build_grid(edges, s);
    ASSERT_EQ(g.edges.size(), s.blocks() * s.block_length);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> got, want;
    for (std::size_t r = 0; r < s.chunk_count; ++r) {
      for (std::size_t c = 0; c < s.chunk_count; ++c) {
        for (std::size_t i = 0; i < s.block_length; ++i) {
          const auto e = g.edges.peek()[s.block_offset(r, c) + i];
          if (e.is_null) continue;
          ASSERT_EQ(e.src / k, r);
          ASSERT_EQ(e.dst / k, c);
          got.emplace_back(e.src, e.dst);
        }
      }
    }
    for (const auto& e : edges) want.emplace_back(e.src, e.dst);
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    ASSERT_EQ(got, want);
  }
}

TEST(BlockCodec, WorkedExample) {
  EXPECT_EQ(offset_field_width(2), 2u);
  const MappedEdge block[] = {MappedEdge::make(1, 0), MappedEdge::null()};
  const auto bytes = encode_block(block, 2);
  ASSERT_EQ(bytes.size(), 1u);
  EXPECT_EQ(bytes[0], 0xA1);
  const auto back = decode_block(bytes, 2, 2, 0, 0);
  EXPECT_EQ(back, (std::vector<MappedEdge>(std::begin(block), std::end(block))));
}

TEST(BlockCodec, RebasesOffsets) {
  const MappedEdge block[] = {MappedEdge::make(3, 4)};
  const auto bytes = encode_block(block, 2);  // offsets (1, 0) in block (1, 2)
  EXPECT_EQ(bytes[0], 0x01);
  EXPECT_EQ(decode_block(bytes, 2, 1, 1, 2)[0], MappedEdge::make(3, 4));
}

TEST(BlockCodec, EmptyAndAllNull) {
  EXPECT_TRUE(encode_block({}, 5).empty());
  EXPECT_TRUE(decode_block({}, 5, 0, 0, 0).empty());
  const std::vector<MappedEdge> nulls(7, MappedEdge::null());
  const auto bytes = encode_block(nulls, 5);
  EXPECT_EQ(bytes.size(), encoded_block_bytes(5, 7));
  EXPECT_EQ(decode_block(bytes, 5, 7, 3, 3), nulls);
}

TEST(BlockCodec, FieldWidth) {
  EXPECT_EQ(offset_field_width(1), 1u);
  EXPECT_EQ(offset_field_width(3), 2u);
  EXPECT_EQ(offset_field_width(4), 3u);
  EXPECT_EQ(offset_field_width(65280), 16u);
  EXPECT_EQ(offset_field_width(65535), 16u);
  EXPECT_EQ(offset_field_width(65536), 17u);
  EXPECT_EQ(encoded_block_bytes(2, 2), 1u);
  EXPECT_EQ(encoded_block_bytes(2, 3), 2u);
}

TEST(BlockCodec, MalformedInputs) {
  const MappedEdge block[] = {MappedEdge::make(1, 0), MappedEdge::null()};
  auto bytes = encode_block(block, 2);
  EXPECT_EQ(code_of([&] { decode_block({}, 2, 2, 0, 0); }), ErrorCode::kMalformedBlock);
  bytes.push_back(0);
  EXPECT_EQ(code_of([&] { decode_block(bytes, 2, 2, 0, 0); }), ErrorCode::kMalformedBlock);
  // k=2, w=2: offset 3 lies in (k, 2^w).
  const std::uint8_t out_of_range[] = {0x03};
  EXPECT_EQ(code_of([&] { decode_block(out_of_range, 2, 1, 0, 0); }),
            ErrorCode::kMalformedBlock);
  // Half-null: src offset k, dst offset 0.
  const std::uint8_t half[] = {0x02};
  EXPECT_EQ(code_of([&] { decode_block(half, 2, 1, 0, 0); }), ErrorCode::kMalformedBlock);
}

// Any (k, l) and random contents: decode(encode(B)) == B and the encoded
// size depends only on (k, l).
TEST(BlockCodec, RandomRoundTrip) {
  std::mt19937_64 rng(21);
  for (int round = 0; round < 10000; ++round) {
    const std::size_t k = 1 + rng() % (round % 10 == 0 ? 100000 : 40);
    const std::size_t l = rng() % 24;
    const std::size_t r = rng() % 4, c = rng() % 4;
    std::vector<MappedEdge> block(l);
    for (auto& e : block) {
      if (rng() % 4 == 0) {
        e = MappedEdge::null();
      } else {
        e = MappedEdge::make(static_cast<std::uint32_t>(r * k + rng() % k),
                             static_cast<std::uint32_t>(c * k + rng() % k));
      }
    }
    const auto bytes = encode_block(block, k);
    ASSERT_EQ(bytes.size(), (2 * offset_field_width(k) * l + 7) / 8);
    ASSERT_EQ(decode_block(bytes, k, l, r, c), block);
  }
}

TEST(GridContainer, RoundTripAndHeader) {
  std::mt19937_64 rng(2);
  std::vector<PlainEdge> edges;
  for (int i = 0; i < 300; ++i) edges.emplace_back(rng() % 50, rng() % 50);
  const GridGraph g = test::grid_of(edges, 50, 7);
  const auto bytes = encode_grid(g);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "OBGE");
  EXPECT_EQ(bytes.size(), kGridHeaderBytes + g.shape.blocks() *
                                                 encoded_block_bytes(7, g.shape.block_length));
  EXPECT_EQ(peek_grid_shape(bytes), g.shape);
  const GridGraph back = decode_grid(bytes);
  EXPECT_EQ(back.shape, g.shape);
  EXPECT_EQ(values(back.edges), values(g.edges));

  const auto path = std::filesystem::temp_directory_path() / "obgraph_grid_test.bin";
  write_grid_file(path, g);
  EXPECT_EQ(values(read_grid_file(path).edges), values(g.edges));
  std::filesystem::remove(path);
}

TEST(GridContainer, RejectsCorruption) {
  const GridGraph g = test::micro_grid();
  auto bytes = encode_grid(g);
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_EQ(code_of([&] { decode_grid(bad_magic); }), ErrorCode::kMalformedBlock);
  auto truncated = bytes;
  truncated.pop_back();
  EXPECT_EQ(code_of([&] { decode_grid(truncated); }), ErrorCode::kMalformedBlock);
  // n=3 with k=2: vertex 3 in the last chunk is out of range.
  GridShape s{3, 2, 2, 1};
  std::vector<MappedEdge> raw(4, MappedEdge::null());
  raw[3] = MappedEdge::make(3, 3);
  const GridGraph beyond{s, false, ExtArray<MappedEdge>::adopt("x", raw)};
  EXPECT_EQ(code_of([&] { decode_grid(encode_grid(beyond)); }), ErrorCode::kMalformedBlock);
}

TEST(GridContainer, DecodeIsOneSequentialWritePass) {
  const GridGraph g = test::micro_grid();
  const auto bytes = encode_grid(g);
  auto s = test::traced([&] { decode_grid(bytes, "recv"); });
  const auto& ev = s->worker(0).events();
  ASSERT_EQ(ev.size(), g.edges.size());
  for (std::size_t i = 0; i < ev.size(); ++i) {
    EXPECT_EQ(ev[i].offset, i);
    EXPECT_EQ(ev[i].kind, AccessKind::kWrite);
  }
}

}  // namespace
}  // namespace obg
