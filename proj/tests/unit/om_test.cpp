#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "obgraph/error.hpp"
#include "obgraph/grid.hpp"
#include "obgraph/om.hpp"
#include "test_support.hpp"

namespace obg {
namespace {

TEST(OMArena, ExactFit) {
  OMArena om(1024);
  auto a = om.allocate(512);
  auto b = om.allocate(512);
  EXPECT_EQ(om.used(), 1024u);
  EXPECT_EQ(om.available(), 0u);
  EXPECT_EQ(om.allocation_count(), 2u);
}

TEST(OMArena, OversizeIsRefused) {
  OMArena om(1024);
  test::expect_refusal([&] { om.allocate(1025); });
  try {
    om.allocate(1025);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCapacityExceeded);
  }
  test::expected_refusals() += 1;
  EXPECT_EQ(om.used(), 0u);
}

TEST(OMArena, ZeroLengthIsInvalid) {
  OMArena om(16);
  try {
    om.allocate(0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

TEST(OMArena, ScanBudgetFits) {
  const std::size_t vwidth = 16;
  const std::size_t s = 1 << 16;
  const std::size_t k = choose_chunk_size(s, vwidth);
  OMArena om(2 * k * vwidth + kScanReserve);
  auto reserve = om.allocate(kScanReserve);
  OmBuffer<std::array<std::uint8_t, 16>> c1(om, k);
  OmBuffer<std::array<std::uint8_t, 16>> c2(om, k);
  EXPECT_EQ(om.used(), om.capacity());
}

TEST(OMArena, ReleaseOnDestruction) {
  OMArena om(100);
  {
    auto a = om.allocate(60);
    EXPECT_EQ(om.used(), 60u);
  }
  EXPECT_EQ(om.used(), 0u);
  EXPECT_EQ(om.peak(), 60u);
  auto b = om.allocate(100);
  EXPECT_EQ(b.offset(), 0u);
}

TEST(OMArena, MovedBlockReleasesOnce) {
  OMArena om(100);
  OmBlock outer;
  {
    auto a = om.allocate(40);
    outer = std::move(a);
  }
  EXPECT_EQ(om.used(), 40u);
  outer = OmBlock{};
  EXPECT_EQ(om.used(), 0u);
}

TEST(OMArena, EmptyBufferAllocatesNothing) {
  OMArena om(8);
  OmBuffer<std::uint64_t> empty(om, 0);
  EXPECT_EQ(om.used(), 0u);
  EXPECT_EQ(empty.size(), 0u);
}

// Random allocate/free sequences against an interval-set oracle: used never
// exceeds capacity and live blocks are disjoint ranges inside the arena.
TEST(OMArena, RandomSequencesKeepDisjointRanges) {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 50; ++round) {
    const std::size_t cap = 256 + rng() % 4096;
    OMArena om(cap);
    std::vector<OmBlock> live;
    for (int step = 0; step < 200; ++step) {
      if (!live.empty() && rng() % 3 == 0) {
        live.erase(live.begin() + static_cast<long>(rng() % live.size()));
      } else {
        const std::size_t len = 1 + rng() % (cap / 4);
        std::size_t sum = 0;
        for (const auto& b : live) sum += b.length();
        if (sum + len > cap) continue;  // might still fit after fragmentation; skip
        try {
          live.push_back(om.allocate(len));
        } catch (const Error&) {
          test::expected_refusals() += 1;  // fragmentation, not overuse
        }
      }
      std::vector<std::pair<std::size_t, std::size_t>> ranges;
      std::size_t sum = 0;
      for (const auto& b : live) {
        ranges.emplace_back(b.offset(), b.offset() + b.length());
        sum += b.length();
      }
      std::sort(ranges.begin(), ranges.end());
      for (std::size_t i = 0; i < ranges.size(); ++i) {
        ASSERT_LE(ranges[i].second, cap);
        if (i > 0) {
          ASSERT_LE(ranges[i - 1].second, ranges[i].first);
        }
      }
      ASSERT_EQ(om.used(), sum);
      ASSERT_LE(om.used(), cap);
    }
  }
}

}  // namespace
}  // namespace obg
