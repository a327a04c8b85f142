#include "obgraph/om.hpp"

#include <algorithm>
#include <atomic>
#include <string>

#include "obgraph/error.hpp"

namespace obg {

namespace {
std::atomic<std::uint64_t> g_violations{0};
}

OmBlock::OmBlock(OmBlock&& other) noexcept
    : arena_(other.arena_), offset_(other.offset_), length_(other.length_) {
  other.arena_ = nullptr;
}

OmBlock& OmBlock::operator=(OmBlock&& other) noexcept {
  if (this != &other) {
    if (arena_ != nullptr) arena_->release(offset_, length_);
    arena_ = other.arena_;
    offset_ = other.offset_;
    length_ = other.length_;
    other.arena_ = nullptr;
  }
  return *this;
}

OmBlock::~OmBlock() {
  if (arena_ != nullptr) arena_->release(offset_, length_);
}

OmBlock OMArena::allocate(std::size_t length) {
  if (length == 0) {
    throw Error(ErrorCode::kInvalidArgument, "zero-length OM allocation");
  }
  auto refuse = [&] {
    g_violations.fetch_add(1, std::memory_order_relaxed);
    throw Error(ErrorCode::kCapacityExceeded,
                "requested " + std::to_string(length) + " bytes with " +
                    std::to_string(used_) + "/" + std::to_string(capacity_) +
                    " in use");
  };
  if (length > capacity_ - used_) refuse();

  // First fit over the gaps between live allocations.
  std::size_t cursor = 0;
  for (const auto& [off, len] : allocations_) {
    if (off - cursor >= length) break;
    cursor = off + len;
  }
  if (capacity_ - cursor < length) refuse();

  allocations_.emplace(cursor, length);
  used_ += length;
  peak_ = std::max(peak_, used_);
  return OmBlock(this, cursor, length);
}

void OMArena::release(std::size_t offset, std::size_t length) {
  allocations_.erase(offset);
  used_ -= length;
}

std::uint64_t OMArena::violations() {
  return g_violations.load(std::memory_order_relaxed);
}

}  // namespace obg
