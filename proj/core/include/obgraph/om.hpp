#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <type_traits>
#include <vector>

namespace obg {

class OMArena;

// Ownership of one allocation inside an OMArena; released on destruction.
class OmBlock {
 public:
  OmBlock() = default;
  OmBlock(OmBlock&& other) noexcept;
  OmBlock& operator=(OmBlock&& other) noexcept;
  OmBlock(const OmBlock&) = delete;
  OmBlock& operator=(const OmBlock&) = delete;
  ~OmBlock();

  std::size_t offset() const { return offset_; }
  std::size_t length() const { return length_; }
  explicit operator bool() const { return arena_ != nullptr; }

 private:
  friend class OMArena;
  OmBlock(OMArena* arena, std::size_t offset, std::size_t length)
      : arena_(arena), offset_(offset), length_(length) {}

  OMArena* arena_ = nullptr;
  std::size_t offset_ = 0;
  std::size_t length_ = 0;
};

// A bounded oblivious memory of `capacity` bytes. Reads and writes to buffers
// allocated here are never traced. One arena per worker; not thread-safe.
class OMArena {
 public:
  explicit OMArena(std::size_t capacity) : capacity_(capacity) {}
  OMArena(const OMArena&) = delete;
  OMArena& operator=(const OMArena&) = delete;

  // Throws Error(kCapacityExceeded) when `length` does not fit.
  OmBlock allocate(std::size_t length);

  std::size_t capacity() const { return capacity_; }
  std::size_t used() const { return used_; }
  std::size_t available() const { return capacity_ - used_; }
  std::size_t peak() const { return peak_; }
  std::size_t allocation_count() const { return allocations_.size(); }
  void reset_peak() { peak_ = used_; }

  // Process-wide number of allocations ever refused.
  static std::uint64_t violations();

 private:
  friend class OmBlock;
  void release(std::size_t offset, std::size_t length);

  std::size_t capacity_;
  std::size_t used_ = 0;
  std::size_t peak_ = 0;
  std::map<std::size_t, std::size_t> allocations_;  // offset -> length
};

template <class T>
class OmBuffer {
  static_assert(std::is_trivially_copyable_v<T>);

 public:
  OmBuffer(OMArena& arena, std::size_t count)
      : block_(count > 0 ? arena.allocate(count * sizeof(T)) : OmBlock{}),
        data_(count) {}

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }
  std::size_t size() const { return data_.size(); }
  std::span<T> span() { return data_; }
  std::span<const T> span() const { return data_; }

 private:
  OmBlock block_;
  std::vector<T> data_;
};

}  // namespace obg
