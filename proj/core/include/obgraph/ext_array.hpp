#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "obgraph/error.hpp"
#include "obgraph/trace.hpp"

namespace obg {

// A named buffer in untrusted (observable) memory. Every read and write goes
// through the calling thread's bound WorkerTrace, if any.
template <class T>
class ExtArray {
  static_assert(std::is_trivially_copyable_v<T>,
                "external records must be fixed-width");

 public:
  ExtArray() : ExtArray("anon", 0) {}
  ExtArray(std::string name, std::size_t size, const T& fill = T{})
      : name_(std::move(name)), region_(intern_region(name_)), data_(size, fill) {}

  // Setup path for fixtures and harness code; performs no traced writes.
  static ExtArray adopt(std::string name, std::vector<T> values) {
    ExtArray a(std::move(name), 0);
    a.data_ = std::move(values);
    return a;
  }

  ExtArray(ExtArray&&) noexcept = default;
  ExtArray& operator=(ExtArray&&) noexcept = default;
  ExtArray(const ExtArray&) = delete;
  ExtArray& operator=(const ExtArray&) = delete;

  T read(std::size_t i) const {
    check(i);
    record_access(region_, i * sizeof(T), sizeof(T), AccessKind::kRead);
    return data_[i];
  }

  void write(std::size_t i, const T& value) {
    check(i);
    record_access(region_, i * sizeof(T), sizeof(T), AccessKind::kWrite);
    data_[i] = value;
  }

  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }
  const std::string& name() const { return name_; }
  RegionId region() const { return region_; }

  // Untraced inspection for tests and for the harness that owns the data.
  std::span<const T> peek() const { return data_; }
  std::vector<T> release() && { return std::move(data_); }

 private:
  void check(std::size_t i) const {
    if (i >= data_.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "offset " + std::to_string(i) + " outside region " + name_);
    }
  }

  std::string name_;
  RegionId region_;
  std::vector<T> data_;
};

// Read-only window [offset, offset + size) of an ExtArray.
template <class T>
class ExtView {
 public:
  ExtView(const ExtArray<T>& array)  // NOLINT(google-explicit-constructor)
      : array_(&array), offset_(0), size_(array.size()) {}
  ExtView(const ExtArray<T>& array, std::size_t offset, std::size_t size)
      : array_(&array), offset_(offset), size_(size) {
    if (offset + size > array.size()) {
      throw Error(ErrorCode::kInvalidArgument, "view exceeds " + array.name());
    }
  }

  T read(std::size_t i) const { return array_->read(offset_ + i); }
  std::size_t size() const { return size_; }

 private:
  const ExtArray<T>* array_;
  std::size_t offset_;
  std::size_t size_;
};

// Writable window of an ExtArray.
template <class T>
class ExtSlice {
 public:
  ExtSlice(ExtArray<T>& array)  // NOLINT(google-explicit-constructor)
      : array_(&array), offset_(0), size_(array.size()) {}
  ExtSlice(ExtArray<T>& array, std::size_t offset, std::size_t size)
      : array_(&array), offset_(offset), size_(size) {
    if (offset + size > array.size()) {
      throw Error(ErrorCode::kInvalidArgument, "slice exceeds " + array.name());
    }
  }

  T read(std::size_t i) const { return array_->read(offset_ + i); }
  void write(std::size_t i, const T& v) { array_->write(offset_ + i, v); }
  std::size_t size() const { return size_; }

 private:
  ExtArray<T>* array_;
  std::size_t offset_;
  std::size_t size_;
};

}  // namespace obg
