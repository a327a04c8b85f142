#pragma once

#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

#include "obgraph/om.hpp"

namespace obg {

struct SortRecord {
  std::size_t length = 0;       // public input length
  std::size_t padded = 0;       // power-of-two network width
  std::size_t om_records = 0;   // records per in-OM block
  std::uint64_t compare_exchanges = 0;
};

// Instrumentation counters. Only public quantities are recorded.
class Stats {
 public:
  void record_sort(const SortRecord& r);
  std::vector<SortRecord> sorts() const;
  std::uint64_t compare_exchanges() const;
  void clear();

 private:
  mutable std::mutex mu_;
  std::vector<SortRecord> sorts_;
};

// Fixed set of threads executing one job per worker index, statically.
class WorkerPool {
 public:
  explicit WorkerPool(std::size_t workers);
  ~WorkerPool();
  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  std::size_t size() const { return threads_.size(); }
  void run(const std::function<void(std::size_t)>& job);

 private:
  void loop(std::size_t w);

  std::mutex mu_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  const std::function<void(std::size_t)>* job_ = nullptr;
  std::uint64_t generation_ = 0;
  std::size_t pending_ = 0;
  bool stop_ = false;
  std::exception_ptr error_;
  std::vector<std::thread> threads_;
};

// The simulated trusted processor: W workers, each with a private OM of the
// same public capacity.
class Runtime {
 public:
  explicit Runtime(std::size_t om_capacity, std::size_t workers = 1);

  std::size_t workers() const { return arenas_.size(); }
  std::size_t om_capacity() const { return om_capacity_; }
  OMArena& om(std::size_t w = 0) { return *arenas_.at(w); }
  Stats& stats() { return stats_; }

  // Runs fn(w) for each worker and waits; worker w records into worker w of
  // the caller's bound trace session.
  void parallel(const std::function<void(std::size_t)>& fn);

 private:
  std::size_t om_capacity_;
  std::vector<std::unique_ptr<OMArena>> arenas_;
  std::unique_ptr<WorkerPool> pool_;
  Stats stats_;
};

// Half-open range of `count` items owned by worker `w` of `workers` under a
// contiguous static split.
struct StaticRange {
  std::size_t begin;
  std::size_t end;
};
inline StaticRange static_range(std::size_t count, std::size_t w,
                                std::size_t workers) {
  const std::size_t base = count / workers;
  const std::size_t extra = count % workers;
  const std::size_t begin = w * base + (w < extra ? w : extra);
  return {begin, begin + base + (w < extra ? 1 : 0)};
}

}  // namespace obg
