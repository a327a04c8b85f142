#include "obgraph/runtime.hpp"

#include "obgraph/error.hpp"
#include "obgraph/trace.hpp"

namespace obg {

void Stats::record_sort(const SortRecord& r) {
  std::lock_guard lock(mu_);
  sorts_.push_back(r);
}

std::vector<SortRecord> Stats::sorts() const {
  std::lock_guard lock(mu_);
  return sorts_;
}

std::uint64_t Stats::compare_exchanges() const {
  std::lock_guard lock(mu_);
  std::uint64_t total = 0;
  for (const auto& s : sorts_) total += s.compare_exchanges;
  return total;
}

void Stats::clear() {
  std::lock_guard lock(mu_);
  sorts_.clear();
}

WorkerPool::WorkerPool(std::size_t workers) {
  threads_.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads_.emplace_back([this, w] { loop(w); });
  }
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard lock(mu_);
    stop_ = true;
  }
  start_cv_.notify_all();
  for (auto& t : threads_) t.join();
}

void WorkerPool::run(const std::function<void(std::size_t)>& job) {
  std::unique_lock lock(mu_);
  job_ = &job;
  pending_ = threads_.size();
  error_ = nullptr;
  ++generation_;
  start_cv_.notify_all();
  done_cv_.wait(lock, [this] { return pending_ == 0; });
  job_ = nullptr;
  if (error_) std::rethrow_exception(std::exchange(error_, nullptr));
}

void WorkerPool::loop(std::size_t w) {
  std::uint64_t seen = 0;
  std::unique_lock lock(mu_);
  for (;;) {
    start_cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
    if (stop_) return;
    seen = generation_;
    const auto* job = job_;
    lock.unlock();
    std::exception_ptr err;
    try {
      (*job)(w);
    } catch (...) {
      err = std::current_exception();
    }
    lock.lock();
    if (err && !error_) error_ = err;
    if (--pending_ == 0) done_cv_.notify_one();
  }
}

Runtime::Runtime(std::size_t om_capacity, std::size_t workers)
    : om_capacity_(om_capacity) {
  if (workers == 0) {
    throw Error(ErrorCode::kInvalidArgument, "worker count must be positive");
  }
  for (std::size_t w = 0; w < workers; ++w) {
    arenas_.push_back(std::make_unique<OMArena>(om_capacity));
  }
  if (workers > 1) pool_ = std::make_unique<WorkerPool>(workers);
}

void Runtime::parallel(const std::function<void(std::size_t)>& fn) {
  if (!pool_) {
    fn(0);
    return;
  }
  TraceSession* session = current_session();
  pool_->run([&](std::size_t w) {
    TraceBinding bind(session, w);
    fn(w);
  });
}

}  // namespace obg
