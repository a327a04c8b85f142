#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace obg {

enum class AccessKind : std::uint8_t { kRead = 0, kWrite = 1 };

using RegionId = std::uint64_t;

// Registers a named non-OM buffer. The id is a stable hash of the name, so
// equal names produce equal ids in every run and on every thread.
RegionId intern_region(std::string_view name);
std::string region_name(RegionId id);

struct Digest {
  std::uint64_t hi = 0;
  std::uint64_t lo = 0;

  std::string hex() const;

  friend bool operator==(const Digest&, const Digest&) = default;
  friend auto operator<=>(const Digest&, const Digest&) = default;
};

struct AccessEvent {
  std::uint32_t worker = 0;
  RegionId region = 0;
  // Element index (element granularity) or line index (byte granularity).
  std::uint64_t offset = 0;
  AccessKind kind = AccessKind::kRead;

  friend bool operator==(const AccessEvent&, const AccessEvent&) = default;
};

struct TraceConfig {
  // Observation granularity in bytes (cache lines by default); 0 selects
  // element granularity, where every element is its own observable unit.
  std::uint32_t granularity = 64;
  // When false only the running digest is maintained.
  bool keep_events = true;
};

// Append-only record of one worker's accesses outside the oblivious memory.
class WorkerTrace {
 public:
  WorkerTrace(std::uint32_t worker, TraceConfig config);

  void record(RegionId region, std::uint64_t byte_offset,
              std::uint32_t element_width, AccessKind kind);

  // Digest of the full event sequence so far (order dependent).
  Digest digest() const;
  std::uint64_t size() const { return count_; }
  const std::vector<AccessEvent>& events() const { return events_; }
  std::uint32_t worker() const { return worker_; }
  const TraceConfig& config() const { return config_; }

  void clear();

 private:
  void absorb(const AccessEvent& event);

  std::uint32_t worker_;
  TraceConfig config_;
  std::vector<AccessEvent> events_;
  std::uint64_t h1_;
  std::uint64_t h2_;
  std::uint64_t count_ = 0;
};

// One trace per worker plus the combined digest. Per-worker sequences are
// digested independently and combined in worker-index order, so the combined
// digest does not depend on how workers interleave in time.
class TraceSession {
 public:
  explicit TraceSession(std::size_t workers, TraceConfig config = {});

  std::size_t workers() const { return traces_.size(); }
  WorkerTrace& worker(std::size_t w) { return traces_.at(w); }
  const WorkerTrace& worker(std::size_t w) const { return traces_.at(w); }
  const TraceConfig& config() const { return config_; }

  std::vector<Digest> worker_digests() const;
  Digest digest() const;
  std::uint64_t total_events() const;
  void clear();

  // One event per line: `worker,region,offset,kind`.
  void dump(std::ostream& out) const;

 private:
  TraceConfig config_;
  std::vector<WorkerTrace> traces_;
};

Digest combine_digests(const std::vector<Digest>& per_worker);

struct Divergence {
  std::size_t worker = 0;
  std::uint64_t index = 0;  // first differing event index in that worker
};

// Locates the first differing event between two sessions. Requires both
// sessions to have kept events when their digests differ.
std::optional<Divergence> first_divergence(const TraceSession& a,
                                           const TraceSession& b);

// Binds the calling thread to worker `w` of `session` for the scope's
// lifetime. A null session unbinds (accesses become untraced).
class TraceBinding {
 public:
  TraceBinding(TraceSession* session, std::size_t w);
  ~TraceBinding();
  TraceBinding(const TraceBinding&) = delete;
  TraceBinding& operator=(const TraceBinding&) = delete;

 private:
  TraceSession* prev_session_;
  WorkerTrace* prev_trace_;
};

namespace detail {
extern thread_local TraceSession* tls_session;
extern thread_local WorkerTrace* tls_trace;
}  // namespace detail

inline TraceSession* current_session() { return detail::tls_session; }
inline WorkerTrace* current_trace() { return detail::tls_trace; }

inline void record_access(RegionId region, std::uint64_t byte_offset,
                          std::uint32_t element_width, AccessKind kind) {
  if (WorkerTrace* t = detail::tls_trace) {
    t->record(region, byte_offset, element_width, kind);
  }
}

}  // namespace obg
