#include "obgraph/trace.hpp"

#include <cstdio>
#include <mutex>
#include <ostream>
#include <unordered_map>

namespace obg {

namespace detail {
thread_local TraceSession* tls_session = nullptr;
thread_local WorkerTrace* tls_trace = nullptr;
}  // namespace detail

namespace {

constexpr std::uint64_t kMulA = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kMulB = 0xc2b2ae3d27d4eb4fULL;

// murmur3 finalizer; a bijection on 64-bit words.
inline std::uint64_t fmix64(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

struct Registry {
  std::mutex mu;
  std::unordered_map<RegionId, std::string> names;
};

Registry& registry() {
  static Registry r;
  return r;
}

}  // namespace

RegionId intern_region(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : name) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  auto& r = registry();
  std::lock_guard lock(r.mu);
  r.names.try_emplace(h, name);
  return h;
}

std::string region_name(RegionId id) {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  auto it = r.names.find(id);
  if (it == r.names.end()) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "#%016llx",
                  static_cast<unsigned long long>(id));
    return buf;
  }
  return it->second;
}

std::string Digest::hex() const {
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx",
                static_cast<unsigned long long>(hi),
                static_cast<unsigned long long>(lo));
  return buf;
}

WorkerTrace::WorkerTrace(std::uint32_t worker, TraceConfig config)
    : worker_(worker), config_(config), h1_(kMulA), h2_(kMulB) {}

void WorkerTrace::record(RegionId region, std::uint64_t byte_offset,
                         std::uint32_t element_width, AccessKind kind) {
  const std::uint64_t unit =
      config_.granularity == 0 ? element_width : config_.granularity;
  AccessEvent e{worker_, region, byte_offset / unit, kind};
  absorb(e);
  if (config_.keep_events) events_.push_back(e);
}

void WorkerTrace::absorb(const AccessEvent& e) {
  const std::uint64_t a = fmix64(e.region ^ kMulA);
  const std::uint64_t b =
      fmix64((e.offset << 1 | static_cast<std::uint64_t>(e.kind)) + kMulB);
  h1_ = fmix64((h1_ ^ a) * kMulA + b);
  h2_ = fmix64((h2_ + b) * kMulB ^ a);
  ++count_;
}

Digest WorkerTrace::digest() const {
  return {fmix64(h1_ ^ count_), fmix64(h2_ + count_ * kMulA)};
}

void WorkerTrace::clear() {
  events_.clear();
  h1_ = kMulA;
  h2_ = kMulB;
  count_ = 0;
}

TraceSession::TraceSession(std::size_t workers, TraceConfig config)
    : config_(config) {
  traces_.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    traces_.emplace_back(static_cast<std::uint32_t>(w), config);
  }
}

std::vector<Digest> TraceSession::worker_digests() const {
  std::vector<Digest> out;
  out.reserve(traces_.size());
  for (const auto& t : traces_) out.push_back(t.digest());
  return out;
}

Digest TraceSession::digest() const { return combine_digests(worker_digests()); }

std::uint64_t TraceSession::total_events() const {
  std::uint64_t n = 0;
  for (const auto& t : traces_) n += t.size();
  return n;
}

void TraceSession::clear() {
  for (auto& t : traces_) t.clear();
}

void TraceSession::dump(std::ostream& out) const {
  for (const auto& t : traces_) {
    for (const auto& e : t.events()) {
      out << e.worker << ',' << region_name(e.region) << ',' << e.offset << ','
          << (e.kind == AccessKind::kRead ? "read" : "write") << '\n';
    }
  }
}

Digest combine_digests(const std::vector<Digest>& per_worker) {
  std::uint64_t h1 = kMulB;
  std::uint64_t h2 = kMulA;
  for (std::size_t w = 0; w < per_worker.size(); ++w) {
    h1 = fmix64((h1 ^ fmix64(w + kMulA)) * kMulA + per_worker[w].hi);
    h2 = fmix64((h2 + per_worker[w].lo) * kMulB ^ fmix64(w + kMulB));
  }
  return {fmix64(h1 ^ per_worker.size()), fmix64(h2)};
}

std::optional<Divergence> first_divergence(const TraceSession& a,
                                           const TraceSession& b) {
  const std::size_t workers = std::max(a.workers(), b.workers());
  for (std::size_t w = 0; w < workers; ++w) {
    if (w >= a.workers() || w >= b.workers()) return Divergence{w, 0};
    const auto& ta = a.worker(w);
    const auto& tb = b.worker(w);
    if (ta.digest() == tb.digest()) continue;
    const auto& ea = ta.events();
    const auto& eb = tb.events();
    const std::size_t common = std::min(ea.size(), eb.size());
    for (std::size_t i = 0; i < common; ++i) {
      if (!(ea[i] == eb[i])) return Divergence{w, i};
    }
    return Divergence{w, common};
  }
  return std::nullopt;
}

TraceBinding::TraceBinding(TraceSession* session, std::size_t w)
    : prev_session_(detail::tls_session), prev_trace_(detail::tls_trace) {
  detail::tls_session = session;
  detail::tls_trace = session != nullptr ? &session->worker(w) : nullptr;
}

TraceBinding::~TraceBinding() {
  detail::tls_session = prev_session_;
  detail::tls_trace = prev_trace_;
}

}  // namespace obg
