#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "obgraph/trace.hpp"

namespace obg::tools {

// Secret inputs are redrawn per trial; everything listed here is public and
// held fixed.
struct TraceCheckOptions {
  std::string stage = "pr";
  std::size_t trials = 20;
  std::uint64_t seed = 1;
  std::size_t vertices = 4096;
  std::size_t block_length = 512;
  std::size_t om_bytes = 64 * 1024;
  std::size_t workers = 1;
  std::size_t iterations = 3;
  std::size_t parties = 3;
  std::uint32_t granularity = 0;  // bytes; 0 = element
};

struct TraceCheckReport {
  std::string stage;
  std::size_t trials = 0;
  bool passed = false;
  std::vector<std::vector<Digest>> worker_digests;  // per trial
  std::uint64_t events = 0;                         // trial 0, all workers
  // Set on failure: first trial that differs from trial 0 and where.
  std::optional<std::size_t> failing_trial;
  std::optional<Divergence> divergence;
};

std::vector<std::string> trace_check_stages();

// Throws kInvalidArgument for trials < 2 or an unknown stage.
TraceCheckReport trace_check(const TraceCheckOptions& options);

}  // namespace obg::tools
