#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "obgraph/graph_io.hpp"
#include "obgraph/pipeline.hpp"

namespace obg::tools {

struct BenchConfig {
  std::size_t om_bytes = 1310720;
  std::size_t workers = 1;
  std::size_t iterations = 4;
  std::uint64_t seed = 1;
};

// Median wall time of PageRank iterations after the first, which also pays
// for setup (degrees, element layout). Runs the full pipeline untraced with
// one party.
double pr_seconds_per_iteration(const std::vector<PartyInput>& parties, Engine engine,
                                const BenchConfig& config);

struct BenchRow {
  std::size_t vertices = 0;
  std::size_t edges = 0;
  std::size_t om_bytes = 0;
  double om_factor = 1.0;
  double grid = 0;      // seconds per iteration
  double sortscan = 0;  // seconds per iteration
  double speedup() const { return grid > 0 ? sortscan / grid : 0; }
};

// Every (2^a, 2^b) with lo <= a <= b <= hi.
std::vector<BenchRow> bench_scale_sweep(unsigned lo, unsigned hi, const BenchConfig& config);

// Fixed Kronecker graph, OM = base * factor for each factor.
std::vector<BenchRow> bench_om_sweep(unsigned scale_n, unsigned scale_m,
                                     const std::vector<double>& factors,
                                     const BenchConfig& config);

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace obg::tools
