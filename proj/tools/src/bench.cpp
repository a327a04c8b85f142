#include "bench.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "obgraph/error.hpp"

namespace obg::tools {

double pr_seconds_per_iteration(const std::vector<PartyInput>& parties, Engine engine,
                                const BenchConfig& config) {
  if (config.iterations < 2) {
    throw Error(ErrorCode::kInvalidArgument, "bench needs at least 2 iterations");
  }
  AppConfig app;
  app.kind = AppKind::kPageRank;
  app.iterations = config.iterations;
  RunOptions opt;
  opt.om_bytes = config.om_bytes;
  opt.workers = config.workers;
  opt.engine = engine;
  opt.trace = false;
  const auto result = run_end_to_end(parties, app, opt, salt_from_seed(config.seed));
  std::vector<double> t(result.iteration_seconds.begin() + 1,
                        result.iteration_seconds.end());
  std::nth_element(t.begin(), t.begin() + t.size() / 2, t.end());
  return t[t.size() / 2];
}

namespace {

BenchRow measure(const EdgeList& g, std::size_t om_bytes, double factor,
                 const BenchConfig& base) {
  BenchConfig config = base;
  config.om_bytes = om_bytes;
  const auto parties = partition_graph(g, 1, PartitionMode::kRange, base.seed);
  BenchRow row;
  row.vertices = g.vertices;
  row.edges = g.edges.size();
  row.om_bytes = om_bytes;
  row.om_factor = factor;
  row.grid = pr_seconds_per_iteration(parties, Engine::kGrid, config);
  row.sortscan = pr_seconds_per_iteration(parties, Engine::kSortScan, config);
  return row;
}

}  // namespace

std::vector<BenchRow> bench_scale_sweep(unsigned lo, unsigned hi, const BenchConfig& config) {
  std::vector<BenchRow> rows;
  for (unsigned a = lo; a <= hi; ++a) {
    for (unsigned b = a; b <= hi; ++b) {
      rows.push_back(measure(kronecker_graph(a, b, config.seed), config.om_bytes, 1.0, config));
    }
  }
  return rows;
}

std::vector<BenchRow> bench_om_sweep(unsigned scale_n, unsigned scale_m,
                                     const std::vector<double>& factors,
                                     const BenchConfig& config) {
  const EdgeList g = kronecker_graph(scale_n, scale_m, config.seed);
  std::vector<BenchRow> rows;
  for (double f : factors) {
    const auto om = static_cast<std::size_t>(std::llround(config.om_bytes * f));
    rows.push_back(measure(g, om, f, config));
  }
  return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "n,m,om_bytes,om_factor,grid_s_per_iter,sortscan_s_per_iter,speedup\n";
  for (const auto& r : rows) {
    out << r.vertices << ',' << r.edges << ',' << r.om_bytes << ',' << r.om_factor << ','
        << r.grid << ',' << r.sortscan << ',' << r.speedup() << '\n';
  }
}

}  // namespace obg::tools
