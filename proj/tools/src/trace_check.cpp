#include "trace_check.hpp"

#include <functional>
#include <map>
#include <random>

#include "fixtures.hpp"
#include "obgraph/apps.hpp"
#include "obgraph/baselines.hpp"
#include "obgraph/error.hpp"
#include "obgraph/oprims.hpp"
#include "obgraph/pipeline.hpp"
#include "obgraph/runtime.hpp"
#include "obgraph/scan.hpp"

namespace obg::tools {

namespace {

using Prepared = std::function<void(Runtime&)>;
using Preparer = std::function<Prepared(std::mt19937_64&, const TraceCheckOptions&)>;

template <class T, class Gen>
std::shared_ptr<ExtArray<T>> random_array(const std::string& name, std::size_t n,
                                          Gen&& gen) {
  std::vector<T> v(n);
  for (auto& x : v) x = gen();
  return std::make_shared<ExtArray<T>>(ExtArray<T>::adopt(name, std::move(v)));
}

std::shared_ptr<GridGraph> grid_for(std::mt19937_64& rng, const TraceCheckOptions& o,
                                    std::size_t vwidth) {
  const GridShape shape = make_shape(o.vertices, o.om_bytes, vwidth, o.block_length);
  return std::make_shared<GridGraph>(random_grid(shape, rng));
}

Prepared prepare_sort(std::mt19937_64& rng, const TraceCheckOptions& o) {
  auto a = random_array<std::uint64_t>("sort.in", 4 * o.vertices - 3, [&] { return rng(); });
  return [a](Runtime& rt) { o_sort(*a, std::less<>{}, rt); };
}

template <bool Rows>
Prepared prepare_scan(std::mt19937_64& rng, const TraceCheckOptions& o) {
  auto grid = grid_for(rng, o, sizeof(std::uint64_t));
  auto src = random_array<std::uint64_t>("scan.src", o.vertices, [&] { return rng() >> 8; });
  auto dst = random_array<std::uint64_t>("scan.dst", o.vertices, [&] { return rng() >> 8; });
  return [grid, src, dst](Runtime& rt) {
    if constexpr (Rows) {
      full_scan_rows(
          *grid, *src, *dst,
          [](const MappedEdge&, std::uint64_t& s, const std::uint64_t& d) { s += d; }, rt);
    } else {
      full_scan(
          *grid, *src, *dst,
          [](const MappedEdge&, const std::uint64_t& s, std::uint64_t& d) { d += s; }, rt);
    }
  };
}

struct PartyArrays {
  std::vector<ExtArray<OriginalID>> ids;
  std::vector<ExtArray<IdMapping>> maps;
  std::size_t vertices = 0;
};

std::shared_ptr<PartyArrays> party_arrays(std::mt19937_64& rng, const TraceCheckOptions& o) {
  auto out = std::make_shared<PartyArrays>();
  out->vertices = o.vertices;
  const auto sets =
      random_party_ids(o.vertices, default_party_sizes(o.vertices, o.parties), rng);
  std::vector<OriginalID> all;
  for (const auto& s : sets) all.insert(all.end(), s.begin(), s.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const std::string prefix = "party" + std::to_string(i);
    out->ids.push_back(ExtArray<OriginalID>::adopt(prefix + ".V", sets[i]));
    std::vector<IdMapping> m;
    for (const auto& id : sets[i]) {
      m.push_back({id, static_cast<std::uint64_t>(
                           std::lower_bound(all.begin(), all.end(), id) - all.begin())});
    }
    std::sort(m.begin(), m.end(),
              [](const IdMapping& a, const IdMapping& b) { return a.id < b.id; });
    out->maps.push_back(ExtArray<IdMapping>::adopt(prefix + ".M", std::move(m)));
  }
  return out;
}

Prepared prepare_mapping(std::mt19937_64& rng, const TraceCheckOptions& o) {
  auto p = party_arrays(rng, o);
  return [p](Runtime& rt) { vertex_mapping(p->ids, p->vertices, rt); };
}

Prepared prepare_merge(std::mt19937_64& rng, const TraceCheckOptions& o) {
  auto grids = std::make_shared<std::vector<GridGraph>>();
  const GridShape shape =
      make_shape(o.vertices, o.om_bytes, sizeof(PRState), o.block_length / o.parties + 1);
  for (std::size_t i = 0; i < o.parties; ++i) {
    grids->push_back(random_grid(shape, rng, "party" + std::to_string(i) + ".grid"));
  }
  return [grids](Runtime& rt) { merge_grids(*grids, rt); };
}

Prepared prepare_post(std::mt19937_64& rng, const TraceCheckOptions& o) {
  auto p = party_arrays(rng, o);
  auto r = std::make_shared<ExtArray<ResultEntry>>("post.in", o.vertices);
  std::vector<ResultEntry> rs(o.vertices);
  for (std::size_t v = 0; v < o.vertices; ++v) rs[v] = {v, rng()};
  *r = ExtArray<ResultEntry>::adopt("post.in", std::move(rs));
  return [p, r](Runtime& rt) { post_process(*r, p->maps, rt); };
}

Prepared prepare_pr(std::mt19937_64& rng, const TraceCheckOptions& o) {
  auto grid = grid_for(rng, o, sizeof(PRState));
  return [grid, t = o.iterations](Runtime& rt) { pagerank(*grid, t, kDefaultDamping, rt); };
}

Prepared prepare_leaky(std::mt19937_64& rng, const TraceCheckOptions& o) {
  auto grid = grid_for(rng, o, sizeof(PRState));
  return [grid, t = o.iterations](Runtime& rt) {
    pagerank_leaky(*grid, t, kDefaultDamping, rt);
  };
}

Prepared prepare_bfs(std::mt19937_64& rng, const TraceCheckOptions& o) {
  auto grid = grid_for(rng, o, sizeof(std::uint64_t));
  const std::uint64_t source = rng() % o.vertices;
  return [grid, source, t = o.iterations](Runtime& rt) { bfs(*grid, source, t, rt); };
}

Prepared prepare_wcc(std::mt19937_64& rng, const TraceCheckOptions& o) {
  auto grid = grid_for(rng, o, sizeof(std::uint64_t));
  grid->symmetric = true;
  return [grid, t = o.iterations](Runtime& rt) { wcc(*grid, t, rt); };
}

Prepared prepare_sortscan(std::mt19937_64& rng, const TraceCheckOptions& o) {
  const std::size_t n = o.vertices;
  auto edges = random_array<MappedEdge>("sortscan.edges", 2 * n, [&] {
    if (rng() % 8 == 0) return MappedEdge::null();
    return MappedEdge::make(static_cast<std::uint32_t>(rng() % n),
                            static_cast<std::uint32_t>(rng() % n));
  });
  return [edges, n, t = o.iterations](Runtime& rt) {
    AppConfig app;
    app.iterations = t;
    sortscan_run(*edges, n, app, 0, rt);
  };
}

const std::map<std::string, Preparer>& registry() {
  static const std::map<std::string, Preparer> stages = {
      {"o-sort", prepare_sort},
      {"scan", prepare_scan<false>},
      {"scan-rows", prepare_scan<true>},
      {"vertex-mapping", prepare_mapping},
      {"merge-grids", prepare_merge},
      {"post-process", prepare_post},
      {"pr", prepare_pr},
      {"bfs", prepare_bfs},
      {"wcc", prepare_wcc},
      {"sortscan", prepare_sortscan},
      {"leaky-pr", prepare_leaky},
  };
  return stages;
}

std::unique_ptr<TraceSession> run_trial(const Preparer& prepare, std::uint64_t seed,
                                        const TraceCheckOptions& o, bool keep_events) {
  std::mt19937_64 rng(seed);
  Prepared run = prepare(rng, o);
  auto session = std::make_unique<TraceSession>(
      o.workers, TraceConfig{o.granularity, keep_events});
  Runtime rt(o.om_bytes, o.workers);
  {
    TraceBinding bind(session.get(), 0);
    run(rt);
  }
  return session;
}

}  // namespace

std::vector<std::string> trace_check_stages() {
  std::vector<std::string> out;
  for (const auto& [name, fn] : registry()) out.push_back(name);
  return out;
}

TraceCheckReport trace_check(const TraceCheckOptions& o) {
  if (o.trials < 2) {
    throw Error(ErrorCode::kInvalidArgument, "trace-check needs at least 2 trials");
  }
  if (o.parties == 0 || o.vertices == 0 || o.workers == 0) {
    throw Error(ErrorCode::kInvalidArgument, "parties, vertices and workers must be positive");
  }
  auto it = registry().find(o.stage);
  if (it == registry().end()) {
    throw Error(ErrorCode::kInvalidArgument, "unknown trace-check stage '" + o.stage + "'");
  }
  TraceCheckReport report;
  report.stage = o.stage;
  report.trials = o.trials;

  // Trial seeds are derived from the base seed so every trial sees
  // independent secrets under the same public parameters.
  std::seed_seq seq{o.seed};
  std::vector<std::uint32_t> seeds(o.trials);
  seq.generate(seeds.begin(), seeds.end());

  auto base = run_trial(it->second, seeds[0], o, true);
  report.events = base->total_events();
  report.worker_digests.push_back(base->worker_digests());
  for (std::size_t t = 1; t < o.trials; ++t) {
    auto session = run_trial(it->second, seeds[t], o, false);
    report.worker_digests.push_back(session->worker_digests());
    if (!report.failing_trial && report.worker_digests[t] != report.worker_digests[0]) {
      report.failing_trial = t;
      auto full = run_trial(it->second, seeds[t], o, true);
      report.divergence = first_divergence(*base, *full);
    }
  }
  report.passed = !report.failing_trial.has_value();
  return report;
}

}  // namespace obg::tools
