#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bench.hpp"
#include "obgraph/apps.hpp"
#include "obgraph/error.hpp"
#include "obgraph/graph_io.hpp"
#include "obgraph/om.hpp"
#include "obgraph/pipeline.hpp"
#include "trace_check.hpp"

namespace obg::tools {

namespace fs = std::filesystem;
using nlohmann::json;

std::size_t parse_bytes(std::string_view text) {
  std::size_t split = 0;
  while (split < text.size() &&
         (std::isdigit(static_cast<unsigned char>(text[split])) || text[split] == '.')) {
    ++split;
  }
  const std::string number(text.substr(0, split));
  std::string unit(text.substr(split));
  std::transform(unit.begin(), unit.end(), unit.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  static const std::map<std::string, double> units = {
      {"", 1},          {"b", 1},          {"k", 1024.0},      {"kib", 1024.0},
      {"m", 1048576.0}, {"mib", 1048576.0}, {"g", 1073741824.0}, {"gib", 1073741824.0},
      {"kb", 1e3},      {"mb", 1e6},        {"gb", 1e9},
  };
  auto it = units.find(unit);
  double value = 0;
  auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), value);
  if (number.empty() || ec != std::errc{} || ptr != number.data() + number.size() ||
      it == units.end()) {
    throw Error(ErrorCode::kInvalidArgument, "bad byte size '" + std::string(text) + "'");
  }
  return static_cast<std::size_t>(std::llround(value * it->second));
}

namespace {

std::string format_result(AppKind kind, std::uint64_t word) {
  if (kind == AppKind::kPageRank) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", decode_weight(word));
    return buf;
  }
  if (word == kInfinity) return "inf";
  return std::to_string(word);
}

json params_json(const PublicParams& p) {
  return json{{"parties", p.parties},
              {"party_vertices", p.party_vertices},
              {"total_vertices", p.total_vertices},
              {"vertices", p.vertices},
              {"iterations", p.iterations},
              {"om_bytes", p.om_bytes},
              {"chunk_size", p.chunk_size},
              {"chunk_count", p.chunk_count},
              {"party_block_lengths", p.party_block_lengths},
              {"block_length", p.block_length},
              {"vertex_width", p.vertex_width},
              {"workers", p.workers}};
}

double median_iteration(const RunResult& r) {
  if (r.iteration_seconds.empty()) return 0;
  std::vector<double> t = r.iteration_seconds;
  if (t.size() > 1) t.erase(t.begin());
  std::nth_element(t.begin(), t.begin() + t.size() / 2, t.end());
  return t[t.size() / 2];
}

bool same_results(AppKind kind, const RunResult& a, const RunResult& b) {
  if (a.keyed_results.size() != b.keyed_results.size()) return false;
  for (std::size_t i = 0; i < a.keyed_results.size(); ++i) {
    const auto& x = a.keyed_results[i];
    const auto& y = b.keyed_results[i];
    if (x.size() != y.size()) return false;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (x[j].first != y[j].first || !result_words_match(kind, x[j].second, y[j].second)) {
        return false;
      }
    }
  }
  return true;
}

struct RunArgs {
  std::vector<std::string> party_files;
  std::string app = "pr";
  std::size_t iterations = 10;
  std::string om_size = "1.25MiB";
  std::size_t workers = 1;
  std::string engine = "oblige";
  std::string source;
  std::uint64_t seed = 1;
  std::string report;
  std::string results_dir;
  bool no_trace = false;
  std::uint32_t granularity = 64;
  std::optional<std::size_t> declared_n;
  std::size_t block_length = 0;
  std::vector<std::string> baselines;
};

int cmd_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<PartyInput> parties;
  for (const auto& f : a.party_files) parties.push_back(read_party_file(f));

  AppConfig app;
  app.kind = parse_app(a.app);
  app.iterations = a.iterations;
  app.bfs_source = a.source;
  if (app.kind == AppKind::kBfs && app.bfs_source.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "bfs needs --source");
  }
  RunOptions opt;
  opt.om_bytes = parse_bytes(a.om_size);
  opt.workers = a.workers;
  opt.engine = parse_engine(a.engine);
  opt.trace = !a.no_trace;
  opt.trace_config = TraceConfig{a.granularity, false};
  opt.declared_vertices = a.declared_n;
  opt.block_length_override = a.block_length;
  const Salt salt = salt_from_seed(a.seed);

  const std::uint64_t violations_before = OMArena::violations();
  const RunResult result = run_end_to_end(parties, app, opt, salt);

  out << "stage,seconds,digest,events\n";
  json stages = json::array();
  for (const auto& s : result.stages) {
    const std::string digest = s.digest ? s.digest->hex() : "";
    out << s.name << ',' << s.seconds << ',' << digest << ',' << s.events << '\n';
    stages.push_back(
        json{{"name", s.name}, {"seconds", s.seconds}, {"digest", digest}, {"events", s.events}});
  }

  std::vector<std::string> result_paths;
  if (!a.results_dir.empty()) {
    fs::create_directories(a.results_dir);
    for (std::size_t i = 0; i < result.keyed_results.size(); ++i) {
      const fs::path path = fs::path(a.results_dir) / ("party" + std::to_string(i) + ".csv");
      std::ofstream f(path);
      if (!f) throw Error(ErrorCode::kIo, "cannot create " + path.string());
      f << "vertex,result\n";
      for (const auto& [key, word] : result.keyed_results[i]) {
        f << key << ',' << format_result(app.kind, word) << '\n';
      }
      result_paths.push_back(path.string());
    }
  }

  bool agree = true;
  json comparisons = json::array();
  const double own = median_iteration(result);
  for (const auto& name : a.baselines) {
    RunOptions bopt = opt;
    bopt.engine = parse_engine(name);
    bopt.trace = false;
    const RunResult other = run_end_to_end(parties, app, bopt, salt);
    const bool match = same_results(app.kind, result, other);
    agree = agree && match;
    const double theirs = median_iteration(other);
    const double speedup = own > 0 && theirs > 0 ? theirs / own : 0;
    comparisons.push_back(json{{"engine", name},
                               {"seconds_per_iteration", theirs},
                               {"speedup", speedup},
                               {"results_match", match}});
    out << "baseline," << name << ",speedup=" << speedup
        << ",results_match=" << (match ? "yes" : "no") << '\n';
  }

  const std::uint64_t violations = OMArena::violations() - violations_before;
  if (!a.report.empty()) {
    json report{{"engine", a.engine},
                {"app", std::string(to_string(app.kind))},
                {"seed", a.seed},
                {"params", params_json(result.params)},
                {"stages", stages},
                {"iteration_seconds", result.iteration_seconds},
                {"seconds_per_iteration", own},
                {"results", result_paths},
                {"baselines", comparisons},
                {"om_violations", violations}};
    std::ofstream f(a.report);
    if (!f) throw Error(ErrorCode::kIo, "cannot create " + a.report);
    f << report.dump(2) << '\n';
  }
  if (violations != 0) {
    err << "error: " << violations << " OM allocation(s) exceeded capacity\n";
    return kExitViolation;
  }
  if (!agree) {
    err << "error: baseline results differ\n";
    return kExitViolation;
  }
  return kExitOk;
}

void print_trace_report(const TraceCheckReport& r, std::ostream& out) {
  out << r.stage << ',' << r.trials << ',' << r.events << ','
      << (r.passed ? "pass" : "FAIL") << ',' << combine_digests(r.worker_digests[0]).hex()
      << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Oblivious multi-party graph analytics simulator"};
  app.require_subcommand(1);

  // gen-kron
  unsigned scale_n = 10, scale_m = 12;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen-kron", "Generate an R-MAT Kronecker edge list");
  gen->add_option("--scale-n", scale_n, "log2 of the vertex count")->capture_default_str();
  gen->add_option("--scale-m", scale_m, "log2 of the edge count")->capture_default_str();
  gen->add_option("--seed", gen_seed)->capture_default_str();
  gen->add_option("-o,--output", gen_out, "edge list file")->required();

  // partition
  std::string part_in, part_prefix, part_mode = "random";
  std::size_t part_p = 2;
  std::uint64_t part_seed = 1;
  auto* part = app.add_subcommand("partition", "Split an edge list into party files");
  part->add_option("-i,--input", part_in)->required();
  part->add_option("-p,--parties", part_p)->capture_default_str();
  part->add_option("--mode", part_mode)
      ->check(CLI::IsMember({"random", "range"}))
      ->capture_default_str();
  part->add_option("--seed", part_seed)->capture_default_str();
  part->add_option("-o,--prefix", part_prefix, "output prefix; writes <prefix>.<i>.party")
      ->required();

  // run
  RunArgs ra;
  auto* run = app.add_subcommand("run", "Run an engine end to end over party files");
  run->add_option("party-files", ra.party_files)->required();
  run->add_option("--app", ra.app)
      ->check(CLI::IsMember({"pr", "pagerank", "bfs", "wcc"}))
      ->capture_default_str();
  run->add_option("-t,--iterations", ra.iterations)->capture_default_str();
  run->add_option("--om-size", ra.om_size)->capture_default_str();
  run->add_option("-w,--workers", ra.workers)->capture_default_str();
  run->add_option("--engine", ra.engine)
      ->check(CLI::IsMember({"oblige", "sortscan", "reference"}))
      ->capture_default_str();
  run->add_option("--source", ra.source, "raw key of the BFS source");
  run->add_option("--seed", ra.seed, "salt seed")->capture_default_str();
  run->add_option("--report", ra.report, "JSON summary path");
  run->add_option("--results-dir", ra.results_dir, "per-party result CSVs");
  run->add_flag("--no-trace", ra.no_trace, "skip trace recording");
  run->add_option("--granularity", ra.granularity, "trace granularity in bytes, 0 = element")
      ->capture_default_str();
  run->add_option("--vertices", ra.declared_n, "publicly agreed merged vertex count");
  run->add_option("--block-length", ra.block_length, "per-party block length override");
  run->add_option("--baseline", ra.baselines, "also run these engines and compare")
      ->check(CLI::IsMember({"oblige", "sortscan", "reference"}));

  // trace-check
  TraceCheckOptions tc;
  std::string tc_om = "64KiB";
  bool tc_all = false;
  auto* trace = app.add_subcommand("trace-check", "Check trace digests across random secrets");
  trace->add_option("--stage", tc.stage, "stage or app to check")
      ->check(CLI::IsMember(trace_check_stages()))
      ->capture_default_str();
  trace->add_flag("--all", tc_all, "check every stage except the leaky control");
  trace->add_option("--trials", tc.trials)->capture_default_str();
  trace->add_option("--seed", tc.seed)->capture_default_str();
  trace->add_option("--vertices", tc.vertices)->capture_default_str();
  trace->add_option("--block-length", tc.block_length)->capture_default_str();
  trace->add_option("--om-size", tc_om)->capture_default_str();
  trace->add_option("-w,--workers", tc.workers)->capture_default_str();
  trace->add_option("-t,--iterations", tc.iterations)->capture_default_str();
  trace->add_option("-p,--parties", tc.parties)->capture_default_str();
  trace->add_option("--granularity", tc.granularity)->capture_default_str();

  // bench
  BenchConfig bc;
  std::string bench_om = "1.25MiB", bench_csv;
  unsigned bench_lo = 12, bench_hi = 16;
  bool om_sweep = false;
  unsigned sweep_n = 16, sweep_m = 18;
  auto* bench = app.add_subcommand("bench", "Time the grid engine against sort-scan");
  bench->add_option("--scale-min", bench_lo)->capture_default_str();
  bench->add_option("--scale-max", bench_hi)->capture_default_str();
  bench->add_flag("--om-sweep", om_sweep, "sweep OM over 1/4x..4x of --om-size instead");
  bench->add_option("--scale-n", sweep_n, "graph for --om-sweep")->capture_default_str();
  bench->add_option("--scale-m", sweep_m, "graph for --om-sweep")->capture_default_str();
  bench->add_option("--om-size", bench_om)->capture_default_str();
  bench->add_option("-w,--workers", bc.workers)->capture_default_str();
  bench->add_option("-t,--iterations", bc.iterations)->capture_default_str();
  bench->add_option("--seed", bc.seed)->capture_default_str();
  bench->add_option("--csv", bench_csv, "also write the table here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) {
      write_edge_list_file(gen_out, kronecker_graph(scale_n, scale_m, gen_seed));
      return kExitOk;
    }
    if (*part) {
      const auto graph = read_edge_list_file(part_in);
      const auto parties =
          partition_graph(graph, part_p, parse_partition_mode(part_mode), part_seed);
      for (std::size_t i = 0; i < parties.size(); ++i) {
        const std::string path = part_prefix + "." + std::to_string(i) + ".party";
        write_party_file(path, parties[i]);
        out << path << '\n';
      }
      return kExitOk;
    }
    if (*run) return cmd_run(ra, out, err);
    if (*trace) {
      tc.om_bytes = parse_bytes(tc_om);
      std::vector<std::string> stages{tc.stage};
      if (tc_all) {
        stages = trace_check_stages();
        std::erase(stages, "leaky-pr");
      }
      out << "stage,trials,events,result,digest\n";
      bool ok = true;
      for (const auto& s : stages) {
        tc.stage = s;
        const auto r = trace_check(tc);
        print_trace_report(r, out);
        if (!r.passed) {
          ok = false;
          err << "error: " << to_string(ErrorCode::kObliviousnessViolation) << ": stage " << s
              << " trial " << *r.failing_trial;
          if (r.divergence) {
            err << " worker " << r.divergence->worker << " event " << r.divergence->index;
          }
          err << '\n';
        }
      }
      return ok ? kExitOk : kExitViolation;
    }
    if (*bench) {
      bc.om_bytes = parse_bytes(bench_om);
      const auto rows = om_sweep
                            ? bench_om_sweep(sweep_n, sweep_m, {0.25, 0.5, 1.0, 2.0, 4.0}, bc)
                            : bench_scale_sweep(bench_lo, bench_hi, bc);
      write_bench_csv(out, rows);
      if (!bench_csv.empty()) {
        std::ofstream f(bench_csv);
        if (!f) throw Error(ErrorCode::kIo, "cannot create " + bench_csv);
        write_bench_csv(f, rows);
      }
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitUsage;
}

}  // namespace obg::tools
