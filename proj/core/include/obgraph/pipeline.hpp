#pragma once

// Multi-party workflow: clients obfuscate and submit vertex IDs, the server
// maps them obliviously, clients bucket their edges into padded grids, the
// server merges the grids, runs the app, and routes results back.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "obgraph/apps.hpp"
#include "obgraph/error.hpp"
#include "obgraph/ext_array.hpp"
#include "obgraph/grid.hpp"
#include "obgraph/ids.hpp"
#include "obgraph/messages.hpp"
#include "obgraph/runtime.hpp"
#include "obgraph/trace.hpp"

namespace obg {

// A party's private graph in raw keys. Edge endpoints must be listed among
// the party's vertices.
struct PartyInput {
  std::vector<std::string> vertices;
  std::vector<std::pair<std::string, std::string>> edges;
};

// Client side of the protocol. Runs on the party's own machine, so nothing
// here needs to be oblivious.
class PartyClient {
 public:
  PartyClient(std::size_t index, const PartyInput& input, Salt salt);

  std::size_t index() const { return index_; }
  std::size_t vertex_count() const { return ids_.size(); }
  const std::vector<OriginalID>& vertex_ids() const { return ids_; }
  std::optional<OriginalID> id_of(std::string_view raw_key) const;

  Message vertex_submit() const;
  void receive_mapping(const Message& m);
  const std::vector<IdMapping>& mapping() const { return mapping_; }

  // Rewrites edges to MappedIDs (adding reverses when `symmetrize`) and
  // buckets them into a padded grid. Block length defaults to the largest
  // block occupancy; an explicit override must be at least that.
  GridGraph preprocess_edges(const GridShape& shape, bool symmetrize,
                             std::size_t block_length_override = 0) const;

  void receive_results(const Message& m);
  const std::vector<IdResult>& results() const { return results_; }
  // Results keyed by the party's raw vertex keys.
  std::vector<std::pair<std::string, std::uint64_t>> keyed_results() const;

  // Runs the whole client protocol over `channel`. The party owning the BFS
  // source sends it after its grid.
  void serve(Channel& channel, const std::optional<std::string>& bfs_source);

 private:
  std::size_t index_;
  Salt salt_;
  std::vector<std::string> keys_;
  std::vector<OriginalID> ids_;
  std::unordered_map<OriginalID, std::size_t, OriginalIDHash> key_of_id_;
  std::vector<std::pair<OriginalID, OriginalID>> edges_;
  std::vector<IdMapping> mapping_;
  std::vector<IdResult> results_;
};

struct VertexMapping {
  ExtArray<MappingEntry> global;                 // n entries, by MappedID
  std::vector<ExtArray<IdMapping>> party_maps;   // M_i, n_i entries each
  std::size_t vertices = 0;
};

// Oblivious given the public (p, n_i, N, n). MappedIDs are 0-based ranks of
// the distinct OriginalIDs. Throws kSizeMismatch if the distinct count is not
// `declared_vertices`.
VertexMapping vertex_mapping(std::span<const ExtArray<OriginalID>> party_ids,
                             std::size_t declared_vertices, Runtime& rt);

// Block x of the result is the concatenation of every party's block x in
// party order; l = sum l_i. Throws kParamMismatch on differing (n, k, b).
GridGraph merge_grids(std::span<const GridGraph> party_grids, Runtime& rt);

// Routes results[v] (MappedID v) to every party vertex mapped to v. Output i
// has n_i entries ordered by OriginalID.
std::vector<ExtArray<IdResult>> post_process(
    const ExtArray<ResultEntry>& results,
    std::span<const ExtArray<IdMapping>> party_maps, Runtime& rt);

// Gathers a per-vertex result array into [MappedID, Result] records.
ExtArray<ResultEntry> gather_results(const ExtArray<std::uint64_t>& values);

enum class Engine { kGrid, kSortScan, kReference };

std::string_view to_string(Engine e);
Engine parse_engine(std::string_view name);

struct RunOptions {
  std::size_t om_bytes = 1310720;  // 1.25 MiB
  std::size_t workers = 1;
  Engine engine = Engine::kGrid;
  // Publicly agreed merged vertex count; computed from the inputs if unset.
  std::optional<std::size_t> declared_vertices;
  std::size_t block_length_override = 0;
  bool trace = true;
  TraceConfig trace_config{0, false};
};

struct StageReport {
  std::string name;
  double seconds = 0;
  std::optional<Digest> digest;
  std::uint64_t events = 0;
};

struct RunResult {
  PublicParams params;
  std::vector<StageReport> stages;
  std::vector<double> iteration_seconds;
  std::vector<std::vector<IdResult>> party_results;
  std::vector<std::vector<std::pair<std::string, std::uint64_t>>> keyed_results;
};

// An error raised inside a named pipeline stage.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& inner)
      : Error(inner.code(), "stage '" + stage + "': " + inner.detail()),
        stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// Number of distinct obfuscated IDs across all parties; stands in for the
// out-of-band agreement on n.
std::size_t agree_vertex_count(std::span<const PartyInput> parties, const Salt& salt);

RunResult run_end_to_end(std::span<const PartyInput> parties, const AppConfig& app,
                         const RunOptions& options, const Salt& salt);

}  // namespace obg
