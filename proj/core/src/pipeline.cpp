#include "obgraph/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <memory>
#include <thread>
#include <unordered_set>

#include "obgraph/baselines.hpp"
#include "obgraph/oprims.hpp"

namespace obg {

namespace {

std::vector<IdResult> read_all(const ExtArray<IdResult>& a) {
  std::vector<IdResult> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a.read(i);
  return out;
}

std::vector<IdMapping> read_all(const ExtArray<IdMapping>& a) {
  std::vector<IdMapping> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a.read(i);
  return out;
}

bool by_id(const OriginalID& a, const OriginalID& b) { return a < b; }

}  // namespace

PartyClient::PartyClient(std::size_t index, const PartyInput& input, Salt salt)
    : index_(index), salt_(std::move(salt)) {
  std::unordered_set<std::string> seen;
  for (const auto& key : input.vertices) {
    if (seen.insert(key).second) keys_.push_back(key);
  }
  ids_ = obfuscate_ids(keys_, salt_);
  key_of_id_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) key_of_id_.emplace(ids_[i], i);

  std::unordered_map<std::string, std::size_t> pos;
  pos.reserve(keys_.size());
  for (std::size_t i = 0; i < keys_.size(); ++i) pos.emplace(keys_[i], i);
  edges_.reserve(input.edges.size());
  for (const auto& [u, v] : input.edges) {
    auto iu = pos.find(u);
    auto iv = pos.find(v);
    if (iu == pos.end() || iv == pos.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "party " + std::to_string(index) + ": edge (" + u + ", " + v +
                      ") has an endpoint outside the vertex set");
    }
    edges_.emplace_back(ids_[iu->second], ids_[iv->second]);
  }
}

std::optional<OriginalID> PartyClient::id_of(std::string_view raw_key) const {
  const OriginalID id = obfuscate_id(raw_key, salt_);
  if (key_of_id_.contains(id)) return id;
  return std::nullopt;
}

Message PartyClient::vertex_submit() const { return make_vertex_submit(ids_); }

void PartyClient::receive_mapping(const Message& m) {
  auto entries = parse_map_return(m);
  if (entries.size() != ids_.size()) {
    throw Error(ErrorCode::kSizeMismatch, "mapping has " +
                                              std::to_string(entries.size()) +
                                              " entries, expected " +
                                              std::to_string(ids_.size()));
  }
  for (const auto& e : entries) {
    if (!key_of_id_.contains(e.id)) {
      throw Error(ErrorCode::kInvalidArgument, "mapping names an unknown vertex");
    }
  }
  mapping_ = std::move(entries);
}

GridGraph PartyClient::preprocess_edges(const GridShape& shape, bool symmetrize,
                                        std::size_t block_length_override) const {
  if (mapping_.size() != ids_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "mapping not received yet");
  }
  std::unordered_map<OriginalID, std::uint64_t, OriginalIDHash> mapped;
  mapped.reserve(mapping_.size());
  for (const auto& e : mapping_) mapped.emplace(e.id, e.mapped);

  std::vector<MappedEdge> edges;
  edges.reserve(edges_.size() * (symmetrize ? 2 : 1));
  for (const auto& [u, v] : edges_) {
    const auto mu = static_cast<std::uint32_t>(mapped.at(u));
    const auto mv = static_cast<std::uint32_t>(mapped.at(v));
    edges.push_back(MappedEdge::make(mu, mv));
    if (symmetrize) edges.push_back(MappedEdge::make(mv, mu));
  }
  GridShape s = shape;
  const std::size_t needed = max_block_occupancy(edges, s);
  s.block_length = block_length_override != 0 ? block_length_override : needed;
  GridGraph g = build_grid(edges, s, "party" + std::to_string(index_) + ".grid");
  g.symmetric = symmetrize;
  return g;
}

void PartyClient::receive_results(const Message& m) {
  auto entries = parse_result_return(m);
  if (entries.size() != ids_.size()) {
    throw Error(ErrorCode::kSizeMismatch, "result count differs from vertex count");
  }
  results_ = std::move(entries);
}

std::vector<std::pair<std::string, std::uint64_t>> PartyClient::keyed_results() const {
  std::vector<std::pair<std::string, std::uint64_t>> out;
  out.reserve(results_.size());
  for (const auto& r : results_) {
    auto it = key_of_id_.find(r.id);
    if (it == key_of_id_.end()) {
      throw Error(ErrorCode::kInvalidArgument, "result names an unknown vertex");
    }
    out.emplace_back(keys_[it->second], r.result);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void PartyClient::serve(Channel& channel, const std::optional<std::string>& bfs_source) {
  try {
    channel.send(vertex_submit());
    receive_mapping(channel.expect(MessageType::kMapReturn));
    const auto params = parse_grid_params(channel.expect(MessageType::kGridParams));
    GridGraph g = preprocess_edges(params.shape, params.symmetrize,
                                   params.block_length_override);
    channel.send(Message{MessageType::kGridSubmit, encode_grid(g)});
    if (bfs_source) {
      auto id = id_of(*bfs_source);
      if (!id) {
        throw Error(ErrorCode::kUnknownSource, "source not among party vertices");
      }
      channel.send(make_source_submit(*id));
    }
    receive_results(channel.expect(MessageType::kResultReturn));
  } catch (const std::exception& e) {
    try {
      channel.send(make_abort(e.what()));
    } catch (...) {
    }
  }
}

VertexMapping vertex_mapping(std::span<const ExtArray<OriginalID>> party_ids,
                             std::size_t declared_vertices, Runtime& rt) {
  std::vector<ExtView<OriginalID>> inputs(party_ids.begin(), party_ids.end());
  std::vector<std::size_t> sizes;
  for (const auto& a : party_ids) sizes.push_back(a.size());

  auto a = o_trans_merge(
      std::span<const ExtView<OriginalID>>(inputs),
      [](const OriginalID& id, std::size_t party) {
        MappingEntry e;
        e.id = id;
        e.party = party;
        return e;
      },
      "map.A");
  o_sort(
      a,
      [](const MappingEntry& x, const MappingEntry& y) {
        if (x.id != y.id) return x.id < y.id;
        return x.party < y.party;
      },
      rt);

  // Dense rank of each entry's ID in the sorted order.
  OriginalID prev = OriginalID::null();
  std::uint64_t distinct = 0;
  auto ranked = o_trans(
      a,
      [&](MappingEntry e) {
        distinct += (e.id != prev) ? 1 : 0;
        prev = e.id;
        e.mapped = distinct - 1;
        return e;
      },
      "map.A1");

  // Keep only the first occurrence of each MappedID.
  std::uint64_t last = kNullField;
  auto firsts = o_trans(
      ranked,
      [&](MappingEntry e) {
        const bool dup = e.mapped == last;
        last = e.mapped;
        if (dup) e.mapped = kNullField;
        return e;
      },
      "map.A2");

  VertexMapping out;
  out.vertices = declared_vertices;
  out.global = o_filter(
      firsts, [](const MappingEntry& e) { return e.mapped != kNullField; },
      declared_vertices, rt, "map.global",
      [](const MappingEntry& x, const MappingEntry& y) { return x.mapped < y.mapped; });

  out.party_maps = o_split_trans(
      ranked, party_ids.size(),
      [](const MappingEntry& e) { return static_cast<std::size_t>(e.party); },
      [](const MappingEntry& e) { return IdMapping{e.id, e.mapped}; },
      std::span<const std::size_t>(sizes), rt, "map.M",
      [](const MappingEntry& x, const MappingEntry& y) { return by_id(x.id, y.id); });
  return out;
}

GridGraph merge_grids(std::span<const GridGraph> party_grids, Runtime&) {
  if (party_grids.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no grids to merge");
  }
  GridShape shape = party_grids[0].shape;
  bool symmetric = true;
  shape.block_length = 0;
  for (const auto& g : party_grids) {
    const GridShape& s = g.shape;
    if (s.vertices != shape.vertices || s.chunk_size != shape.chunk_size ||
        s.chunk_count != shape.chunk_count) {
      throw Error(ErrorCode::kParamMismatch, "party grids disagree on (n, k, b)");
    }
    shape.block_length += s.block_length;
    symmetric = symmetric && g.symmetric;
  }
  GridGraph out{shape, symmetric,
                ExtArray<MappedEdge>("grid.merged", shape.blocks() * shape.block_length)};
  std::vector<ExtView<MappedEdge>> inputs;
  inputs.reserve(party_grids.size());
  for (std::size_t x = 0; x < shape.blocks(); ++x) {
    inputs.clear();
    for (const auto& g : party_grids) {
      inputs.emplace_back(g.edges, x * g.shape.block_length, g.shape.block_length);
    }
    o_trans_merge_into<MappedEdge, MappedEdge>(
        std::span<const ExtView<MappedEdge>>(inputs),
        ExtSlice<MappedEdge>(out.edges, x * shape.block_length, shape.block_length),
        [](const MappedEdge& e, std::size_t) { return e; });
  }
  return out;
}

std::vector<ExtArray<IdResult>> post_process(
    const ExtArray<ResultEntry>& results,
    std::span<const ExtArray<IdMapping>> party_maps, Runtime& rt) {
  std::vector<ExtView<IdMapping>> maps(party_maps.begin(), party_maps.end());
  std::vector<std::size_t> sizes;
  std::size_t total = 0;
  for (const auto& m : party_maps) {
    sizes.push_back(m.size());
    total += m.size();
  }

  auto party_side = o_trans_merge(
      std::span<const ExtView<IdMapping>>(maps),
      [](const IdMapping& m, std::size_t party) {
        MappingEntry e;
        e.id = m.id;
        e.party = party;
        e.mapped = m.mapped;
        return e;
      },
      "post.Sp");
  auto global_side = o_trans(
      results,
      [](const ResultEntry& r) {
        MappingEntry e;
        e.mapped = r.mapped;
        e.result = r.result;
        return e;
      },
      "post.Sg");
  const ExtView<MappingEntry> both[2] = {global_side, party_side};
  auto s = o_merge(std::span<const ExtView<MappingEntry>>(both), "post.S");

  // Result carriers precede the party entries sharing their MappedID. The
  // carrier flag is the null party, not a null result: an unreachable BFS
  // vertex legitimately carries the all-ones word.
  o_sort(
      s,
      [](const MappingEntry& x, const MappingEntry& y) {
        if (x.mapped != y.mapped) return x.mapped < y.mapped;
        const bool px = x.party != kNullField;
        const bool py = y.party != kNullField;
        if (px != py) return py;
        if (x.party != y.party) return x.party < y.party;
        return x.id < y.id;
      },
      rt);

  std::uint64_t carried_for = kNullField;
  std::uint64_t carried = kNullField;
  auto filled = o_trans(
      s,
      [&](MappingEntry e) {
        if (e.party == kNullField) {
          carried_for = e.mapped;
          carried = e.result;
        } else {
          e.result = e.mapped == carried_for ? carried : kNullField;
        }
        return e;
      },
      "post.S1");

  auto party_entries = o_filter(
      filled, [](const MappingEntry& e) { return e.party != kNullField; }, total, rt,
      "post.S2");

  return o_split_trans(
      party_entries, party_maps.size(),
      [](const MappingEntry& e) { return static_cast<std::size_t>(e.party); },
      [](const MappingEntry& e) { return IdResult{e.id, e.result}; },
      std::span<const std::size_t>(sizes), rt, "post.R",
      [](const MappingEntry& x, const MappingEntry& y) { return by_id(x.id, y.id); });
}

ExtArray<ResultEntry> gather_results(const ExtArray<std::uint64_t>& values) {
  std::uint64_t next = 0;
  return o_trans(
      values, [&](std::uint64_t v) { return ResultEntry{next++, v}; }, "post.R");
}

std::string_view to_string(Engine e) {
  switch (e) {
    case Engine::kGrid: return "oblige";
    case Engine::kSortScan: return "sortscan";
    case Engine::kReference: return "reference";
  }
  return "?";
}

Engine parse_engine(std::string_view name) {
  if (name == "oblige" || name == "grid") return Engine::kGrid;
  if (name == "sortscan" || name == "sort-scan") return Engine::kSortScan;
  if (name == "reference" || name == "plain") return Engine::kReference;
  throw Error(ErrorCode::kInvalidArgument, "unknown engine '" + std::string(name) + "'");
}

std::size_t agree_vertex_count(std::span<const PartyInput> parties, const Salt& salt) {
  std::unordered_set<OriginalID, OriginalIDHash> ids;
  for (const auto& p : parties) {
    for (const auto& id : obfuscate_ids(p.vertices, salt)) ids.insert(id);
  }
  return ids.size();
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

class StageRunner {
 public:
  StageRunner(RunResult& result, const RunOptions& options)
      : result_(result), options_(options) {}

  template <class Fn>
  void operator()(const std::string& name, Fn&& fn) {
    std::optional<TraceSession> session;
    if (options_.trace) session.emplace(options_.workers, options_.trace_config);
    StageReport report;
    report.name = name;
    const auto t0 = Clock::now();
    try {
      TraceBinding bind(session ? &*session : nullptr, 0);
      fn();
    } catch (const StageError&) {
      throw;
    } catch (const Error& e) {
      throw StageError(name, e);
    }
    report.seconds = seconds_since(t0);
    if (session) {
      report.digest = session->digest();
      report.events = session->total_events();
    }
    result_.stages.push_back(std::move(report));
  }

 private:
  RunResult& result_;
  const RunOptions& options_;
};

std::optional<std::size_t> source_owner(std::span<const PartyInput> parties,
                                        const AppConfig& app) {
  if (app.kind != AppKind::kBfs) return std::nullopt;
  for (std::size_t i = 0; i < parties.size(); ++i) {
    const auto& vs = parties[i].vertices;
    if (std::find(vs.begin(), vs.end(), app.bfs_source) != vs.end()) return i;
  }
  throw StageError("source", Error(ErrorCode::kUnknownSource,
                                   "no party holds vertex '" + app.bfs_source + "'"));
}

RunResult run_reference(std::span<const PartyInput> parties, const AppConfig& app,
                        const RunOptions& options, const Salt& salt) {
  RunResult result;
  const auto t0 = Clock::now();
  std::vector<PartyClient> clients;
  std::vector<OriginalID> all;
  for (std::size_t i = 0; i < parties.size(); ++i) {
    clients.emplace_back(i, parties[i], salt);
    const auto& ids = clients.back().vertex_ids();
    all.insert(all.end(), ids.begin(), ids.end());
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  auto rank = [&](const OriginalID& id) {
    return static_cast<std::uint64_t>(std::lower_bound(all.begin(), all.end(), id) -
                                      all.begin());
  };
  std::vector<PlainEdge> edges;
  for (std::size_t i = 0; i < parties.size(); ++i) {
    for (const auto& [u, v] : parties[i].edges) {
      edges.emplace_back(rank(*clients[i].id_of(u)), rank(*clients[i].id_of(v)));
    }
  }
  std::uint64_t source = 0;
  if (auto owner = source_owner(parties, app)) {
    source = rank(*clients[*owner].id_of(app.bfs_source));
  }
  const auto values = reference_run(app, edges, all.size(), source);

  PublicParams& p = result.params;
  p.parties = parties.size();
  for (const auto& c : clients) {
    p.party_vertices.push_back(c.vertex_count());
    p.total_vertices += c.vertex_count();
  }
  p.vertices = all.size();
  p.iterations = app.iterations;
  p.om_bytes = options.om_bytes;
  p.vertex_width = vertex_width(app.kind);
  p.workers = 1;

  for (auto& c : clients) {
    std::vector<IdResult> rs;
    for (const auto& id : c.vertex_ids()) rs.push_back({id, values[rank(id)]});
    std::sort(rs.begin(), rs.end(),
              [](const IdResult& a, const IdResult& b) { return a.id < b.id; });
    c.receive_results(make_result_return(rs));
    result.party_results.push_back(c.results());
    result.keyed_results.push_back(c.keyed_results());
  }
  result.stages.push_back({"compute", seconds_since(t0), std::nullopt, 0});
  return result;
}

}  // namespace

RunResult run_end_to_end(std::span<const PartyInput> parties, const AppConfig& app,
                         const RunOptions& options, const Salt& salt) {
  if (parties.empty()) throw Error(ErrorCode::kInvalidArgument, "no parties");
  if (options.workers == 0) throw Error(ErrorCode::kInvalidArgument, "zero workers");
  if (options.engine == Engine::kReference) {
    return run_reference(parties, app, options, salt);
  }

  const std::size_t p = parties.size();
  const auto owner = source_owner(parties, app);
  const std::size_t n = options.declared_vertices
                            ? *options.declared_vertices
                            : agree_vertex_count(parties, salt);
  const bool sortscan = options.engine == Engine::kSortScan;
  const bool symmetrize = app.kind == AppKind::kWcc;

  RunResult result;
  PublicParams& params = result.params;
  params.parties = p;
  params.vertices = n;
  params.iterations = app.iterations;
  params.om_bytes = options.om_bytes;
  // The sort-scan engine keeps no vertex chunks in OM.
  params.vertex_width = sortscan ? 0 : vertex_width(app.kind);
  params.workers = options.workers;

  // Geometry depends only on public values, so an OM too small for two
  // vertex chunks is reported before any party is contacted.
  GridShape planned;
  try {
    planned = sortscan ? GridShape{n, std::max<std::size_t>(n, 1), n > 0 ? 1u : 0u, 0}
                       : make_shape(n, options.om_bytes, vertex_width(app.kind));
  } catch (const Error& e) {
    throw StageError("params", e);
  }

  Runtime rt(options.om_bytes, options.workers);
  StageRunner stage(result, options);

  // Declared in this order so that on unwinding the server ends close first,
  // which unblocks any party still waiting, before the threads are joined.
  std::vector<std::unique_ptr<Channel>> party_ends;
  std::vector<std::unique_ptr<PartyClient>> clients;
  std::vector<std::jthread> actors;
  std::vector<std::unique_ptr<Channel>> server_ends;

  for (std::size_t i = 0; i < p; ++i) {
    try {
      clients.push_back(std::make_unique<PartyClient>(i, parties[i], salt));
    } catch (const Error& e) {
      throw StageError("client-setup", e);
    }
    auto [server, party] = make_local_channel_pair();
    server_ends.push_back(std::move(server));
    party_ends.push_back(std::move(party));
  }
  for (std::size_t i = 0; i < p; ++i) {
    std::optional<std::string> src;
    if (owner && *owner == i) src = app.bfs_source;
    actors.emplace_back([&, i, src] { clients[i]->serve(*party_ends[i], src); });
  }

  VertexMapping mapping;
  stage("vertex-mapping", [&] {
    std::vector<ExtArray<OriginalID>> submitted;
    for (std::size_t i = 0; i < p; ++i) {
      const auto ids = parse_vertex_submit(server_ends[i]->expect(MessageType::kVertexSubmit));
      ExtArray<OriginalID> a("party" + std::to_string(i) + ".V", ids.size());
      for (std::size_t j = 0; j < ids.size(); ++j) a.write(j, ids[j]);
      params.party_vertices.push_back(ids.size());
      params.total_vertices += ids.size();
      submitted.push_back(std::move(a));
    }
    mapping = vertex_mapping(submitted, n, rt);
    for (std::size_t i = 0; i < p; ++i) {
      server_ends[i]->send(make_map_return(read_all(mapping.party_maps[i])));
    }
  });

  GridGraph grid;
  stage("merge-grids", [&] {
    GridParamsMessage gp;
    gp.shape = planned;
    gp.symmetrize = symmetrize;
    gp.block_length_override = options.block_length_override;
    for (auto& ch : server_ends) ch->send(make_grid_params(gp));

    std::vector<GridGraph> grids;
    for (std::size_t i = 0; i < p; ++i) {
      const auto m = server_ends[i]->expect(MessageType::kGridSubmit);
      GridGraph g = decode_grid(m.payload, "party" + std::to_string(i) + ".grid");
      g.symmetric = symmetrize;
      params.party_block_lengths.push_back(g.shape.block_length);
      grids.push_back(std::move(g));
    }
    grid = merge_grids(grids, rt);
    params.chunk_size = grid.shape.chunk_size;
    params.chunk_count = grid.shape.chunk_count;
    params.block_length = grid.shape.block_length;
  });

  ExtArray<std::uint64_t> values;
  stage("compute", [&] {
    std::uint64_t source = 0;
    if (owner) {
      const auto id =
          parse_source_submit(server_ends[*owner]->expect(MessageType::kSourceSubmit));
      source = resolve_source(mapping.party_maps[*owner], id);
    }
    auto last = Clock::now();
    IterationHook hook = [&](std::size_t) {
      const auto now = Clock::now();
      result.iteration_seconds.push_back(std::chrono::duration<double>(now - last).count());
      last = now;
    };
    if (sortscan) {
      values = sortscan_run(grid.edges, n, app, source, rt, hook);
      return;
    }
    switch (app.kind) {
      case AppKind::kPageRank: {
        auto w = pagerank(grid, app.iterations, app.damping, rt, hook);
        values = o_trans(w, encode_weight, "result.words");
        break;
      }
      case AppKind::kBfs:
        values = bfs(grid, source, app.iterations, rt, hook);
        break;
      case AppKind::kWcc:
        values = wcc(grid, app.iterations, rt, hook);
        break;
    }
  });

  stage("post-process", [&] {
    auto gathered = gather_results(values);
    auto routed = post_process(gathered, mapping.party_maps, rt);
    for (std::size_t i = 0; i < p; ++i) {
      server_ends[i]->send(make_result_return(read_all(routed[i])));
    }
  });

  for (auto& a : actors) a.join();
  for (std::size_t i = 0; i < p; ++i) {
    if (clients[i]->results().size() != clients[i]->vertex_count()) {
      throw StageError("post-process",
                       Error(ErrorCode::kIo, "party " + std::to_string(i) +
                                                 " did not receive its results"));
    }
    result.party_results.push_back(clients[i]->results());
    result.keyed_results.push_back(clients[i]->keyed_results());
  }
  params.validate();
  return result;
}

}  // namespace obg
