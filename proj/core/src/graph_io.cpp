#include "obgraph/graph_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>

#include "obgraph/error.hpp"

namespace obg {

namespace {

// Uniform double in [0, 1) from the top 53 bits; portable across standard
// libraries, unlike std::uniform_real_distribution.
double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t below(std::mt19937_64& rng, std::size_t bound) {
  // Lemire-style multiply-shift; bias is negligible for the bounds used here.
  return static_cast<std::size_t>(
      (static_cast<unsigned __int128>(rng()) * bound) >> 64);
}

std::uint64_t parse_u64(std::string_view s, std::size_t line) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kIo, "line " + std::to_string(line) + ": bad integer '" +
                                    std::string(s) + "'");
  }
  return v;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot create " + path.string());
  return out;
}

}  // namespace

EdgeList rmat_graph(std::size_t vertices, std::size_t edges, std::uint64_t seed) {
  if (vertices == 0 || (vertices & (vertices - 1)) != 0) {
    throw Error(ErrorCode::kInvalidArgument, "R-MAT vertex count must be a power of two");
  }
  constexpr double a = 0.57, b = 0.19, c = 0.19;
  const unsigned levels = static_cast<unsigned>(std::countr_zero(vertices));
  std::mt19937_64 rng(seed);
  EdgeList g;
  g.vertices = vertices;
  g.edges.reserve(edges);
  for (std::size_t e = 0; e < edges; ++e) {
    std::uint64_t u = 0, v = 0;
    for (unsigned level = 0; level < levels; ++level) {
      const double r = unit(rng);
      const std::uint64_t bit = std::uint64_t{1} << (levels - 1 - level);
      if (r < a) {
      } else if (r < a + b) {
        v |= bit;
      } else if (r < a + b + c) {
        u |= bit;
      } else {
        u |= bit;
        v |= bit;
      }
    }
    g.edges.emplace_back(u, v);
  }
  return g;
}

EdgeList kronecker_graph(unsigned scale_n, unsigned scale_m, std::uint64_t seed) {
  if (scale_n > 32 || scale_m > 40) {
    throw Error(ErrorCode::kInvalidArgument, "scale out of range");
  }
  return rmat_graph(std::size_t{1} << scale_n, std::size_t{1} << scale_m, seed);
}

PartitionMode parse_partition_mode(std::string_view name) {
  if (name == "random") return PartitionMode::kRandom;
  if (name == "range") return PartitionMode::kRange;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown partition mode '" + std::string(name) + "'");
}

std::vector<std::size_t> assign_owners(std::size_t vertices, std::size_t parties,
                                       PartitionMode mode, std::uint64_t seed) {
  if (parties == 0) throw Error(ErrorCode::kInvalidArgument, "need at least one party");
  std::vector<std::size_t> owner(vertices);
  if (mode == PartitionMode::kRange) {
    for (std::size_t v = 0; v < vertices; ++v) {
      owner[v] = static_cast<std::size_t>(
          (static_cast<unsigned __int128>(v) * parties) / vertices);
    }
  } else {
    std::mt19937_64 rng(seed);
    for (auto& o : owner) o = below(rng, parties);
  }
  return owner;
}

namespace {

// Builds party inputs from per-vertex owners and per-edge holders.
std::vector<PartyInput> build_parties(const EdgeList& graph, std::size_t parties,
                                      std::span<const std::size_t> owner,
                                      std::span<const std::size_t> holder) {
  std::vector<std::vector<std::uint64_t>> vs(parties);
  for (std::size_t v = 0; v < graph.vertices; ++v) vs[owner[v]].push_back(v);
  std::vector<PartyInput> out(parties);
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    const auto [u, v] = graph.edges[e];
    const std::size_t h = holder[e];
    out[h].edges.emplace_back(std::to_string(u), std::to_string(v));
    vs[h].push_back(u);
    vs[h].push_back(v);
  }
  for (std::size_t i = 0; i < parties; ++i) {
    std::sort(vs[i].begin(), vs[i].end());
    vs[i].erase(std::unique(vs[i].begin(), vs[i].end()), vs[i].end());
    out[i].vertices.reserve(vs[i].size());
    for (auto v : vs[i]) out[i].vertices.push_back(std::to_string(v));
  }
  return out;
}

void check_endpoints(const EdgeList& graph) {
  for (const auto& [u, v] : graph.edges) {
    if (u >= graph.vertices || v >= graph.vertices) {
      throw Error(ErrorCode::kInvalidArgument, "edge endpoint outside [0, n)");
    }
  }
}

}  // namespace

std::vector<PartyInput> partition_graph(const EdgeList& graph, std::size_t parties,
                                        PartitionMode mode, std::uint64_t seed) {
  check_endpoints(graph);
  const auto owner = assign_owners(graph.vertices, parties, mode, seed);
  std::vector<std::size_t> holder(graph.edges.size());
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    holder[e] = owner[graph.edges[e].first];
  }
  return build_parties(graph, parties, owner, holder);
}

std::vector<PartyInput> split_edges_randomly(const EdgeList& graph, std::size_t parties,
                                             std::uint64_t seed) {
  check_endpoints(graph);
  const auto owner =
      assign_owners(graph.vertices, parties, PartitionMode::kRandom, seed);
  std::mt19937_64 rng(seed ^ 0x5bd1e995u);
  std::vector<std::size_t> holder(graph.edges.size());
  for (auto& h : holder) h = below(rng, parties);
  return build_parties(graph, parties, owner, holder);
}

void write_edge_list(std::ostream& out, const EdgeList& graph) {
  out << "# vertices " << graph.vertices << '\n';
  for (const auto& [u, v] : graph.edges) out << u << ' ' << v << '\n';
}

EdgeList read_edge_list(std::istream& in) {
  EdgeList g;
  bool declared = false;
  std::uint64_t max_id = 0;
  bool any = false;
  std::string line;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (line[0] == '#') {
      std::string hash, key, value;
      ls >> hash >> key >> value;
      if (key == "vertices") {
        g.vertices = parse_u64(value, no);
        declared = true;
      }
      continue;
    }
    std::string a, b;
    if (!(ls >> a >> b)) {
      throw Error(ErrorCode::kIo, "line " + std::to_string(no) + ": expected 'src dst'");
    }
    const auto u = parse_u64(a, no);
    const auto v = parse_u64(b, no);
    max_id = std::max({max_id, u, v});
    any = true;
    g.edges.emplace_back(u, v);
  }
  if (!declared) g.vertices = any ? max_id + 1 : 0;
  check_endpoints(g);
  return g;
}

void write_edge_list_file(const std::filesystem::path& path, const EdgeList& graph) {
  auto out = open_out(path);
  write_edge_list(out, graph);
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

EdgeList read_edge_list_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_edge_list(in);
}

void write_party(std::ostream& out, const PartyInput& party) {
  for (const auto& v : party.vertices) out << "v " << v << '\n';
  for (const auto& [u, v] : party.edges) out << "e " << u << ' ' << v << '\n';
}

PartyInput read_party(std::istream& in) {
  PartyInput p;
  std::string line;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag, a, b;
    ls >> tag;
    if (tag == "v" && (ls >> a)) {
      p.vertices.push_back(a);
    } else if (tag == "e" && (ls >> a >> b)) {
      p.edges.emplace_back(a, b);
    } else {
      throw Error(ErrorCode::kIo, "line " + std::to_string(no) + ": malformed party record");
    }
  }
  return p;
}

void write_party_file(const std::filesystem::path& path, const PartyInput& party) {
  auto out = open_out(path);
  write_party(out, party);
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

PartyInput read_party_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_party(in);
}

EdgeList merged_graph(std::span<const PartyInput> parties) {
  auto key_less = [](const std::string& a, const std::string& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  };
  std::vector<std::string> keys;
  for (const auto& p : parties) keys.insert(keys.end(), p.vertices.begin(), p.vertices.end());
  std::sort(keys.begin(), keys.end(), key_less);
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  std::unordered_map<std::string, std::uint64_t> rank;
  rank.reserve(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) rank.emplace(keys[i], i);
  EdgeList g;
  g.vertices = keys.size();
  for (const auto& p : parties) {
    for (const auto& [u, v] : p.edges) g.edges.emplace_back(rank.at(u), rank.at(v));
  }
  return g;
}

}  // namespace obg
