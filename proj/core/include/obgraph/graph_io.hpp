#pragma once

// Graph generation, partitioning into parties, and the text file formats.
//
// Edge list: optional `# vertices <n>` header, then `src dst` per line.
// Party file: `v <key>` and `e <src-key> <dst-key>` lines, in any order.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "obgraph/baselines.hpp"
#include "obgraph/pipeline.hpp"

namespace obg {

struct EdgeList {
  std::size_t vertices = 0;
  std::vector<PlainEdge> edges;
};

// R-MAT recursion with quadrant probabilities (0.57, 0.19, 0.19, 0.05):
// 2^scale_n vertices, exactly 2^scale_m edges, self-loops and duplicates kept.
EdgeList kronecker_graph(unsigned scale_n, unsigned scale_m, std::uint64_t seed);
EdgeList rmat_graph(std::size_t vertices, std::size_t edges, std::uint64_t seed);

enum class PartitionMode { kRandom, kRange };
PartitionMode parse_partition_mode(std::string_view name);

// Owner of each vertex in [0, n).
std::vector<std::size_t> assign_owners(std::size_t vertices, std::size_t parties,
                                       PartitionMode mode, std::uint64_t seed);

// Party i gets the vertices it owns plus the out-edges of those vertices; the
// far endpoints of its edges join its vertex set. Keys are decimal IDs.
std::vector<PartyInput> partition_graph(const EdgeList& graph, std::size_t parties,
                                        PartitionMode mode, std::uint64_t seed);

// Splits the edge multiset itself at random (each edge to a uniformly chosen
// party); every vertex appears in at least one party.
std::vector<PartyInput> split_edges_randomly(const EdgeList& graph, std::size_t parties,
                                             std::uint64_t seed);

void write_edge_list(std::ostream& out, const EdgeList& graph);
EdgeList read_edge_list(std::istream& in);
void write_edge_list_file(const std::filesystem::path& path, const EdgeList& graph);
EdgeList read_edge_list_file(const std::filesystem::path& path);

void write_party(std::ostream& out, const PartyInput& party);
PartyInput read_party(std::istream& in);
void write_party_file(const std::filesystem::path& path, const PartyInput& party);
PartyInput read_party_file(const std::filesystem::path& path);

// The merged graph as the parties jointly hold it, with vertices ranked by
// their raw decimal key.
EdgeList merged_graph(std::span<const PartyInput> parties);

}  // namespace obg
