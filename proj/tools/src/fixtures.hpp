#pragma once

// Random secret inputs with caller-fixed public shape, shared by the trace
// checker, the benchmarks and the tests.

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "obgraph/grid.hpp"
#include "obgraph/ids.hpp"

namespace obg::tools {

OriginalID random_id(std::mt19937_64& rng);

// Every block gets a uniformly random number of real edges in [0, l] at
// random slots; the remaining slots are null.
GridGraph random_grid(const GridShape& shape, std::mt19937_64& rng,
                      const std::string& name = "grid.edges");

// Party vertex sets of the given public sizes whose union is exactly
// `vertices` distinct random IDs. Requires sum(sizes) >= vertices and every
// size <= vertices.
std::vector<std::vector<OriginalID>> random_party_ids(std::size_t vertices,
                                                      const std::vector<std::size_t>& sizes,
                                                      std::mt19937_64& rng);

// Default public party sizes for a `parties`-way split of n vertices.
std::vector<std::size_t> default_party_sizes(std::size_t vertices, std::size_t parties);

}  // namespace obg::tools
