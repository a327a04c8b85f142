#include "fixtures.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "obgraph/error.hpp"

namespace obg::tools {

OriginalID random_id(std::mt19937_64& rng) {
  OriginalID id;
  do {
    id.hi = rng();
    id.lo = rng();
  } while (id.is_null());
  return id;
}

GridGraph random_grid(const GridShape& shape, std::mt19937_64& rng,
                      const std::string& name) {
  const std::size_t l = shape.block_length;
  std::vector<MappedEdge> storage(shape.blocks() * l, MappedEdge::null());
  std::vector<std::size_t> slots(l);
  for (std::size_t r = 0; r < shape.chunk_count; ++r) {
    for (std::size_t c = 0; c < shape.chunk_count; ++c) {
      const std::size_t rows = shape.chunk_length(r);
      const std::size_t cols = shape.chunk_length(c);
      const std::size_t count = std::uniform_int_distribution<std::size_t>(0, l)(rng);
      std::iota(slots.begin(), slots.end(), std::size_t{0});
      std::shuffle(slots.begin(), slots.end(), rng);
      const std::size_t base = shape.block_offset(r, c);
      for (std::size_t e = 0; e < count; ++e) {
        const auto src = shape.chunk_begin(r) + rng() % rows;
        const auto dst = shape.chunk_begin(c) + rng() % cols;
        storage[base + slots[e]] = MappedEdge::make(static_cast<std::uint32_t>(src),
                                                    static_cast<std::uint32_t>(dst));
      }
    }
  }
  return GridGraph{shape, false, ExtArray<MappedEdge>::adopt(name, std::move(storage))};
}

std::vector<std::vector<OriginalID>> random_party_ids(std::size_t vertices,
                                                      const std::vector<std::size_t>& sizes,
                                                      std::mt19937_64& rng) {
  const std::size_t total = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
  if (total < vertices ||
      std::any_of(sizes.begin(), sizes.end(), [&](auto s) { return s > vertices; })) {
    throw Error(ErrorCode::kInvalidArgument, "party sizes cannot cover the vertex set");
  }
  std::unordered_set<OriginalID, OriginalIDHash> seen;
  std::vector<OriginalID> ids;
  while (ids.size() < vertices) {
    const auto id = random_id(rng);
    if (seen.insert(id).second) ids.push_back(id);
  }
  std::vector<std::vector<OriginalID>> parties(sizes.size());
  std::size_t next = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    // Cover the vertex set first, then top up with other parties' vertices.
    const std::size_t own = std::min(sizes[i], vertices - next);
    std::vector<std::uint8_t> taken(vertices, 0);
    for (std::size_t j = 0; j < own; ++j, ++next) {
      parties[i].push_back(ids[next]);
      taken[next] = 1;
    }
    std::vector<std::size_t> rest;
    for (std::size_t j = 0; j < vertices; ++j) {
      if (!taken[j]) rest.push_back(j);
    }
    std::shuffle(rest.begin(), rest.end(), rng);
    for (std::size_t j = 0; parties[i].size() < sizes[i]; ++j) {
      parties[i].push_back(ids[rest[j]]);
    }
    std::shuffle(parties[i].begin(), parties[i].end(), rng);
  }
  return parties;
}

std::vector<std::size_t> default_party_sizes(std::size_t vertices, std::size_t parties) {
  std::vector<std::size_t> sizes(parties);
  const std::size_t even = (vertices + parties - 1) / parties;
  for (std::size_t i = 0; i < parties; ++i) {
    sizes[i] = std::min(vertices, even + (i + 1) * vertices / (4 * parties));
  }
  return sizes;
}

}  // namespace obg::tools
