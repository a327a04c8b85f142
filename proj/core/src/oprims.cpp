#include "obgraph/oprims.hpp"

namespace obg {

std::uint64_t bitonic_network_size(std::size_t padded, std::size_t om_records) {
  std::uint64_t total = 0;
  for (std::size_t size = om_records * 2; size <= padded; size *= 2) {
    const auto levels =
        static_cast<std::uint64_t>(std::countr_zero(size / om_records));
    total += levels * (padded / 2);
  }
  return total;
}

std::size_t sort_block_records(std::size_t length, std::size_t width,
                               std::size_t available) {
  const std::size_t fit = available / width;
  if (fit < 2) return 0;
  return std::min(std::bit_ceil(std::max<std::size_t>(length, 1)),
                  std::bit_floor(fit));
}

}  // namespace obg
