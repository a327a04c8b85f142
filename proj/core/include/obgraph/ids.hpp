#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace obg {

inline constexpr std::uint64_t kNullField = ~std::uint64_t{0};

// 128-bit obfuscated vertex key. Ordering matches the big-endian byte order
// of the wire encoding. The all-ones value is reserved as null.
struct OriginalID {
  std::uint64_t hi = 0;
  std::uint64_t lo = 0;

  static constexpr OriginalID null() { return {kNullField, kNullField}; }
  constexpr bool is_null() const { return hi == kNullField && lo == kNullField; }

  std::array<std::uint8_t, 16> bytes() const;
  static OriginalID from_bytes(std::span<const std::uint8_t, 16> b);
  std::string hex() const;

  friend bool operator==(const OriginalID&, const OriginalID&) = default;
  friend auto operator<=>(const OriginalID&, const OriginalID&) = default;
};

struct OriginalIDHash {
  std::size_t operator()(const OriginalID& id) const noexcept {
    return static_cast<std::size_t>(id.hi ^ (id.lo * 0x9e3779b97f4a7c15ULL));
  }
};

using Salt = std::vector<std::uint8_t>;

// Deterministic salt for reproducible runs.
Salt salt_from_seed(std::uint64_t seed);

// First 128 bits of HMAC-SHA256(salt, raw_key).
OriginalID obfuscate_id(std::string_view raw_key, std::span<const std::uint8_t> salt);
std::vector<OriginalID> obfuscate_ids(std::span<const std::string> raw_keys,
                                      std::span<const std::uint8_t> salt);

// Fixed-width records flowing through vertex mapping and post-processing.
// Null fields hold kNullField / OriginalID::null().
struct MappingEntry {
  OriginalID id = OriginalID::null();
  std::uint64_t party = kNullField;
  std::uint64_t mapped = kNullField;
  std::uint64_t result = kNullField;
};

struct IdMapping {
  OriginalID id;
  std::uint64_t mapped = 0;

  friend bool operator==(const IdMapping&, const IdMapping&) = default;
};

struct ResultEntry {
  std::uint64_t mapped = 0;
  std::uint64_t result = 0;
};

struct IdResult {
  OriginalID id;
  std::uint64_t result = 0;

  friend bool operator==(const IdResult&, const IdResult&) = default;
};

}  // namespace obg
