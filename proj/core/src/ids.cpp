#include "obgraph/ids.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <cstdio>

#include "obgraph/error.hpp"

namespace obg {

std::array<std::uint8_t, 16> OriginalID::bytes() const {
  std::array<std::uint8_t, 16> out{};
  for (int i = 0; i < 8; ++i) {
    out[i] = static_cast<std::uint8_t>(hi >> (56 - 8 * i));
    out[8 + i] = static_cast<std::uint8_t>(lo >> (56 - 8 * i));
  }
  return out;
}

OriginalID OriginalID::from_bytes(std::span<const std::uint8_t, 16> b) {
  OriginalID id;
  for (int i = 0; i < 8; ++i) {
    id.hi = (id.hi << 8) | b[i];
    id.lo = (id.lo << 8) | b[8 + i];
  }
  return id;
}

std::string OriginalID::hex() const {
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx",
                static_cast<unsigned long long>(hi),
                static_cast<unsigned long long>(lo));
  return buf;
}

Salt salt_from_seed(std::uint64_t seed) {
  Salt s(16);
  std::uint64_t x = seed;
  for (std::size_t i = 0; i < s.size(); ++i) {
    // splitmix64 step
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    s[i] = static_cast<std::uint8_t>(z ^ (z >> 31));
  }
  return s;
}

OriginalID obfuscate_id(std::string_view raw_key, std::span<const std::uint8_t> salt) {
  unsigned char mac[EVP_MAX_MD_SIZE];
  unsigned int mac_len = 0;
  if (HMAC(EVP_sha256(), salt.data(), static_cast<int>(salt.size()),
           reinterpret_cast<const unsigned char*>(raw_key.data()), raw_key.size(),
           mac, &mac_len) == nullptr ||
      mac_len < 16) {
    throw Error(ErrorCode::kInvalidArgument, "HMAC-SHA256 failed");
  }
  return OriginalID::from_bytes(std::span<const std::uint8_t, 16>(mac, 16));
}

std::vector<OriginalID> obfuscate_ids(std::span<const std::string> raw_keys,
                                      std::span<const std::uint8_t> salt) {
  std::vector<OriginalID> out;
  out.reserve(raw_keys.size());
  for (const auto& k : raw_keys) out.push_back(obfuscate_id(k, salt));
  return out;
}

}  // namespace obg
