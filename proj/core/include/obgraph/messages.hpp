#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "obgraph/grid.hpp"
#include "obgraph/ids.hpp"

namespace obg {

enum class MessageType : std::uint32_t {
  kVertexSubmit = 1,  // n_i x 16-byte OriginalID
  kMapReturn = 2,     // n_i x (16-byte OriginalID, u64 MappedID)
  kGridParams = 3,    // u64 n, k, b, symmetrize, block-length override (0: auto)
  kGridSubmit = 4,    // grid container (see grid.hpp)
  kSourceSubmit = 5,  // 16-byte OriginalID
  kResultReturn = 6,  // n_i x (16-byte OriginalID, u64 result)
  kAbort = 7,         // UTF-8 reason
};

struct Message {
  MessageType type = MessageType::kAbort;
  std::vector<std::uint8_t> payload;
};

// Frame: u32 type, u64 payload length, payload. Little-endian.
std::vector<std::uint8_t> encode_frame(const Message& m);
Message decode_frame(std::span<const std::uint8_t> frame);

Message make_vertex_submit(std::span<const OriginalID> ids);
std::vector<OriginalID> parse_vertex_submit(const Message& m);

Message make_map_return(std::span<const IdMapping> entries);
std::vector<IdMapping> parse_map_return(const Message& m);

struct GridParamsMessage {
  GridShape shape;  // block_length unused
  bool symmetrize = false;
  std::uint64_t block_length_override = 0;
};
Message make_grid_params(const GridParamsMessage& p);
GridParamsMessage parse_grid_params(const Message& m);

Message make_source_submit(const OriginalID& id);
OriginalID parse_source_submit(const Message& m);

Message make_result_return(std::span<const IdResult> entries);
std::vector<IdResult> parse_result_return(const Message& m);

Message make_abort(const std::string& reason);
// Rethrows an abort; a reason starting with an error code name keeps that code.
[[noreturn]] void throw_abort(const Message& m);

// Bidirectional, ordered, reliable endpoint. Messages cross it as encoded
// frames, so a socket-backed implementation can carry the same bytes.
class Channel {
 public:
  virtual ~Channel() = default;
  virtual void send(const Message& m) = 0;
  // Blocks until a message arrives; throws kIo once the peer has gone away.
  // An incoming kAbort is rethrown via throw_abort.
  virtual Message receive() = 0;
  // Like receive(), but also rejects messages of any other type.
  Message expect(MessageType type);
};

std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> make_local_channel_pair();

}  // namespace obg
