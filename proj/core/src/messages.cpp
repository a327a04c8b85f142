#include "obgraph/messages.hpp"

#include <condition_variable>
#include <deque>
#include <mutex>

#include "byte_io.hpp"
#include "obgraph/error.hpp"

namespace obg {

namespace {

void put_id(std::vector<std::uint8_t>& out, const OriginalID& id) {
  const auto b = id.bytes();
  out.insert(out.end(), b.begin(), b.end());
}

OriginalID get_id(detail::ByteReader& in) {
  return OriginalID::from_bytes(in.bytes(16).first<16>());
}

void require(const Message& m, MessageType type) {
  if (m.type != type) {
    throw Error(ErrorCode::kInvalidArgument,
                "unexpected message type " +
                    std::to_string(static_cast<std::uint32_t>(m.type)));
  }
}

void require_multiple(const Message& m, std::size_t record) {
  if (m.payload.size() % record != 0) {
    throw Error(ErrorCode::kInvalidArgument, "payload is not a whole number of records");
  }
}

}  // namespace

// A reason of the form "<Code>: detail" keeps its code across the channel.
[[noreturn]] void throw_abort(const Message& m) {
  const std::string reason(m.payload.begin(), m.payload.end());
  for (int c = 0; c <= static_cast<int>(ErrorCode::kIo); ++c) {
    const auto code = static_cast<ErrorCode>(c);
    const std::string prefix = std::string(to_string(code)) + ": ";
    if (reason.rfind(prefix, 0) == 0) {
      throw Error(code, "peer aborted: " + reason.substr(prefix.size()));
    }
  }
  throw Error(ErrorCode::kIo, "peer aborted: " + reason);
}

std::vector<std::uint8_t> encode_frame(const Message& m) {
  std::vector<std::uint8_t> out;
  out.reserve(12 + m.payload.size());
  detail::put_u32(out, static_cast<std::uint32_t>(m.type));
  detail::put_u64(out, m.payload.size());
  out.insert(out.end(), m.payload.begin(), m.payload.end());
  return out;
}

Message decode_frame(std::span<const std::uint8_t> frame) {
  detail::ByteReader in(frame, ErrorCode::kIo);
  Message m;
  const std::uint32_t type = in.u32();
  if (type < 1 || type > static_cast<std::uint32_t>(MessageType::kAbort)) {
    throw Error(ErrorCode::kIo, "unknown message type " + std::to_string(type));
  }
  m.type = static_cast<MessageType>(type);
  const std::uint64_t len = in.u64();
  if (len != in.remaining()) throw Error(ErrorCode::kIo, "frame length mismatch");
  const auto body = in.bytes(len);
  m.payload.assign(body.begin(), body.end());
  return m;
}

Message make_vertex_submit(std::span<const OriginalID> ids) {
  Message m{MessageType::kVertexSubmit, {}};
  m.payload.reserve(ids.size() * 16);
  for (const auto& id : ids) put_id(m.payload, id);
  return m;
}

std::vector<OriginalID> parse_vertex_submit(const Message& m) {
  require(m, MessageType::kVertexSubmit);
  require_multiple(m, 16);
  detail::ByteReader in(m.payload, ErrorCode::kInvalidArgument);
  std::vector<OriginalID> out(m.payload.size() / 16);
  for (auto& id : out) id = get_id(in);
  return out;
}

Message make_map_return(std::span<const IdMapping> entries) {
  Message m{MessageType::kMapReturn, {}};
  m.payload.reserve(entries.size() * 24);
  for (const auto& e : entries) {
    put_id(m.payload, e.id);
    detail::put_u64(m.payload, e.mapped);
  }
  return m;
}

std::vector<IdMapping> parse_map_return(const Message& m) {
  require(m, MessageType::kMapReturn);
  require_multiple(m, 24);
  detail::ByteReader in(m.payload, ErrorCode::kInvalidArgument);
  std::vector<IdMapping> out(m.payload.size() / 24);
  for (auto& e : out) {
    e.id = get_id(in);
    e.mapped = in.u64();
  }
  return out;
}

Message make_grid_params(const GridParamsMessage& p) {
  Message m{MessageType::kGridParams, {}};
  detail::put_u64(m.payload, p.shape.vertices);
  detail::put_u64(m.payload, p.shape.chunk_size);
  detail::put_u64(m.payload, p.shape.chunk_count);
  detail::put_u64(m.payload, p.symmetrize ? 1 : 0);
  detail::put_u64(m.payload, p.block_length_override);
  return m;
}

GridParamsMessage parse_grid_params(const Message& m) {
  require(m, MessageType::kGridParams);
  detail::ByteReader in(m.payload, ErrorCode::kInvalidArgument);
  GridParamsMessage p;
  p.shape.vertices = in.u64();
  p.shape.chunk_size = in.u64();
  p.shape.chunk_count = in.u64();
  p.symmetrize = in.u64() != 0;
  p.block_length_override = in.u64();
  return p;
}

Message make_source_submit(const OriginalID& id) {
  Message m{MessageType::kSourceSubmit, {}};
  put_id(m.payload, id);
  return m;
}

OriginalID parse_source_submit(const Message& m) {
  require(m, MessageType::kSourceSubmit);
  if (m.payload.size() != 16) {
    throw Error(ErrorCode::kInvalidArgument, "source message must be 16 bytes");
  }
  detail::ByteReader in(m.payload, ErrorCode::kInvalidArgument);
  return get_id(in);
}

Message make_result_return(std::span<const IdResult> entries) {
  Message m{MessageType::kResultReturn, {}};
  m.payload.reserve(entries.size() * 24);
  for (const auto& e : entries) {
    put_id(m.payload, e.id);
    detail::put_u64(m.payload, e.result);
  }
  return m;
}

std::vector<IdResult> parse_result_return(const Message& m) {
  require(m, MessageType::kResultReturn);
  require_multiple(m, 24);
  detail::ByteReader in(m.payload, ErrorCode::kInvalidArgument);
  std::vector<IdResult> out(m.payload.size() / 24);
  for (auto& e : out) {
    e.id = get_id(in);
    e.result = in.u64();
  }
  return out;
}

Message make_abort(const std::string& reason) {
  return {MessageType::kAbort, std::vector<std::uint8_t>(reason.begin(), reason.end())};
}

Message Channel::expect(MessageType type) {
  Message m = receive();
  require(m, type);
  return m;
}

namespace {

struct Mailbox {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::vector<std::uint8_t>> frames;
  bool closed = false;
};

class LocalChannel final : public Channel {
 public:
  LocalChannel(std::shared_ptr<Mailbox> in, std::shared_ptr<Mailbox> out)
      : in_(std::move(in)), out_(std::move(out)) {}

  ~LocalChannel() override {
    for (auto* box : {in_.get(), out_.get()}) {
      std::lock_guard lock(box->mu);
      box->closed = true;
      box->cv.notify_all();
    }
  }

  void send(const Message& m) override {
    auto frame = encode_frame(m);
    std::lock_guard lock(out_->mu);
    if (out_->closed) throw Error(ErrorCode::kIo, "peer closed the channel");
    out_->frames.push_back(std::move(frame));
    out_->cv.notify_one();
  }

  Message receive() override {
    std::vector<std::uint8_t> frame;
    {
      std::unique_lock lock(in_->mu);
      in_->cv.wait(lock, [&] { return !in_->frames.empty() || in_->closed; });
      if (in_->frames.empty()) throw Error(ErrorCode::kIo, "peer closed the channel");
      frame = std::move(in_->frames.front());
      in_->frames.pop_front();
    }
    Message m = decode_frame(frame);
    if (m.type == MessageType::kAbort) throw_abort(m);
    return m;
  }

 private:
  std::shared_ptr<Mailbox> in_;
  std::shared_ptr<Mailbox> out_;
};

}  // namespace

std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> make_local_channel_pair() {
  auto a_to_b = std::make_shared<Mailbox>();
  auto b_to_a = std::make_shared<Mailbox>();
  return {std::make_unique<LocalChannel>(b_to_a, a_to_b),
          std::make_unique<LocalChannel>(a_to_b, b_to_a)};
}

}  // namespace obg
