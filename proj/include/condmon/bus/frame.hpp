#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "condmon/bytes.hpp"
#include "condmon/stream.hpp"

namespace condmon::bus {

inline constexpr std::uint8_t kMagic0 = 0xC0;
inline constexpr std::uint8_t kMagic1 = 0x4D;
inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::size_t kHeaderSize = 8;

enum class FrameKind : std::uint8_t {
  Advertise = 1,
  Subscribe = 2,
  Publish = 3,
  Unsubscribe = 4,
  Ping = 5,
  Pong = 6,
};

struct Frame {
  FrameKind kind = FrameKind::Ping;
  Bytes body;

  bool operator==(const Frame&) const = default;
};

// magic | version | kind | length (u32 LE) | body
Bytes encode_frame(FrameKind kind, ByteView body);
inline Bytes encode_frame(const Frame& f) { return encode_frame(f.kind, f.body); }

// Incremental frame parser over a growing byte buffer.
class FrameDecoder {
 public:
  void feed(ByteView data) { buf_.insert(buf_.end(), data.begin(), data.end()); }

  // Consumes exactly one frame when complete, nullopt when more bytes are
  // needed. Throws BadMagic / UnsupportedVersion on a corrupt header.
  std::optional<Frame> next();

  // To be called when the stream has ended: throws TruncatedBody if a
  // partial frame is still buffered.
  void finish() const;

  std::size_t buffered() const { return buf_.size() - pos_; }

 private:
  Bytes buf_;
  std::size_t pos_ = 0;
};

// One-shot decode of the front of `data`. On success `consumed` is set to the
// frame's total size.
std::optional<Frame> decode_frame(ByteView data, std::size_t& consumed);

// Kind-specific bodies.

Bytes encode_advertise(const StreamDescriptor& desc);
StreamDescriptor decode_advertise(ByteView body);

struct SubscribeRequest {
  std::string pattern;
  std::uint32_t queue_capacity = 0;  // 0 = broker default
};

Bytes encode_subscribe(const SubscribeRequest& req);
SubscribeRequest decode_subscribe(ByteView body);

Bytes encode_topic(std::string_view topic);  // UNSUBSCRIBE body
std::string decode_topic(ByteView body);

// topic (u16 LE len + utf-8) | stamp s u64 | stamp ns u32 | seq u64 | payload
Bytes encode_publish(const StampedMessage& m);
StampedMessage decode_publish(ByteView body);
// Topic of a PUBLISH body without decoding the rest.
std::string_view peek_publish_topic(ByteView body);

}  // namespace condmon::bus
