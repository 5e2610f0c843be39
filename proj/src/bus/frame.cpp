#include "condmon/bus/frame.hpp"

#include <cmath>
#include <limits>

#include "condmon/error.hpp"

namespace condmon::bus {

namespace {

bool valid_kind(std::uint8_t k) { return k >= 1 && k <= 6; }

void write_topic(ByteWriter& w, std::string_view topic) {
  if (topic.size() > 0xFFFF) throw Error(Errc::InvalidArgument, "topic longer than 65535 bytes");
  w.u16(static_cast<std::uint16_t>(topic.size()));
  w.raw(topic);
}

std::string read_topic(ByteReader& r) {
  auto len = r.u16();
  if (!len) throw Error(Errc::TruncatedBody, "missing topic length");
  auto s = r.str(*len);
  if (!s) throw Error(Errc::TruncatedBody, "topic shorter than its length prefix");
  return std::move(*s);
}

}  // namespace

Bytes encode_frame(FrameKind kind, ByteView body) {
  if (body.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(Errc::BodyTooLarge, std::to_string(body.size()) + " byte body");
  }
  Bytes out;
  out.reserve(kHeaderSize + body.size());
  ByteWriter w(out);
  w.u8(kMagic0);
  w.u8(kMagic1);
  w.u8(kVersion);
  w.u8(static_cast<std::uint8_t>(kind));
  w.u32(static_cast<std::uint32_t>(body.size()));
  w.raw(body);
  return out;
}

std::optional<Frame> decode_frame(ByteView data, std::size_t& consumed) {
  // Reject a bad magic as soon as the offending byte is visible.
  if (!data.empty() && data[0] != kMagic0) throw Error(Errc::BadMagic, "bad frame magic");
  if (data.size() >= 2 && data[1] != kMagic1) throw Error(Errc::BadMagic, "bad frame magic");
  if (data.size() >= 3 && data[2] != kVersion) {
    throw Error(Errc::UnsupportedVersion, "frame version " + std::to_string(data[2]));
  }
  if (data.size() >= 4 && !valid_kind(data[3])) {
    throw Error(Errc::BadMagic, "unknown frame kind " + std::to_string(data[3]));
  }
  if (data.size() < kHeaderSize) return std::nullopt;
  ByteReader r(data.subspan(4));
  std::uint32_t len = *r.u32();
  if (data.size() - kHeaderSize < len) return std::nullopt;
  Frame f;
  f.kind = static_cast<FrameKind>(data[3]);
  f.body.assign(data.begin() + kHeaderSize, data.begin() + kHeaderSize + len);
  consumed = kHeaderSize + len;
  return f;
}

std::optional<Frame> FrameDecoder::next() {
  std::size_t consumed = 0;
  auto f = decode_frame(ByteView(buf_).subspan(pos_), consumed);
  if (!f) return std::nullopt;
  pos_ += consumed;
  // Compact once the consumed prefix dominates the buffer.
  if (pos_ > 4096 && pos_ * 2 > buf_.size()) {
    buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(pos_));
    pos_ = 0;
  }
  return f;
}

void FrameDecoder::finish() const {
  if (buffered() != 0) {
    throw Error(Errc::TruncatedBody, std::to_string(buffered()) + " trailing bytes at end of stream");
  }
}

Bytes encode_advertise(const StreamDescriptor& desc) {
  Bytes out;
  ByteWriter w(out);
  write_topic(w, desc.id);
  w.u8(static_cast<std::uint8_t>(desc.kind));
  w.f64(desc.nominal_rate_hz);
  w.u8(static_cast<std::uint8_t>(desc.schema.kind));
  w.u32(desc.schema.length);
  w.u8(desc.flags);
  return out;
}

StreamDescriptor decode_advertise(ByteView body) {
  ByteReader r(body);
  StreamDescriptor d;
  d.id = read_topic(r);
  if (r.remaining() == 0) {
    // Bare-topic advertisement.
    d.kind = infer_kind(d.id);
    return d;
  }
  auto kind = r.u8();
  auto rate = r.f64();
  auto schema_kind = r.u8();
  auto schema_len = r.u32();
  auto flags = r.u8();
  if (!r.ok()) throw Error(Errc::TruncatedBody, "short ADVERTISE descriptor");
  if (*kind > 2 || *schema_kind > 2) throw Error(Errc::InvalidArgument, "bad ADVERTISE enum value");
  d.kind = static_cast<StreamKind>(*kind);
  d.nominal_rate_hz = *rate;
  d.schema = {static_cast<PayloadSchema::Kind>(*schema_kind), *schema_len};
  d.flags = *flags;
  return d;
}

Bytes encode_subscribe(const SubscribeRequest& req) {
  Bytes out;
  ByteWriter w(out);
  write_topic(w, req.pattern);
  if (req.queue_capacity != 0) w.u32(req.queue_capacity);
  return out;
}

SubscribeRequest decode_subscribe(ByteView body) {
  ByteReader r(body);
  SubscribeRequest req;
  req.pattern = read_topic(r);
  if (r.remaining() != 0) {
    auto cap = r.u32();
    if (!cap) throw Error(Errc::TruncatedBody, "short SUBSCRIBE capacity");
    req.queue_capacity = *cap;
  }
  return req;
}

Bytes encode_topic(std::string_view topic) {
  Bytes out;
  ByteWriter w(out);
  write_topic(w, topic);
  return out;
}

std::string decode_topic(ByteView body) {
  ByteReader r(body);
  return read_topic(r);
}

Bytes encode_publish(const StampedMessage& m) {
  Bytes out;
  out.reserve(2 + m.stream.size() + 20 + m.payload.size());
  ByteWriter w(out);
  write_topic(w, m.stream);
  w.u64(m.stamp.seconds);
  w.u32(m.stamp.nanos);
  w.u64(m.seq);
  w.raw(m.payload);
  return out;
}

StampedMessage decode_publish(ByteView body) {
  ByteReader r(body);
  StampedMessage m;
  m.stream = read_topic(r);
  auto s = r.u64();
  auto ns = r.u32();
  auto seq = r.u64();
  if (!r.ok()) throw Error(Errc::TruncatedBody, "short PUBLISH header");
  if (*ns >= kNanosPerSecond) throw Error(Errc::InvalidArgument, "PUBLISH stamp nanos out of range");
  m.stamp = {*s, *ns};
  m.seq = *seq;
  auto rest = r.rest();
  m.payload.assign(rest.begin(), rest.end());
  return m;
}

std::string_view peek_publish_topic(ByteView body) {
  ByteReader r(body);
  auto len = r.u16();
  auto v = len ? r.take(*len) : std::nullopt;
  if (!v) throw Error(Errc::TruncatedBody, "short PUBLISH topic");
  return {reinterpret_cast<const char*>(v->data()), v->size()};
}

}  // namespace condmon::bus
