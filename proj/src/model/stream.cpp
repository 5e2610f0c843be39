#include "condmon/stream.hpp"

#include <cmath>
#include <cstring>

#include "condmon/error.hpp"

namespace condmon {

std::string_view to_string(StreamKind k) {
  switch (k) {
    case StreamKind::PhysiologicalSensor: return "sensor";
    case StreamKind::BehavioralDevice: return "device";
    case StreamKind::Robot: return "robot";
  }
  return "unknown";
}

bool PayloadSchema::accepts(ByteView payload) const {
  if (kind == Kind::Blob) return true;
  return payload.size() == byte_size();
}

bool is_valid_topic(std::string_view topic) {
  if (topic.empty() || topic.size() > 0xFFFF) return false;
  std::size_t start = 0;
  while (true) {
    auto slash = topic.find('/', start);
    auto seg = topic.substr(start, slash == std::string_view::npos ? std::string_view::npos : slash - start);
    if (seg.empty()) return false;
    if (slash == std::string_view::npos) return true;
    start = slash + 1;
  }
}

StreamKind infer_kind(std::string_view topic) {
  auto ns = topic.substr(0, topic.find('/'));
  if (ns == "human") return StreamKind::PhysiologicalSensor;
  if (ns == "device") return StreamKind::BehavioralDevice;
  return StreamKind::Robot;
}

void StreamDescriptor::validate() const {
  if (!is_valid_topic(id)) throw Error(Errc::InvalidArgument, "bad stream id '" + id + "'");
  if (!(nominal_rate_hz > 0) || !std::isfinite(nominal_rate_hz)) {
    throw Error(Errc::InvalidArgument, "nominal rate of '" + id + "' must be positive");
  }
  if (schema.kind == PayloadSchema::Kind::Scalar && schema.length != 1) {
    throw Error(Errc::InvalidArgument, "scalar schema must have length 1");
  }
}

Bytes encode_reals(std::span<const double> values) {
  Bytes out;
  out.reserve(values.size() * 8);
  ByteWriter w(out);
  for (double v : values) w.f64(v);
  return out;
}

std::vector<double> decode_reals(ByteView payload) {
  if (payload.size() % 8 != 0) throw Error(Errc::SchemaMismatch, "payload is not a real vector");
  std::vector<double> out(payload.size() / 8);
  std::memcpy(out.data(), payload.data(), payload.size());
  return out;
}

double decode_scalar(ByteView payload) {
  if (payload.size() != 8) throw Error(Errc::SchemaMismatch, "payload is not a scalar");
  double v;
  std::memcpy(&v, payload.data(), 8);
  return v;
}

Timestamp SystemClock::now() const {
  auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                std::chrono::system_clock::now().time_since_epoch())
                .count();
  return Timestamp::from_nanos(ns);
}

Stamper::Stamper(StreamDescriptor desc, std::uint64_t first_seq)
    : desc_(std::move(desc)), next_seq_(first_seq) {
  desc_.validate();
}

StampedMessage Stamper::stamp_now(const Clock& clock, ByteView payload) {
  return stamp_at(clock.now(), payload);
}

StampedMessage Stamper::stamp_now(const Clock& clock, std::span<const double> values) {
  if (desc_.schema.kind == PayloadSchema::Kind::Blob) {
    throw Error(Errc::SchemaMismatch, desc_.id + " carries blobs, not reals");
  }
  auto bytes = encode_reals(values);
  return stamp_now(clock, bytes);
}

StampedMessage Stamper::stamp_at(Timestamp t, ByteView payload) {
  if (!desc_.schema.accepts(payload)) {
    throw Error(Errc::SchemaMismatch, desc_.id + ": payload of " + std::to_string(payload.size()) +
                                          " bytes does not match schema");
  }
  StampedMessage m;
  m.stream = desc_.id;
  m.stamp = t;
  m.seq = next_seq_++;
  m.payload.assign(payload.begin(), payload.end());
  m.replayed = desc_.replayed();
  return m;
}

StampedMessage Stamper::stamp_at(Timestamp t, double value) {
  auto bytes = encode_reals(std::span<const double>(&value, 1));
  return stamp_at(t, bytes);
}

}  // namespace condmon
