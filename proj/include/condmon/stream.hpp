#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "condmon/bytes.hpp"
#include "condmon/timestamp.hpp"

namespace condmon {

// S^n / D^n / R^n: physiological sensor, behavioural device, robot.
enum class StreamKind : std::uint8_t {
  PhysiologicalSensor = 0,
  BehavioralDevice = 1,
  Robot = 2,
};

std::string_view to_string(StreamKind k);

struct PayloadSchema {
  enum class Kind : std::uint8_t { Scalar = 0, Vector = 1, Blob = 2 };

  Kind kind = Kind::Blob;
  std::uint32_t length = 0;  // element count for Vector, 1 for Scalar, 0 for Blob

  static PayloadSchema scalar() { return {Kind::Scalar, 1}; }
  static PayloadSchema vector(std::uint32_t n) { return {Kind::Vector, n}; }
  static PayloadSchema blob() { return {Kind::Blob, 0}; }

  // Number of payload bytes the schema requires, 0 meaning "any" for Blob.
  std::size_t byte_size() const { return kind == Kind::Blob ? 0 : std::size_t{length} * 8; }
  bool accepts(ByteView payload) const;

  bool operator==(const PayloadSchema&) const = default;
};

// Flag bits carried with a stream's advertisement.
enum StreamFlags : std::uint8_t {
  kFlagNone = 0,
  kFlagReplayed = 1 << 0,
};

struct StreamDescriptor {
  std::string id;  // '/'-separated topic path, first segment = namespace
  StreamKind kind = StreamKind::Robot;
  double nominal_rate_hz = 1.0;
  PayloadSchema schema = PayloadSchema::blob();
  std::uint8_t flags = kFlagNone;

  std::string_view name_space() const { return std::string_view(id).substr(0, id.find('/')); }
  bool replayed() const { return (flags & kFlagReplayed) != 0; }

  // Throws InvalidArgument when id or rate break the invariants.
  void validate() const;

  bool operator==(const StreamDescriptor&) const = default;
};

// True for a non-empty '/'-separated path without empty segments.
bool is_valid_topic(std::string_view topic);

// Kind implied by the namespace convention: "human/..." -> PhysiologicalSensor,
// "device/..." -> BehavioralDevice, anything else -> Robot.
StreamKind infer_kind(std::string_view topic);

struct StampedMessage {
  std::string stream;
  Timestamp stamp;
  std::uint64_t seq = 0;
  Bytes payload;
  bool replayed = false;

  bool operator==(const StampedMessage&) const = default;
};

// Real-valued payload helpers (f64 little-endian, one per element).
Bytes encode_reals(std::span<const double> values);
std::vector<double> decode_reals(ByteView payload);
double decode_scalar(ByteView payload);

class Clock {
 public:
  virtual ~Clock() = default;
  virtual Timestamp now() const = 0;
};

class SystemClock final : public Clock {
 public:
  Timestamp now() const override;
};

// Manually advanced clock for simulation and tests.
class ManualClock final : public Clock {
 public:
  explicit ManualClock(Timestamp start = {}) : now_(start) {}
  Timestamp now() const override { return now_; }
  void set(Timestamp t) { now_ = t; }
  void advance_nanos(std::int64_t ns) { now_ = now_.plus_nanos(ns); }

 private:
  Timestamp now_;
};

// Owns the per-stream sequence counter and stamps outgoing payloads.
// Not thread-safe: a stamper belongs to one publishing context.
class Stamper {
 public:
  explicit Stamper(StreamDescriptor desc, std::uint64_t first_seq = 1);

  const StreamDescriptor& descriptor() const { return desc_; }
  std::uint64_t last_seq() const { return next_seq_ - 1; }

  StampedMessage stamp_now(const Clock& clock, ByteView payload);
  StampedMessage stamp_now(const Clock& clock, std::span<const double> values);
  StampedMessage stamp_now(const Clock& clock, double value) {
    return stamp_now(clock, std::span<const double>(&value, 1));
  }
  // Same as stamp_now with an explicit stamp (simulators stamp with sim time).
  StampedMessage stamp_at(Timestamp t, ByteView payload);
  StampedMessage stamp_at(Timestamp t, double value);

 private:
  StreamDescriptor desc_;
  std::uint64_t next_seq_;
};

}  // namespace condmon
