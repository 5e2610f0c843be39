#include "condmon/timestamp.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "condmon/error.hpp"

namespace condmon {

namespace {
__extension__ typedef __int128 i128;  // exact nanosecond arithmetic
}  // namespace

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::SchemaMismatch: return "SchemaMismatch";
    case Errc::Overflow: return "Overflow";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::BodyTooLarge: return "BodyTooLarge";
    case Errc::BadMagic: return "BadMagic";
    case Errc::UnsupportedVersion: return "UnsupportedVersion";
    case Errc::TruncatedBody: return "TruncatedBody";
    case Errc::UnknownStream: return "UnknownStream";
    case Errc::BadPattern: return "BadPattern";
    case Errc::BrokerDisconnected: return "BrokerDisconnected";
    case Errc::BindFailed: return "BindFailed";
    case Errc::OutOfOrder: return "OutOfOrder";
    case Errc::TooLarge: return "TooLarge";
    case Errc::IoError: return "IoError";
    case Errc::CorruptIndex: return "CorruptIndex";
    case Errc::TruncatedChunk: return "TruncatedChunk";
    case Errc::EmptyWindow: return "EmptyWindow";
    case Errc::SingleSample: return "SingleSample";
    case Errc::EmptySeries: return "EmptySeries";
    case Errc::InsufficientSamples: return "InsufficientSamples";
    case Errc::ClockSkew: return "ClockSkew";
    case Errc::MissingBaseline: return "MissingBaseline";
    case Errc::MissingStream: return "MissingStream";
    case Errc::BadConfig: return "BadConfig";
    case Errc::NoData: return "NoData";
    case Errc::BadRange: return "BadRange";
  }
  return "Unknown";
}

Timestamp Timestamp::from_nanos(std::int64_t total_ns) {
  if (total_ns < 0) throw Error(Errc::Overflow, "timestamp before epoch");
  return {static_cast<std::uint64_t>(total_ns / kNanosPerSecond),
          static_cast<std::uint32_t>(total_ns % kNanosPerSecond)};
}

Timestamp Timestamp::from_seconds(double s) {
  if (!std::isfinite(s) || s < 0) throw Error(Errc::InvalidArgument, "bad seconds value");
  double whole = std::floor(s);
  auto ns = static_cast<std::int64_t>(std::llround((s - whole) * 1e9));
  Timestamp t{static_cast<std::uint64_t>(whole), 0};
  return t.plus_nanos(ns);
}

Timestamp Timestamp::plus_nanos(std::int64_t ns) const {
  i128 total = static_cast<i128>(seconds) * kNanosPerSecond + nanos + ns;
  if (total < 0) throw Error(Errc::Overflow, "timestamp before epoch");
  i128 secs = total / kNanosPerSecond;
  if (secs > std::numeric_limits<std::uint64_t>::max()) {
    throw Error(Errc::Overflow, "timestamp seconds overflow");
  }
  return {static_cast<std::uint64_t>(secs), static_cast<std::uint32_t>(total % kNanosPerSecond)};
}

std::int64_t timestamp_diff(Timestamp a, Timestamp b) {
  i128 da = static_cast<i128>(a.seconds) * kNanosPerSecond + a.nanos;
  i128 db = static_cast<i128>(b.seconds) * kNanosPerSecond + b.nanos;
  i128 d = da - db;
  if (d > std::numeric_limits<std::int64_t>::max() || d < std::numeric_limits<std::int64_t>::min()) {
    throw Error(Errc::Overflow, "timestamp difference exceeds int64 nanoseconds");
  }
  return static_cast<std::int64_t>(d);
}

std::string to_string(Timestamp t) {
  std::string frac = std::to_string(t.nanos);
  return std::to_string(t.seconds) + "." + std::string(9 - frac.size(), '0') + frac;
}

Timestamp parse_timestamp(std::string_view text) {
  auto dot = text.find('.');
  Timestamp t;
  auto sec_part = text.substr(0, dot);
  auto [p, ec] = std::from_chars(sec_part.data(), sec_part.data() + sec_part.size(), t.seconds);
  if (ec != std::errc{} || p != sec_part.data() + sec_part.size() || sec_part.empty()) {
    throw Error(Errc::InvalidArgument, "bad timestamp text '" + std::string(text) + "'");
  }
  if (dot != std::string_view::npos) {
    auto frac = text.substr(dot + 1);
    if (frac.empty() || frac.size() > 9) {
      throw Error(Errc::InvalidArgument, "bad timestamp fraction '" + std::string(text) + "'");
    }
    std::uint32_t v = 0;
    for (char c : frac) {
      if (c < '0' || c > '9') throw Error(Errc::InvalidArgument, "bad timestamp fraction");
      v = v * 10 + static_cast<std::uint32_t>(c - '0');
    }
    for (std::size_t i = frac.size(); i < 9; ++i) v *= 10;
    t.nanos = v;
  }
  return t;
}

}  // namespace condmon
