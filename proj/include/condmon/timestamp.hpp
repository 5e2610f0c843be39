#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace condmon {

inline constexpr std::uint32_t kNanosPerSecond = 1'000'000'000;

// Wall-clock instant as integer seconds + nanoseconds since the Unix epoch.
// Integer representation keeps comparisons exact and recordings bit-stable.
struct Timestamp {
  std::uint64_t seconds = 0;
  std::uint32_t nanos = 0;  // < 1e9

  constexpr auto operator<=>(const Timestamp&) const = default;

  static Timestamp from_nanos(std::int64_t total_ns);  // total_ns >= 0
  static Timestamp from_seconds(double s);             // rounded to the nearest ns

  double to_seconds() const { return static_cast<double>(seconds) + nanos * 1e-9; }
  bool valid() const { return nanos < kNanosPerSecond; }

  // Returns the instant `ns` later (ns may be negative). Throws Overflow
  // when the result would precede the epoch or exceed the u64 range.
  Timestamp plus_nanos(std::int64_t ns) const;
};

// Exact signed a - b in nanoseconds. Throws Overflow outside int64.
std::int64_t timestamp_diff(Timestamp a, Timestamp b);

// Canonical "<seconds>.<nanos padded to 9 digits>".
std::string to_string(Timestamp t);
Timestamp parse_timestamp(std::string_view text);

}  // namespace condmon
