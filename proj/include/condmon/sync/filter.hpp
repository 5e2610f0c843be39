#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "condmon/stream.hpp"

namespace condmon::sync {

struct ExactTime {};

struct ApproximateTime {
  std::int64_t slop_ns = 0;  // >= 0
};

using SyncPolicy = std::variant<ExactTime, ApproximateTime>;

// One message per participating stream, in filter stream order.
struct SyncedTuple {
  std::vector<StampedMessage> messages;
  Timestamp pivot_stamp;    // latest member stamp
  std::int64_t spread_ns = 0;  // latest - earliest member stamp
};

struct SyncCounters {
  std::uint64_t out_of_order = 0;  // rejected pushes
  std::uint64_t overflow = 0;      // dropped by the per-stream bound
  std::uint64_t discarded = 0;     // could never be matched
  std::uint64_t emitted = 0;       // tuples
};

inline constexpr std::size_t kDefaultQueueBound = 64;

// Matching state: one stamp-ascending FIFO per participating stream.
struct SyncState {
  std::vector<std::string> streams;
  std::vector<std::deque<StampedMessage>> queues;
  SyncPolicy policy = ExactTime{};
  std::size_t queue_bound = kDefaultQueueBound;
  SyncCounters counters;

  SyncState() = default;
  SyncState(std::vector<std::string> stream_ids, SyncPolicy p, std::size_t bound = kDefaultQueueBound);

  // Index of `stream` or -1.
  int index_of(std::string_view stream) const;
};

// Emits every tuple whose members share one identical stamp, consuming them
// and discarding messages that can no longer find an exact partner.
std::vector<SyncedTuple> exact_match(SyncState& state);

// Greedy head matching: while every queue is non-empty, the heads form a
// tuple when their spread is within slop; otherwise the oldest head cannot
// take part in any tuple and is discarded. This yields the maximum number of
// tuples over the queued messages, with the earliest possible pivots.
std::vector<SyncedTuple> approx_match(SyncState& state);

// The "synchronization time filter": validates, enqueues and matches.
class SyncFilter {
 public:
  SyncFilter(std::vector<std::string> streams, SyncPolicy policy,
             std::size_t queue_bound = kDefaultQueueBound);

  // Throws UnknownStream, or OutOfOrder (counted) when the stamp does not
  // exceed the last accepted stamp of that stream.
  std::vector<SyncedTuple> push(StampedMessage msg);

  const SyncState& state() const { return state_; }
  const SyncCounters& counters() const { return state_.counters; }
  const std::vector<std::string>& streams() const { return state_.streams; }

 private:
  SyncState state_;
  std::vector<std::optional<Timestamp>> last_accepted_;
};

// Half the period of the slowest stream.
std::int64_t default_slop_ns(std::span<const double> nominal_rates_hz);

// Republishing on "synced/<name>": stamp = pivot, body = for each member
// u16 id length | id | u32 payload length | payload, preceded by a u16 count.
StampedMessage to_synced_message(const SyncedTuple& tuple, const std::string& filter_name,
                                 std::uint64_t seq);
std::vector<std::pair<std::string, Bytes>> decode_synced_body(ByteView body);

}  // namespace condmon::sync
