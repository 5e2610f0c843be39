#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "condmon/bytes.hpp"
#include "condmon/stream.hpp"

namespace condmon::bus {

using ConnId = std::uint64_t;
using SubId = std::uint64_t;

// A routed PUBLISH frame, shared between every queue it lands in.
struct Queued {
  std::uint64_t order = 0;  // global routing order
  std::shared_ptr<const Bytes> frame;
};

struct Subscription {
  SubId id = 0;
  ConnId conn = 0;
  std::string pattern;
  std::size_t queue_capacity = 1;
  std::deque<Queued> queue;
  std::uint64_t delivered = 0;  // enqueued, including ones later dropped
  std::uint64_t dropped = 0;
};

struct StreamEntry {
  StreamDescriptor desc;
  ConnId owner = 0;
  bool online = true;
  std::optional<Timestamp> first_seen;
  std::optional<Timestamp> last_seen;
  std::uint64_t last_seq = 0;
  std::uint64_t published = 0;
};

// Broker routing state: stream registry plus bounded drop-oldest
// subscription queues. Transport-free; the socket broker drives it from a
// single thread, which serialises subscribe/unsubscribe against route.
class Router {
 public:
  static constexpr std::size_t kDefaultQueueCapacity = 1024;

  // Registers (or re-registers) a stream for `conn`. Returns the distinct
  // connections holding a matching subscription.
  std::vector<ConnId> advertise(ConnId conn, const StreamDescriptor& desc);

  // Throws BadPattern. capacity 0 selects the default.
  SubId subscribe(ConnId conn, const std::string& pattern, std::size_t capacity = 0);
  std::size_t unsubscribe(ConnId conn, const std::string& pattern);

  // Streams whose id matches `pattern`, in id order.
  std::vector<StreamDescriptor> streams_matching(const std::string& pattern) const;

  // Enqueues `frame` (an encoded PUBLISH frame for `msg_topic`) on every
  // matching subscription. Full queues drop their oldest entry. Throws
  // UnknownStream when `conn` never advertised the topic.
  std::vector<SubId> route(ConnId conn, const std::string& msg_topic, Timestamp stamp,
                           std::uint64_t seq, std::shared_ptr<const Bytes> frame);
  std::vector<SubId> route(ConnId conn, const StampedMessage& msg);

  // Pops queued frames of all of `conn`'s subscriptions in routing order,
  // stopping once `max_bytes` have been appended (at least one frame is
  // taken when any is pending).
  std::size_t drain(ConnId conn, Bytes& out, std::size_t max_bytes);
  std::optional<Queued> pop(SubId sub);

  // Drops the connection's subscriptions and marks its streams offline.
  void remove_connection(ConnId conn);

  const Subscription* subscription(SubId id) const;
  const std::map<std::string, StreamEntry>& streams() const { return streams_; }
  bool has_pending(ConnId conn) const;
  std::uint64_t total_dropped() const;

 private:
  std::map<std::string, StreamEntry> streams_;
  std::map<SubId, Subscription> subs_;
  SubId next_sub_ = 1;
  std::uint64_t next_order_ = 0;
};

}  // namespace condmon::bus
