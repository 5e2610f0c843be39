#include "condmon/bus/router.hpp"

#include <algorithm>
#include <set>

#include "condmon/bus/frame.hpp"
#include "condmon/bus/topic.hpp"
#include "condmon/error.hpp"

namespace condmon::bus {

std::vector<ConnId> Router::advertise(ConnId conn, const StreamDescriptor& desc) {
  desc.validate();
  auto& entry = streams_[desc.id];
  entry.desc = desc;
  entry.owner = conn;
  entry.online = true;
  std::set<ConnId> targets;
  for (const auto& [id, sub] : subs_) {
    if (match_topic(sub.pattern, desc.id)) targets.insert(sub.conn);
  }
  return {targets.begin(), targets.end()};
}

SubId Router::subscribe(ConnId conn, const std::string& pattern, std::size_t capacity) {
  if (!is_valid_pattern(pattern)) throw Error(Errc::BadPattern, "'" + pattern + "'");
  Subscription s;
  s.id = next_sub_++;
  s.conn = conn;
  s.pattern = pattern;
  s.queue_capacity = capacity == 0 ? kDefaultQueueCapacity : capacity;
  auto id = s.id;
  subs_.emplace(id, std::move(s));
  return id;
}

std::size_t Router::unsubscribe(ConnId conn, const std::string& pattern) {
  return std::erase_if(subs_, [&](const auto& kv) {
    return kv.second.conn == conn && kv.second.pattern == pattern;
  });
}

std::vector<StreamDescriptor> Router::streams_matching(const std::string& pattern) const {
  std::vector<StreamDescriptor> out;
  for (const auto& [id, entry] : streams_) {
    if (match_topic(pattern, id)) out.push_back(entry.desc);
  }
  return out;
}

std::vector<SubId> Router::route(ConnId conn, const std::string& msg_topic, Timestamp stamp,
                                 std::uint64_t seq, std::shared_ptr<const Bytes> frame) {
  auto it = streams_.find(msg_topic);
  if (it == streams_.end() || it->second.owner != conn) {
    throw Error(Errc::UnknownStream, "'" + msg_topic + "' was not advertised by this client");
  }
  auto& entry = it->second;
  if (!entry.first_seen) entry.first_seen = stamp;
  entry.last_seen = stamp;
  entry.last_seq = seq;
  entry.online = true;
  ++entry.published;

  std::vector<SubId> recipients;
  const auto order = next_order_++;
  for (auto& [id, sub] : subs_) {
    if (!match_topic(sub.pattern, msg_topic)) continue;
    if (sub.queue.size() >= sub.queue_capacity) {
      sub.queue.pop_front();
      ++sub.dropped;
    }
    sub.queue.push_back({order, frame});
    ++sub.delivered;
    recipients.push_back(id);
  }
  return recipients;
}

std::vector<SubId> Router::route(ConnId conn, const StampedMessage& msg) {
  auto frame = std::make_shared<const Bytes>(encode_frame(FrameKind::Publish, encode_publish(msg)));
  return route(conn, msg.stream, msg.stamp, msg.seq, std::move(frame));
}

std::size_t Router::drain(ConnId conn, Bytes& out, std::size_t max_bytes) {
  std::vector<Subscription*> mine;
  for (auto& [id, sub] : subs_) {
    if (sub.conn == conn && !sub.queue.empty()) mine.push_back(&sub);
  }
  std::size_t written = 0, frames = 0;
  while (!mine.empty()) {
    auto best = std::min_element(mine.begin(), mine.end(), [](auto* a, auto* b) {
      return a->queue.front().order < b->queue.front().order;
    });
    auto& q = (*best)->queue;
    const auto& frame = *q.front().frame;
    if (frames > 0 && written + frame.size() > max_bytes) break;
    out.insert(out.end(), frame.begin(), frame.end());
    written += frame.size();
    ++frames;
    q.pop_front();
    if (q.empty()) mine.erase(best);
  }
  return frames;
}

std::optional<Queued> Router::pop(SubId sub) {
  auto it = subs_.find(sub);
  if (it == subs_.end() || it->second.queue.empty()) return std::nullopt;
  auto q = std::move(it->second.queue.front());
  it->second.queue.pop_front();
  return q;
}

void Router::remove_connection(ConnId conn) {
  std::erase_if(subs_, [&](const auto& kv) { return kv.second.conn == conn; });
  for (auto& [id, entry] : streams_) {
    if (entry.owner == conn) entry.online = false;
  }
}

const Subscription* Router::subscription(SubId id) const {
  auto it = subs_.find(id);
  return it == subs_.end() ? nullptr : &it->second;
}

bool Router::has_pending(ConnId conn) const {
  return std::any_of(subs_.begin(), subs_.end(), [&](const auto& kv) {
    return kv.second.conn == conn && !kv.second.queue.empty();
  });
}

std::uint64_t Router::total_dropped() const {
  std::uint64_t n = 0;
  for (const auto& [id, sub] : subs_) n += sub.dropped;
  return n;
}

}  // namespace condmon::bus
