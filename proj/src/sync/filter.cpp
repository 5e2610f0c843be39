#include "condmon/sync/filter.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <set>

#include "condmon/error.hpp"

namespace condmon::sync {

namespace {

SyncedTuple make_tuple(std::vector<StampedMessage> members) {
  SyncedTuple t;
  auto [lo, hi] = std::minmax_element(members.begin(), members.end(),
                                      [](const auto& a, const auto& b) { return a.stamp < b.stamp; });
  t.pivot_stamp = hi->stamp;
  t.spread_ns = timestamp_diff(hi->stamp, lo->stamp);
  t.messages = std::move(members);
  return t;
}

bool all_nonempty(const SyncState& s) {
  return !s.queues.empty() &&
         std::none_of(s.queues.begin(), s.queues.end(), [](const auto& q) { return q.empty(); });
}

}  // namespace

SyncState::SyncState(std::vector<std::string> stream_ids, SyncPolicy p, std::size_t bound)
    : streams(std::move(stream_ids)), queues(streams.size()), policy(p), queue_bound(bound) {
  if (streams.empty()) throw Error(Errc::InvalidArgument, "sync filter needs at least one stream");
  if (queue_bound == 0) throw Error(Errc::InvalidArgument, "queue bound must be positive");
  if (auto* a = std::get_if<ApproximateTime>(&policy); a && a->slop_ns < 0) {
    throw Error(Errc::InvalidArgument, "slop must be non-negative");
  }
  std::set<std::string> unique(streams.begin(), streams.end());
  if (unique.size() != streams.size()) throw Error(Errc::InvalidArgument, "duplicate stream in filter");
}

int SyncState::index_of(std::string_view stream) const {
  for (std::size_t i = 0; i < streams.size(); ++i) {
    if (streams[i] == stream) return static_cast<int>(i);
  }
  return -1;
}

std::vector<SyncedTuple> exact_match(SyncState& state) {
  std::vector<SyncedTuple> out;
  while (all_nonempty(state)) {
    // Smallest stamp present in every queue.
    std::optional<Timestamp> common;
    for (const auto& m : state.queues[0]) {
      bool everywhere = std::all_of(state.queues.begin() + 1, state.queues.end(), [&](const auto& q) {
        return std::binary_search(q.begin(), q.end(), m, [](const auto& a, const auto& b) {
          return a.stamp < b.stamp;
        });
      });
      if (everywhere) {
        common = m.stamp;
        break;
      }
    }
    if (!common) {
      // Anything older than the newest head has no partner on that stream.
      Timestamp newest = state.queues[0].front().stamp;
      for (const auto& q : state.queues) newest = std::max(newest, q.front().stamp);
      for (auto& q : state.queues) {
        while (!q.empty() && q.front().stamp < newest) {
          q.pop_front();
          ++state.counters.discarded;
        }
      }
      if (!all_nonempty(state)) break;
      // Heads now all sit at or above `newest`; loop again only if they agree.
      bool agree = std::all_of(state.queues.begin(), state.queues.end(),
                               [&](const auto& q) { return q.front().stamp == newest; });
      if (!agree) break;
      continue;
    }
    std::vector<StampedMessage> members;
    for (auto& q : state.queues) {
      while (q.front().stamp < *common) {
        q.pop_front();
        ++state.counters.discarded;
      }
      members.push_back(std::move(q.front()));
      q.pop_front();
    }
    auto t = make_tuple(std::move(members));
    assert(t.spread_ns == 0);
    ++state.counters.emitted;
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<SyncedTuple> approx_match(SyncState& state) {
  const auto* policy = std::get_if<ApproximateTime>(&state.policy);
  const std::int64_t slop = policy ? policy->slop_ns : 0;
  std::vector<SyncedTuple> out;
  while (all_nonempty(state)) {
    std::size_t oldest = 0;
    Timestamp lo = state.queues[0].front().stamp, hi = lo;
    for (std::size_t i = 1; i < state.queues.size(); ++i) {
      const auto s = state.queues[i].front().stamp;
      if (s < lo) {
        lo = s;
        oldest = i;
      }
      hi = std::max(hi, s);
    }
    if (timestamp_diff(hi, lo) > slop) {
      // Every later message on the pivot stream is >= hi, so the oldest head
      // can never sit in a tuple within slop.
      state.queues[oldest].pop_front();
      ++state.counters.discarded;
      continue;
    }
    std::vector<StampedMessage> members;
    members.reserve(state.queues.size());
    for (auto& q : state.queues) {
      members.push_back(std::move(q.front()));
      q.pop_front();
    }
    auto t = make_tuple(std::move(members));
    assert(t.spread_ns <= slop);
    ++state.counters.emitted;
    out.push_back(std::move(t));
  }
  return out;
}

SyncFilter::SyncFilter(std::vector<std::string> streams, SyncPolicy policy, std::size_t queue_bound)
    : state_(std::move(streams), policy, queue_bound), last_accepted_(state_.streams.size()) {}

std::vector<SyncedTuple> SyncFilter::push(StampedMessage msg) {
  const int idx = state_.index_of(msg.stream);
  if (idx < 0) throw Error(Errc::UnknownStream, "'" + msg.stream + "' is not part of this filter");
  auto& last = last_accepted_[static_cast<std::size_t>(idx)];
  if (last && msg.stamp <= *last) {
    ++state_.counters.out_of_order;
    throw Error(Errc::OutOfOrder, msg.stream + " stamp " + to_string(msg.stamp) +
                                      " does not follow " + to_string(*last));
  }
  last = msg.stamp;
  auto& q = state_.queues[static_cast<std::size_t>(idx)];
  if (q.size() >= state_.queue_bound) {
    q.pop_front();
    ++state_.counters.overflow;
  }
  q.push_back(std::move(msg));
  return std::holds_alternative<ExactTime>(state_.policy) ? exact_match(state_) : approx_match(state_);
}

std::int64_t default_slop_ns(std::span<const double> nominal_rates_hz) {
  if (nominal_rates_hz.empty()) throw Error(Errc::InvalidArgument, "no stream rates");
  double slowest = *std::min_element(nominal_rates_hz.begin(), nominal_rates_hz.end());
  if (!(slowest > 0)) throw Error(Errc::InvalidArgument, "rates must be positive");
  return static_cast<std::int64_t>(0.5e9 / slowest);
}

StampedMessage to_synced_message(const SyncedTuple& tuple, const std::string& filter_name,
                                 std::uint64_t seq) {
  StampedMessage m;
  m.stream = "synced/" + filter_name;
  m.stamp = tuple.pivot_stamp;
  m.seq = seq;
  ByteWriter w(m.payload);
  w.u16(static_cast<std::uint16_t>(tuple.messages.size()));
  for (const auto& member : tuple.messages) {
    w.u16(static_cast<std::uint16_t>(member.stream.size()));
    w.raw(member.stream);
    w.u32(static_cast<std::uint32_t>(member.payload.size()));
    w.raw(member.payload);
  }
  return m;
}

std::vector<std::pair<std::string, Bytes>> decode_synced_body(ByteView body) {
  ByteReader r(body);
  auto n = r.u16();
  if (!n) throw Error(Errc::TruncatedBody, "synced body");
  std::vector<std::pair<std::string, Bytes>> out;
  for (std::uint16_t i = 0; i < *n; ++i) {
    auto idlen = r.u16();
    auto id = idlen ? r.str(*idlen) : std::nullopt;
    auto plen = r.u32();
    auto payload = plen ? r.take(*plen) : std::nullopt;
    if (!id || !payload) throw Error(Errc::TruncatedBody, "synced body member");
    out.emplace_back(std::move(*id), Bytes(payload->begin(), payload->end()));
  }
  return out;
}

}  // namespace condmon::sync
