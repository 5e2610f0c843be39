#include "condmon/bag/player.hpp"

#include <cmath>
#include <set>

#include "condmon/bag/reader.hpp"
#include "condmon/error.hpp"

namespace condmon::bag {

using SteadyClock = std::chrono::steady_clock;

Player::Player(std::vector<StampedMessage> messages, std::vector<StreamDescriptor> streams, double rate)
    : messages_(std::move(messages)), streams_(std::move(streams)), rate_(rate) {
  if (!(rate_ > 0) || !std::isfinite(rate_)) throw Error(Errc::InvalidArgument, "playback rate must be > 0");
}

Player Player::open(const std::string& path, double rate) {
  auto bag = load(path);
  return Player(sorted_messages(std::move(bag.file_order)), std::move(bag.streams), rate);
}

void Player::pause() {
  std::lock_guard lock(mu_);
  paused_ = true;
}

void Player::resume() {
  {
    std::lock_guard lock(mu_);
    paused_ = false;
  }
  cv_.notify_all();
}

void Player::stop() {
  {
    std::lock_guard lock(mu_);
    stopped_ = true;
  }
  cv_.notify_all();
}

bool Player::paused() const {
  std::lock_guard lock(mu_);
  return paused_;
}

std::size_t Player::play(MessageSink& sink) {
  std::set<std::string> advertised;
  for (auto d : streams_) {
    d.flags |= kFlagReplayed;
    sink.advertise(d);
    advertised.insert(d.id);
  }
  std::size_t published = 0;
  std::size_t i = cursor_.load();
  if (i >= messages_.size()) return 0;

  // Schedule anchor: message `anchor_idx` is due at `anchor_wall`.
  std::size_t anchor_idx = i;
  auto anchor_wall = SteadyClock::now();

  std::unique_lock lock(mu_);
  while (i < messages_.size() && !stopped_) {
    if (paused_) {
      const auto pause_start = SteadyClock::now();
      cv_.wait(lock, [&] { return !paused_ || stopped_; });
      if (stopped_) break;
      // Shift the timeline so time spent paused is excluded.
      anchor_wall += SteadyClock::now() - pause_start;
      continue;
    }
    const auto offset_ns = timestamp_diff(messages_[i].stamp, messages_[anchor_idx].stamp);
    const auto due = anchor_wall + std::chrono::nanoseconds(
                                       static_cast<std::int64_t>(std::llround(offset_ns / rate_)));
    if (SteadyClock::now() < due) {
      cv_.wait_until(lock, due, [&] { return paused_ || stopped_; });
      continue;
    }
    lock.unlock();
    StampedMessage msg = messages_[i];
    msg.replayed = true;
    if (advertised.insert(msg.stream).second) {
      StreamDescriptor d;
      d.id = msg.stream;
      d.kind = infer_kind(msg.stream);
      d.flags = kFlagReplayed;
      sink.advertise(d);
    }
    sink.publish(msg);
    ++published;
    cursor_ = ++i;
    lock.lock();
  }
  return published;
}

}  // namespace condmon::bag
