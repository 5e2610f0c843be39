#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

#include "condmon/sink.hpp"

namespace condmon::bag {

// Timed replay of a recording. Messages keep their original stamps and are
// re-advertised with the replayed flag set. play() runs on one context;
// pause/resume/stop may be called from another.
class Player {
 public:
  // `messages` must be stamp-sorted (as returned by read()). rate > 0.
  Player(std::vector<StampedMessage> messages, std::vector<StreamDescriptor> streams, double rate = 1.0);
  static Player open(const std::string& path, double rate = 1.0);

  // Publishes from the cursor to the end (or until stop()). Inter-message
  // wall gaps are the recorded gaps divided by rate; time spent paused is
  // excluded. Returns the number of messages published by this call.
  std::size_t play(MessageSink& sink);

  void pause();
  void resume();
  void stop();
  bool paused() const;

  double rate() const { return rate_; }
  std::size_t cursor() const { return cursor_.load(); }
  std::size_t size() const { return messages_.size(); }

 private:
  std::vector<StampedMessage> messages_;
  std::vector<StreamDescriptor> streams_;
  double rate_;
  std::atomic<std::size_t> cursor_{0};

  mutable std::mutex mu_;
  std::condition_variable cv_;
  bool paused_ = false;
  bool stopped_ = false;
};

}  // namespace condmon::bag
