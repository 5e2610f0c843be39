#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <optional>
#include <string>

#include "condmon/bag/writer.hpp"

namespace condmon::bag {

struct RecordOptions {
  std::string pattern = "**";
  std::string broker;  // empty: default_broker_address()
  std::uint32_t queue_capacity = 1u << 20;
  std::optional<std::uint64_t> max_messages;
  std::optional<std::chrono::milliseconds> max_duration;
  WriterOptions writer;
};

struct RecordStats {
  std::uint64_t messages = 0;
  std::uint64_t rejected = 0;  // stamps going backwards on a stream
};

// Subscribes to the broker and appends every delivery to a bag until
// stopped. On a clean stop the bag is closed with its index; when the broker
// disconnects the bag is closed as well and BrokerDisconnected is rethrown.
class Recorder {
 public:
  Recorder(std::string path, RecordOptions opts);

  // `on_ready` fires once the subscription is active at the broker.
  RecordStats run(const std::function<void()>& on_ready = {});

  // Thread-safe. With drain=true the recorder first collects everything the
  // broker has already queued for it.
  void request_stop(bool drain = true);

 private:
  std::string path_;
  RecordOptions opts_;
  std::atomic<bool> stop_{false};
  std::atomic<bool> drain_{true};
};

}  // namespace condmon::bag
