#pragma once

#include <chrono>
#include <deque>
#include <map>
#include <optional>
#include <string>

#include "condmon/bus/frame.hpp"
#include "condmon/bus/socket.hpp"
#include "condmon/sink.hpp"

namespace condmon::bus {

// Blocking client connection to a broker. One context at a time; the handle
// may be moved between threads.
class Client final : public MessageSink {
 public:
  // Connects to `address` ("host:port"), or default_broker_address() when empty.
  // Throws BrokerDisconnected.
  explicit Client(const std::string& address = {});

  void advertise(const StreamDescriptor& desc) override;
  void publish(const StampedMessage& msg) override;
  void subscribe(const std::string& pattern, std::uint32_t queue_capacity = 0);
  void unsubscribe(const std::string& pattern);

  // Next delivered message, or nullopt on timeout. Answers broker PINGs and
  // records ADVERTISE descriptors as a side effect. Throws BrokerDisconnected.
  std::optional<StampedMessage> receive(std::chrono::milliseconds timeout);

  // Round-trips a PING. On return the broker has processed every frame sent
  // before the call and all messages queued for this client have been read
  // (they stay buffered for receive()).
  void sync(std::chrono::milliseconds timeout = std::chrono::seconds(10));

  // Descriptor announced by the broker for a subscribed stream.
  const StreamDescriptor* descriptor(const std::string& topic) const;
  const std::map<std::string, StreamDescriptor>& descriptors() const { return descriptors_; }

 private:
  void send_frame(FrameKind kind, ByteView body);
  // Reads whatever arrives within `timeout`; returns false on timeout.
  bool pump(std::chrono::milliseconds timeout);
  void handle(Frame&& f);
  void keepalive();

  Fd fd_;
  FrameDecoder decoder_;
  std::deque<StampedMessage> inbox_;
  std::map<std::string, StreamDescriptor> descriptors_;
  std::uint64_t pongs_ = 0;
  std::chrono::steady_clock::time_point last_tx_;
};

}  // namespace condmon::bus
