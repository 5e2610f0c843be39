#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "condmon/bus/frame.hpp"
#include "condmon/bus/router.hpp"
#include "condmon/bus/socket.hpp"

namespace condmon::bus {

struct BrokerOptions {
  std::string listen = kDefaultAddress;  // port 0 picks an ephemeral port
  std::chrono::milliseconds ping_interval{2000};
  std::chrono::milliseconds idle_timeout{10000};
  std::size_t default_queue_capacity = Router::kDefaultQueueCapacity;
};

struct StreamStatus {
  StreamDescriptor desc;
  bool online = false;
  std::optional<Timestamp> first_seen;
  std::optional<Timestamp> last_seen;
  std::uint64_t published = 0;
};

struct BrokerStats {
  std::size_t connections = 0;
  std::uint64_t frames_in = 0;
  std::uint64_t dropped = 0;  // over live subscriptions
  std::uint64_t rejected = 0;  // bad frames, unknown streams, bad patterns
};

// Single-threaded poll(2) broker. Binds in the constructor so bind errors
// surface before run().
class Broker {
 public:
  explicit Broker(BrokerOptions opts = {});
  ~Broker();
  Broker(const Broker&) = delete;
  Broker& operator=(const Broker&) = delete;

  std::uint16_t port() const { return port_; }
  std::string address() const;

  void run();    // blocks until stop()
  void start();  // run() on a background thread
  void stop();   // thread-safe, idempotent; joins the background thread

  std::vector<StreamStatus> stream_status() const;
  BrokerStats stats() const;

 private:
  struct Connection;

  void accept_ready();
  bool read_ready(Connection& c);
  bool write_ready(Connection& c);
  void handle_frame(Connection& c, Frame&& f);
  void close_connection(std::size_t index);
  void send_control(Connection& c, FrameKind kind, ByteView body);

  BrokerOptions opts_;
  Fd listen_fd_;
  Fd wake_read_, wake_write_;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread thread_;

  mutable std::mutex mu_;  // guards router_ and stats_ against observers
  Router router_;
  BrokerStats stats_;
  std::vector<std::unique_ptr<Connection>> conns_;
  ConnId next_conn_ = 1;
};

}  // namespace condmon::bus
