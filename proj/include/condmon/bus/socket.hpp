#pragma once

#include <cstdint>
#include <string>
#include <utility>

namespace condmon::bus {

inline constexpr const char* kDefaultAddress = "127.0.0.1:7447";
inline constexpr const char* kBrokerEnvVar = "CONDMON_BROKER";

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;
};

// "host:port"; throws InvalidArgument.
Endpoint parse_endpoint(const std::string& text);

// Client target: $CONDMON_BROKER when set, otherwise the default address.
std::string default_broker_address();

// Owning file descriptor.
class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(Fd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Fd& operator=(Fd&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  ~Fd() { reset(); }

  int get() const { return fd_; }
  explicit operator bool() const { return fd_ >= 0; }
  void reset();

 private:
  int fd_ = -1;
};

// Throws BindFailed.
Fd listen_tcp(const Endpoint& ep, std::uint16_t* bound_port = nullptr);
// Throws BrokerDisconnected.
Fd connect_tcp(const Endpoint& ep);
void set_nonblocking(int fd);

}  // namespace condmon::bus
