#include "condmon/bus/client.hpp"

#include <poll.h>
#include <sys/socket.h>

#include <cerrno>
#include <cstring>

#include "condmon/error.hpp"

namespace condmon::bus {

namespace {
constexpr auto kPingInterval = std::chrono::seconds(2);
}

Client::Client(const std::string& address)
    : fd_(connect_tcp(parse_endpoint(address.empty() ? default_broker_address() : address))),
      last_tx_(std::chrono::steady_clock::now()) {}

void Client::send_frame(FrameKind kind, ByteView body) {
  auto bytes = encode_frame(kind, body);
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    auto n = ::send(fd_.get(), bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(Errc::BrokerDisconnected, std::strerror(errno));
    }
    sent += static_cast<std::size_t>(n);
  }
  last_tx_ = std::chrono::steady_clock::now();
}

void Client::advertise(const StreamDescriptor& desc) {
  desc.validate();
  send_frame(FrameKind::Advertise, encode_advertise(desc));
}

void Client::publish(const StampedMessage& msg) { send_frame(FrameKind::Publish, encode_publish(msg)); }

void Client::subscribe(const std::string& pattern, std::uint32_t queue_capacity) {
  send_frame(FrameKind::Subscribe, encode_subscribe({pattern, queue_capacity}));
}

void Client::unsubscribe(const std::string& pattern) {
  send_frame(FrameKind::Unsubscribe, encode_topic(pattern));
}

void Client::keepalive() {
  if (std::chrono::steady_clock::now() - last_tx_ >= kPingInterval) send_frame(FrameKind::Ping, {});
}

void Client::handle(Frame&& f) {
  switch (f.kind) {
    case FrameKind::Publish: {
      auto msg = decode_publish(f.body);
      if (auto it = descriptors_.find(msg.stream); it != descriptors_.end()) {
        msg.replayed = it->second.replayed();
      }
      inbox_.push_back(std::move(msg));
      break;
    }
    case FrameKind::Advertise: {
      auto d = decode_advertise(f.body);
      descriptors_[d.id] = d;
      break;
    }
    case FrameKind::Ping:
      send_frame(FrameKind::Pong, {});
      break;
    case FrameKind::Pong:
      ++pongs_;
      break;
    default:
      break;
  }
}

bool Client::pump(std::chrono::milliseconds timeout) {
  pollfd p{fd_.get(), POLLIN, 0};
  int n = ::poll(&p, 1, static_cast<int>(timeout.count()));
  if (n < 0) {
    if (errno == EINTR) return false;
    throw Error(Errc::BrokerDisconnected, std::strerror(errno));
  }
  if (n == 0) return false;
  std::uint8_t buf[65536];
  auto r = ::recv(fd_.get(), buf, sizeof buf, 0);
  if (r == 0) throw Error(Errc::BrokerDisconnected, "broker closed the connection");
  if (r < 0) {
    if (errno == EINTR || errno == EAGAIN) return false;
    throw Error(Errc::BrokerDisconnected, std::strerror(errno));
  }
  decoder_.feed(ByteView(buf, static_cast<std::size_t>(r)));
  while (auto f = decoder_.next()) handle(std::move(*f));
  return true;
}

std::optional<StampedMessage> Client::receive(std::chrono::milliseconds timeout) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (inbox_.empty()) {
    keepalive();
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) break;
    pump(std::min<std::chrono::milliseconds>(left, kPingInterval));
  }
  if (inbox_.empty()) return std::nullopt;
  auto m = std::move(inbox_.front());
  inbox_.pop_front();
  return m;
}

void Client::sync(std::chrono::milliseconds timeout) {
  const auto target = pongs_ + 1;
  send_frame(FrameKind::Ping, {});
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (pongs_ < target) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) throw Error(Errc::BrokerDisconnected, "no PONG within timeout");
    pump(left);
  }
}

const StreamDescriptor* Client::descriptor(const std::string& topic) const {
  auto it = descriptors_.find(topic);
  return it == descriptors_.end() ? nullptr : &it->second;
}

}  // namespace condmon::bus
