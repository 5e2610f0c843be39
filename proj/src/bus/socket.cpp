#include "condmon/bus/socket.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <cstring>

#include "condmon/error.hpp"

namespace condmon::bus {

Endpoint parse_endpoint(const std::string& text) {
  auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0) {
    throw Error(Errc::InvalidArgument, "address must be host:port, got '" + text + "'");
  }
  Endpoint ep;
  ep.host = text.substr(0, colon);
  const char* first = text.data() + colon + 1;
  const char* last = text.data() + text.size();
  auto [p, ec] = std::from_chars(first, last, ep.port);
  if (ec != std::errc{} || p != last || first == last) {
    throw Error(Errc::InvalidArgument, "bad port in '" + text + "'");
  }
  return ep;
}

std::string default_broker_address() {
  const char* env = std::getenv(kBrokerEnvVar);
  return env && *env ? std::string(env) : std::string(kDefaultAddress);
}

void Fd::reset() {
  if (fd_ >= 0) ::close(fd_);
  fd_ = -1;
}

namespace {

sockaddr_in resolve(const Endpoint& ep, Errc err) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(ep.port);
  std::string host = ep.host == "localhost" ? "127.0.0.1" : ep.host;
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) == 1) return addr;
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (::getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0 || !res) {
    throw Error(err, "cannot resolve host '" + ep.host + "'");
  }
  addr.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
  ::freeaddrinfo(res);
  return addr;
}

}  // namespace

Fd listen_tcp(const Endpoint& ep, std::uint16_t* bound_port) {
  auto addr = resolve(ep, Errc::BindFailed);
  Fd fd(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
  if (!fd) throw Error(Errc::BindFailed, std::strerror(errno));
  int one = 1;
  ::setsockopt(fd.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  if (::bind(fd.get(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    throw Error(Errc::BindFailed, ep.host + ":" + std::to_string(ep.port) + ": " + std::strerror(errno));
  }
  if (::listen(fd.get(), 64) != 0) throw Error(Errc::BindFailed, std::strerror(errno));
  if (bound_port) {
    sockaddr_in actual{};
    socklen_t len = sizeof actual;
    ::getsockname(fd.get(), reinterpret_cast<sockaddr*>(&actual), &len);
    *bound_port = ntohs(actual.sin_port);
  }
  return fd;
}

Fd connect_tcp(const Endpoint& ep) {
  auto addr = resolve(ep, Errc::BrokerDisconnected);
  Fd fd(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
  if (!fd) throw Error(Errc::BrokerDisconnected, std::strerror(errno));
  if (::connect(fd.get(), reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    throw Error(Errc::BrokerDisconnected,
                "connect " + ep.host + ":" + std::to_string(ep.port) + ": " + std::strerror(errno));
  }
  int one = 1;
  ::setsockopt(fd.get(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return fd;
}

void set_nonblocking(int fd) {
  int flags = ::fcntl(fd, F_GETFL, 0);
  ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

}  // namespace condmon::bus
