#include "condmon/bus/broker.hpp"

#include <fcntl.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>

#include "condmon/bus/frame.hpp"
#include "condmon/error.hpp"

namespace condmon::bus {

namespace {

using SteadyClock = std::chrono::steady_clock;

constexpr std::size_t kOutLowWater = 64 * 1024;
constexpr std::size_t kDrainChunk = 256 * 1024;

}  // namespace

struct Broker::Connection {
  ConnId id = 0;
  Fd fd;
  FrameDecoder decoder;
  Bytes out;
  std::size_t out_pos = 0;
  SteadyClock::time_point last_rx;
  SteadyClock::time_point last_ping;

  std::size_t pending_out() const { return out.size() - out_pos; }
};

Broker::Broker(BrokerOptions opts) : opts_(std::move(opts)) {
  listen_fd_ = listen_tcp(parse_endpoint(opts_.listen), &port_);
  set_nonblocking(listen_fd_.get());
  int p[2];
  if (::pipe2(p, O_CLOEXEC | O_NONBLOCK) != 0) throw Error(Errc::IoError, "pipe2 failed");
  wake_read_ = Fd(p[0]);
  wake_write_ = Fd(p[1]);
}

Broker::~Broker() { stop(); }

std::string Broker::address() const {
  return parse_endpoint(opts_.listen).host + ":" + std::to_string(port_);
}

void Broker::start() {
  thread_ = std::thread([this] { run(); });
}

void Broker::stop() {
  stopping_ = true;
  if (wake_write_) {
    char c = 1;
    [[maybe_unused]] auto n = ::write(wake_write_.get(), &c, 1);
  }
  if (thread_.joinable() && thread_.get_id() != std::this_thread::get_id()) thread_.join();
}

void Broker::send_control(Connection& c, FrameKind kind, ByteView body) {
  auto f = encode_frame(kind, body);
  c.out.insert(c.out.end(), f.begin(), f.end());
}

void Broker::run() {
  std::vector<pollfd> fds;
  while (!stopping_) {
    fds.clear();
    fds.push_back({listen_fd_.get(), POLLIN, 0});
    fds.push_back({wake_read_.get(), POLLIN, 0});
    {
      std::lock_guard lock(mu_);
      for (auto& c : conns_) {
        if (c->pending_out() < kOutLowWater) router_.drain(c->id, c->out, kDrainChunk);
        short ev = POLLIN;
        if (c->pending_out() > 0) ev |= POLLOUT;
        fds.push_back({c->fd.get(), ev, 0});
      }
    }
    int n = ::poll(fds.data(), fds.size(), 200);
    if (n < 0 && errno != EINTR) break;
    if (stopping_) break;
    if (fds[1].revents & POLLIN) {
      char buf[64];
      while (::read(wake_read_.get(), buf, sizeof buf) > 0) {
      }
    }

    std::lock_guard lock(mu_);
    const auto now = SteadyClock::now();
    // Connections accepted below are not in `fds` yet; only walk known ones.
    const std::size_t known = fds.size() - 2;
    std::vector<std::size_t> dead;
    for (std::size_t i = 0; i < known; ++i) {
      auto& c = *conns_[i];
      const auto rev = fds[i + 2].revents;
      bool alive = true;
      if (rev & (POLLIN | POLLHUP | POLLERR)) alive = read_ready(c);
      if (alive && (rev & POLLOUT)) alive = write_ready(c);
      if (alive && now - c.last_rx > opts_.idle_timeout) alive = false;
      if (alive && now - c.last_rx > opts_.ping_interval && now - c.last_ping > opts_.ping_interval) {
        send_control(c, FrameKind::Ping, {});
        c.last_ping = now;
      }
      if (!alive) dead.push_back(i);
    }
    for (auto it = dead.rbegin(); it != dead.rend(); ++it) close_connection(*it);
    if (fds[0].revents & POLLIN) accept_ready();
  }
  std::lock_guard lock(mu_);
  // Best-effort flush of what is already committed before closing.
  for (auto& c : conns_) {
    router_.drain(c->id, c->out, kDrainChunk);
    ::send(c->fd.get(), c->out.data() + c->out_pos, c->pending_out(), MSG_NOSIGNAL | MSG_DONTWAIT);
  }
  while (!conns_.empty()) close_connection(conns_.size() - 1);
}

void Broker::accept_ready() {
  while (true) {
    int fd = ::accept4(listen_fd_.get(), nullptr, nullptr, SOCK_NONBLOCK | SOCK_CLOEXEC);
    if (fd < 0) return;
    auto c = std::make_unique<Connection>();
    c->id = next_conn_++;
    c->fd = Fd(fd);
    c->last_rx = c->last_ping = SteadyClock::now();
    conns_.push_back(std::move(c));
    stats_.connections = conns_.size();
  }
}

bool Broker::read_ready(Connection& c) {
  std::uint8_t buf[65536];
  while (true) {
    auto n = ::recv(c.fd.get(), buf, sizeof buf, 0);
    if (n == 0) return false;
    if (n < 0) return errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR;
    c.last_rx = SteadyClock::now();
    c.decoder.feed(ByteView(buf, static_cast<std::size_t>(n)));
    try {
      while (auto f = c.decoder.next()) handle_frame(c, std::move(*f));
    } catch (const Error& e) {
      // Corrupt framing: the stream cannot be resynchronised.
      ++stats_.rejected;
      std::fprintf(stderr, "condmon broker: closing connection %llu: %s\n",
                   static_cast<unsigned long long>(c.id), e.what());
      return false;
    }
  }
}

bool Broker::write_ready(Connection& c) {
  while (c.pending_out() > 0) {
    auto n = ::send(c.fd.get(), c.out.data() + c.out_pos, c.pending_out(), MSG_NOSIGNAL | MSG_DONTWAIT);
    if (n < 0) return errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR;
    c.out_pos += static_cast<std::size_t>(n);
  }
  c.out.clear();
  c.out_pos = 0;
  return true;
}

void Broker::handle_frame(Connection& c, Frame&& f) {
  ++stats_.frames_in;
  try {
    switch (f.kind) {
      case FrameKind::Advertise: {
        auto desc = decode_advertise(f.body);
        auto targets = router_.advertise(c.id, desc);
        auto body = encode_advertise(desc);
        for (auto target : targets) {
          for (auto& other : conns_) {
            if (other->id == target) send_control(*other, FrameKind::Advertise, body);
          }
        }
        break;
      }
      case FrameKind::Subscribe: {
        auto req = decode_subscribe(f.body);
        router_.subscribe(c.id, req.pattern,
                          req.queue_capacity ? req.queue_capacity : opts_.default_queue_capacity);
        for (const auto& desc : router_.streams_matching(req.pattern)) {
          send_control(c, FrameKind::Advertise, encode_advertise(desc));
        }
        break;
      }
      case FrameKind::Unsubscribe:
        router_.unsubscribe(c.id, decode_topic(f.body));
        break;
      case FrameKind::Publish: {
        auto msg = decode_publish(f.body);
        auto frame = std::make_shared<const Bytes>(encode_frame(FrameKind::Publish, f.body));
        router_.route(c.id, msg.stream, msg.stamp, msg.seq, std::move(frame));
        break;
      }
      case FrameKind::Ping:
        // Everything queued for this client goes out ahead of the PONG.
        while (router_.drain(c.id, c.out, kDrainChunk) > 0) {
        }
        send_control(c, FrameKind::Pong, {});
        break;
      case FrameKind::Pong:
        break;
    }
  } catch (const Error& e) {
    if (e.code() == Errc::BadMagic || e.code() == Errc::UnsupportedVersion) throw;
    ++stats_.rejected;
    std::fprintf(stderr, "condmon broker: rejected frame from connection %llu: %s\n",
                 static_cast<unsigned long long>(c.id), e.what());
  }
}

void Broker::close_connection(std::size_t index) {
  router_.remove_connection(conns_[index]->id);
  conns_.erase(conns_.begin() + static_cast<std::ptrdiff_t>(index));
  stats_.connections = conns_.size();
}

std::vector<StreamStatus> Broker::stream_status() const {
  std::lock_guard lock(mu_);
  std::vector<StreamStatus> out;
  for (const auto& [id, e] : router_.streams()) {
    out.push_back({e.desc, e.online, e.first_seen, e.last_seen, e.published});
  }
  return out;
}

BrokerStats Broker::stats() const {
  std::lock_guard lock(mu_);
  auto s = stats_;
  s.dropped = router_.total_dropped();
  return s;
}

}  // namespace condmon::bus
