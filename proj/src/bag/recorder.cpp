#include "condmon/bag/recorder.hpp"

#include <set>

#include "condmon/bus/client.hpp"
#include "condmon/error.hpp"

namespace condmon::bag {

Recorder::Recorder(std::string path, RecordOptions opts) : path_(std::move(path)), opts_(std::move(opts)) {}

void Recorder::request_stop(bool drain) {
  drain_ = drain;
  stop_ = true;
}

RecordStats Recorder::run(const std::function<void()>& on_ready) {
  bus::Client client(opts_.broker);
  client.subscribe(opts_.pattern, opts_.queue_capacity);
  client.sync();

  Writer writer(path_, opts_.writer);
  RecordStats stats;
  std::set<std::string> known;
  const auto started = std::chrono::steady_clock::now();

  auto store = [&](const StampedMessage& m) {
    if (!known.count(m.stream)) {
      if (const auto* d = client.descriptor(m.stream)) writer.advertise(*d);
      known.insert(m.stream);
    }
    try {
      writer.publish(m);
      ++stats.messages;
    } catch (const Error& e) {
      if (e.code() != Errc::OutOfOrder) throw;
      ++stats.rejected;
    }
  };
  auto limit_reached = [&] { return opts_.max_messages && stats.messages >= *opts_.max_messages; };

  if (on_ready) on_ready();
  try {
    while (!stop_ && !limit_reached()) {
      if (opts_.max_duration && std::chrono::steady_clock::now() - started >= *opts_.max_duration) break;
      if (auto m = client.receive(std::chrono::milliseconds(100))) store(*m);
      writer.tick();
    }
    if (stop_ && drain_) {
      client.sync();
      while (!limit_reached()) {
        auto m = client.receive(std::chrono::milliseconds(0));
        if (!m) break;
        store(*m);
      }
    }
  } catch (const Error& e) {
    if (e.code() == Errc::BrokerDisconnected) writer.close();
    throw;
  }
  writer.close();
  return stats;
}

}  // namespace condmon::bag
