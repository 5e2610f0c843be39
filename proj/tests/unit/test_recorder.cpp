#include <gtest/gtest.h>

#include <condition_variable>
#include <mutex>
#include <optional>
#include <thread>

#include "condmon/bag/reader.hpp"
#include "condmon/bag/recorder.hpp"
#include "condmon/bus/broker.hpp"
#include "condmon/bus/client.hpp"
#include "condmon/error.hpp"
#include "condmon/stream.hpp"
#include "support/temp_dir.hpp"

using namespace condmon;
using namespace std::chrono_literals;

namespace {

bus::BrokerOptions ephemeral() {
  bus::BrokerOptions o;
  o.listen = "127.0.0.1:0";
  return o;
}

// Runs a recorder on its own thread and waits until it is subscribed.
class Session {
 public:
  Session(const std::string& path, bag::RecordOptions opts) : rec_(path, std::move(opts)) {
    thread_ = std::thread([this] {
      try {
        stats_ = rec_.run([this] {
          std::lock_guard l(mu_);
          ready_ = true;
          cv_.notify_all();
        });
      } catch (const Error& e) {
        error_ = e.code();
      }
      std::lock_guard l(mu_);
      ready_ = true;
      cv_.notify_all();
    });
    std::unique_lock l(mu_);
    cv_.wait(l, [this] { return ready_; });
  }
  bag::RecordStats finish() {
    rec_.request_stop(true);
    thread_.join();
    return stats_;
  }
  std::optional<Errc> join() {
    thread_.join();
    return error_;
  }

 private:
  bag::Recorder rec_;
  std::thread thread_;
  std::mutex mu_;
  std::condition_variable cv_;
  bool ready_ = false;
  bag::RecordStats stats_;
  std::optional<Errc> error_;
};

}  // namespace

TEST(Recorder, ZeroMessages) {
  testing_support::TempDir dir;
  bus::Broker broker(ephemeral());
  broker.start();
  bag::RecordOptions opts;
  opts.broker = broker.address();
  Session s(dir.file("zero.cmbag"), opts);
  EXPECT_EQ(s.finish().messages, 0u);
  const auto c = bag::load(dir.file("zero.cmbag"), {false});
  EXPECT_TRUE(c.index_valid);
  EXPECT_TRUE(c.file_order.empty());
}

TEST(Recorder, KMessagesOnTwoStreams) {
  testing_support::TempDir dir;
  bus::Broker broker(ephemeral());
  broker.start();
  bag::RecordOptions opts;
  opts.broker = broker.address();
  opts.pattern = "robot1/**";
  Session s(dir.file("k.cmbag"), opts);

  bus::Client pub(broker.address());
  Stamper a({"robot1/battery", StreamKind::Robot, 1.0, PayloadSchema::scalar()});
  Stamper b({"robot1/wifi", StreamKind::Robot, 1.0, PayloadSchema::scalar()});
  Stamper c({"robot2/wifi", StreamKind::Robot, 1.0, PayloadSchema::scalar()});
  for (auto* st : {&a, &b, &c}) pub.advertise(st->descriptor());
  std::vector<StampedMessage> sent;
  for (std::uint64_t i = 0; i < 1500; ++i) {
    sent.push_back(a.stamp_at({100 + i, 0}, 100.0 - i * 0.01));
    pub.publish(sent.back());
    sent.push_back(b.stamp_at({100 + i, 500}, -50.0));
    pub.publish(sent.back());
    pub.publish(c.stamp_at({100 + i, 0}, 1.0));
  }
  pub.sync();
  const auto stats = s.finish();
  EXPECT_EQ(stats.messages, sent.size());
  const auto got = bag::load(dir.file("k.cmbag"), {false});
  EXPECT_EQ(got.file_order, sent);
  ASSERT_EQ(got.streams.size(), 2u);
  EXPECT_EQ(got.streams[0].id, "robot1/battery");
  EXPECT_EQ(got.streams[0].schema, PayloadSchema::scalar());
}

TEST(Recorder, MaxMessagesStops) {
  testing_support::TempDir dir;
  bus::Broker broker(ephemeral());
  broker.start();
  bag::RecordOptions opts;
  opts.broker = broker.address();
  opts.max_messages = 10;
  Session s(dir.file("m.cmbag"), opts);
  bus::Client pub(broker.address());
  Stamper a({"robot1/battery", StreamKind::Robot, 1.0, PayloadSchema::scalar()});
  pub.advertise(a.descriptor());
  for (std::uint64_t i = 0; i < 25; ++i) pub.publish(a.stamp_at({i, 0}, 1.0));
  pub.sync();
  EXPECT_FALSE(s.join().has_value());
  EXPECT_EQ(bag::read(dir.file("m.cmbag")).size(), 10u);
}

TEST(Recorder, BrokerLossKeepsValidBag) {
  testing_support::TempDir dir;
  auto broker = std::make_unique<bus::Broker>(ephemeral());
  broker->start();
  bag::RecordOptions opts;
  opts.broker = broker->address();
  Session s(dir.file("lost.cmbag"), opts);
  {
    bus::Client pub(broker->address());
    Stamper a({"robot1/battery", StreamKind::Robot, 1.0, PayloadSchema::scalar()});
    pub.advertise(a.descriptor());
    for (std::uint64_t i = 0; i < 20; ++i) pub.publish(a.stamp_at({i, 0}, 1.0));
    pub.sync();
  }
  std::this_thread::sleep_for(200ms);
  broker.reset();
  EXPECT_EQ(s.join(), Errc::BrokerDisconnected);
  const auto c = bag::load(dir.file("lost.cmbag"));
  EXPECT_EQ(c.file_order.size(), 20u);
}
