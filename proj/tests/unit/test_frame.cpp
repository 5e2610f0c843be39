#include <gtest/gtest.h>

#include <random>

#include "condmon/bus/frame.hpp"
#include "condmon/error.hpp"

using namespace condmon;
using namespace condmon::bus;

namespace {

Bytes bytes(std::initializer_list<int> v) {
  Bytes out;
  for (int b : v) out.push_back(static_cast<std::uint8_t>(b));
  return out;
}

template <typename F>
Errc error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::InvalidArgument;
}

}  // namespace

TEST(Frame, PingGolden) {
  EXPECT_EQ(encode_frame(FrameKind::Ping, {}), bytes({0xC0, 0x4D, 0x01, 0x05, 0x00, 0x00, 0x00, 0x00}));
}

TEST(Frame, PublishAbcGolden) {
  const Bytes body{'a', 'b', 'c'};
  EXPECT_EQ(encode_frame(FrameKind::Publish, body),
            bytes({0xC0, 0x4D, 0x01, 0x03, 0x03, 0x00, 0x00, 0x00, 0x61, 0x62, 0x63}));
}

TEST(Frame, DecodePing) {
  const auto wire = bytes({0xC0, 0x4D, 0x01, 0x05, 0x00, 0x00, 0x00, 0x00});
  std::size_t used = 0;
  auto f = decode_frame(wire, used);
  ASSERT_TRUE(f);
  EXPECT_EQ(f->kind, FrameKind::Ping);
  EXPECT_TRUE(f->body.empty());
  EXPECT_EQ(used, 8u);
}

TEST(Frame, PartialNeedsMoreBytes) {
  const Bytes body{'a', 'b', 'c'};
  const auto wire = encode_frame(FrameKind::Publish, body);
  std::size_t used = 0;
  EXPECT_FALSE(decode_frame(ByteView(wire).first(5), used));
  EXPECT_FALSE(decode_frame(ByteView(wire).first(10), used));
}

TEST(Frame, LeavesRemainderUntouched) {
  auto wire = encode_frame(FrameKind::Ping, {});
  const auto second = encode_frame(FrameKind::Pong, {});
  wire.insert(wire.end(), second.begin(), second.end());
  std::size_t used = 0;
  auto f = decode_frame(wire, used);
  ASSERT_TRUE(f);
  EXPECT_EQ(used, 8u);
  auto g = decode_frame(ByteView(wire).subspan(used), used);
  ASSERT_TRUE(g);
  EXPECT_EQ(g->kind, FrameKind::Pong);
}

TEST(Frame, HeaderErrors) {
  std::size_t used = 0;
  EXPECT_EQ(error_of([&] { decode_frame(bytes({0xFF, 0xFF, 0x01, 0x05, 0, 0, 0, 0}), used); }), Errc::BadMagic);
  EXPECT_EQ(error_of([&] { decode_frame(bytes({0xFF}), used); }), Errc::BadMagic);
  EXPECT_EQ(error_of([&] { decode_frame(bytes({0xC0, 0x4D, 0x02, 0x05, 0, 0, 0, 0}), used); }),
            Errc::UnsupportedVersion);
  EXPECT_EQ(error_of([&] { decode_frame(bytes({0xC0, 0x4D, 0x01, 0x09, 0, 0, 0, 0}), used); }), Errc::BadMagic);
}

TEST(FrameDecoder, ByteAtATime) {
  const Bytes body{1, 2, 3, 4, 5};
  auto wire = encode_frame(FrameKind::Publish, body);
  const auto ping = encode_frame(FrameKind::Ping, {});
  wire.insert(wire.end(), ping.begin(), ping.end());
  FrameDecoder dec;
  std::vector<Frame> got;
  for (auto b : wire) {
    dec.feed(ByteView(&b, 1));
    while (auto f = dec.next()) got.push_back(std::move(*f));
  }
  ASSERT_EQ(got.size(), 2u);
  EXPECT_EQ(got[0].body, body);
  EXPECT_EQ(got[1].kind, FrameKind::Ping);
  EXPECT_NO_THROW(dec.finish());
}

TEST(FrameDecoder, TruncatedAtStreamEnd) {
  const Bytes body{1, 2, 3};
  const auto wire = encode_frame(FrameKind::Publish, body);
  FrameDecoder dec;
  dec.feed(ByteView(wire).first(9));
  EXPECT_FALSE(dec.next());
  EXPECT_EQ(error_of([&] { dec.finish(); }), Errc::TruncatedBody);
}

TEST(Frame, FuzzedRoundTrip) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> kind(1, 6), len(0, 300), byte(0, 255);
  FrameDecoder dec;
  std::vector<Frame> sent;
  for (int i = 0; i < 2000; ++i) {
    Frame f{static_cast<FrameKind>(kind(rng)), {}};
    f.body.resize(static_cast<std::size_t>(len(rng)));
    for (auto& b : f.body) b = static_cast<std::uint8_t>(byte(rng));
    const auto wire = encode_frame(f);
    std::size_t used = 0;
    auto back = decode_frame(wire, used);
    ASSERT_TRUE(back);
    EXPECT_EQ(*back, f);
    EXPECT_EQ(used, wire.size());
    dec.feed(wire);
    sent.push_back(f);
  }
  for (const auto& f : sent) {
    auto g = dec.next();
    ASSERT_TRUE(g);
    EXPECT_EQ(*g, f);
  }
  EXPECT_EQ(dec.buffered(), 0u);
}

TEST(Bodies, PublishLayout) {
  StampedMessage m{"ab", {1, 2}, 3, {9}, false};
  const auto body = encode_publish(m);
  // u16 len | topic | u64 s | u32 ns | u64 seq | payload
  EXPECT_EQ(body, bytes({2, 0, 'a', 'b', 1, 0, 0, 0, 0, 0, 0, 0, 2, 0, 0, 0, 3, 0, 0, 0, 0, 0, 0, 0, 9}));
  EXPECT_EQ(decode_publish(body), m);
  EXPECT_EQ(peek_publish_topic(body), "ab");
}

TEST(Bodies, AdvertiseRoundTrip) {
  StreamDescriptor d{"human/ppg", StreamKind::PhysiologicalSensor, 64.0, PayloadSchema::vector(3), kFlagReplayed};
  EXPECT_EQ(decode_advertise(encode_advertise(d)), d);
  // A bare topic is a valid ADVERTISE body; the rest is inferred.
  const auto bare = decode_advertise(encode_topic("device/mic"));
  EXPECT_EQ(bare.id, "device/mic");
  EXPECT_EQ(bare.kind, StreamKind::BehavioralDevice);
}

TEST(Bodies, SubscribeRoundTrip) {
  const SubscribeRequest req{"robot2/**", 17};
  const auto back = decode_subscribe(encode_subscribe(req));
  EXPECT_EQ(back.pattern, req.pattern);
  EXPECT_EQ(back.queue_capacity, 17u);
  EXPECT_EQ(decode_subscribe(encode_topic("*/wifi")).queue_capacity, 0u);
}

TEST(Bodies, TruncatedPublish) {
  StampedMessage m{"robot1/battery", {1, 2}, 3, {}, false};
  auto body = encode_publish(m);
  body.resize(body.size() - 1);
  EXPECT_EQ(error_of([&] { decode_publish(body); }), Errc::TruncatedBody);
}
