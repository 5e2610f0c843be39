#include <gtest/gtest.h>

#include <random>

#include "condmon/error.hpp"
#include "condmon/features/robot.hpp"
#include "support/naive_stats.hpp"

using namespace condmon;
using namespace condmon::features;

namespace {

Timestamp at(double s) { return Timestamp::from_seconds(1000 + s); }

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

Series line(double t0, double t1, double dt, double v0, double slope_per_s) {
  std::vector<Sample> v;
  for (double t = t0; t <= t1 + 1e-9; t += dt) v.push_back({at(t), v0 + slope_per_s * (t - t0)});
  return Series("robot1/battery", v);
}

}  // namespace

TEST(BatteryUtilization, Examples) {
  EXPECT_NEAR(battery_utilization(line(0, 60, 1, 80, 0), at(0), at(61)), 0.0, 1e-12);
  EXPECT_NEAR(battery_utilization(line(0, 60, 1, 100, -1.0 / 60), at(0), at(61)), 1.0, 1e-9);
  EXPECT_LT(battery_utilization(line(0, 60, 1, 20, 0.1), at(0), at(61)), 0);
}

TEST(BatteryUtilization, TwoPointLine) {
  std::vector<Sample> v{{at(0), 100}, {at(60), 99}};
  EXPECT_NEAR(battery_utilization(Series("b", v), at(0), at(60.5)), 1.0, 1e-9);
}

TEST(BatteryUtilization, NeedsTwoSamples) {
  auto s = line(0, 10, 1, 50, -0.1);
  EXPECT_EQ(error_of([&] { battery_utilization(s, at(3), at(4)); }), Errc::InsufficientSamples);
  EXPECT_EQ(error_of([&] { battery_utilization(s, at(30), at(40)); }), Errc::InsufficientSamples);
}

TEST(BatteryUtilization, ExactLineMatchesSlope) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> slope(-0.05, 0.05), dt(0.05, 2.0);
  for (int i = 0; i < 300; ++i) {
    const double k = slope(rng);
    const double step = dt(rng);
    const auto s = line(0, step * static_cast<double>(2 + rng() % 200), step, 90, k);
    const double got = battery_utilization(s, at(0), at(1e6));
    EXPECT_NEAR(got, -k * 60, 1e-9 * std::max(1.0, std::abs(k * 60)));
  }
}

TEST(BatteryUtilization, NoisyAgreesWithNormalEquations) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> noise(0, 0.2);
  std::vector<Sample> v;
  std::vector<double> xs, ys;
  for (int i = 0; i < 120; ++i) {
    const double t = i * 0.5;
    const double y = 75 - 0.01 * t + noise(rng);
    v.push_back({at(t), y});
    xs.push_back(t);
    ys.push_back(y);
  }
  const double want = -static_cast<double>(oracle::ols_slope(xs, ys)) * 60;
  EXPECT_NEAR(battery_utilization(Series("b", v), at(0), at(60)), want, 1e-9);
}

TEST(DeploymentTime, Examples) {
  EXPECT_EQ(deployment_time({100, 0}, {100, 0}), 0);
  EXPECT_DOUBLE_EQ(deployment_time({100, 0}, {160, 0}), 60);
  EXPECT_DOUBLE_EQ(deployment_time({100, 0}, {100, 500'000'000}), 0.5);
  EXPECT_EQ(error_of([] { deployment_time({160, 0}, {100, 0}); }), Errc::ClockSkew);
}

TEST(Health, Thresholds) {
  EXPECT_EQ(classify_silence(0, 10), Health::Alive);
  EXPECT_EQ(classify_silence(300'000'000, 10), Health::Alive);
  EXPECT_EQ(classify_silence(500'000'000, 10), Health::Stale);
  EXPECT_EQ(classify_silence(1'000'000'000, 10), Health::Stale);
  EXPECT_EQ(classify_silence(2'000'000'000, 10), Health::Dead);
  EXPECT_EQ(to_string(Health::Stale), "Stale");
}

TEST(Health, MonotoneInSilence) {
  for (double rate : {0.1, 1.0, 4.0, 64.0, 130.0}) {
    Health prev = Health::Alive;
    for (std::int64_t ns = 0; ns < 200'000'000'000; ns += 7'919'000) {
      const auto h = classify_silence(ns, rate);
      EXPECT_GE(static_cast<int>(h), static_cast<int>(prev));
      prev = h;
    }
    EXPECT_EQ(prev, Health::Dead);
  }
}

TEST(Health, TableTracksStreams) {
  HealthTable t;
  t.register_stream("robot1/battery", 10);
  t.register_stream("robot1/wifi", 1);
  t.register_stream("robot2/wifi", 1);
  t.observe("robot1/battery", at(0));
  t.observe("robot1/wifi", at(0));
  auto st = t.sensor_status(at(0.5));
  ASSERT_EQ(st.size(), 3u);
  EXPECT_EQ(st[0].stream, "robot1/battery");
  EXPECT_EQ(st[0].state, Health::Stale);
  EXPECT_EQ(st[1].state, Health::Alive);
  EXPECT_EQ(st[2].state, Health::Dead);  // never observed
  EXPECT_EQ(st[2].last_seen, Timestamp{});

  st = t.sensor_status(at(2));
  EXPECT_EQ(st[0].state, Health::Dead);
  t.observe("robot1/battery", at(2));  // any message revives it
  st = t.sensor_status(at(2));
  EXPECT_EQ(st[0].state, Health::Alive);
  EXPECT_EQ(st[0].last_seen, at(2));
}

TEST(FeatureMessage, Layout) {
  FeatureRecord rec{"robot1", at(0), at(30), "battery_utilization", 1.25};
  auto m = to_feature_message(rec, 4);
  EXPECT_EQ(m.stream, "features/robot1/battery_utilization");
  EXPECT_EQ(m.stamp, at(30));
  EXPECT_EQ(m.seq, 4u);
  auto v = decode_reals(m.payload);
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(v[0], 1000);
  EXPECT_EQ(v[1], 0);
  EXPECT_EQ(v[2], 1.25);

  FeatureRecord tri{"human", at(0), at(1), "ibi", StatTriple{1, 2, 3}};
  EXPECT_EQ(decode_reals(to_feature_message(tri, 1).payload).size(), 5u);
  FeatureRecord bad{"human", at(1), at(1), "ibi", 0.0};
  EXPECT_EQ(error_of([&] { to_feature_message(bad, 1); }), Errc::InvalidArgument);
}
