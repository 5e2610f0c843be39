#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "condmon/error.hpp"
#include "condmon/features/robot.hpp"
#include "condmon/sim/fleet.hpp"
#include "support/collect_sink.hpp"

using namespace condmon;
using namespace condmon::sim;
using testing_support::CollectSink;

namespace {

RssiModel quiet(double p0 = -30, double n = 2, double d0 = 1) { return {p0, n, d0, 0.0}; }

std::vector<double> scalars(const std::vector<StampedMessage>& msgs) {
  std::vector<double> v;
  for (const auto& m : msgs) v.push_back(decode_scalar(m.payload));
  return v;
}

}  // namespace

TEST(Rssi, Examples) {
  Rng rng(1);
  EXPECT_DOUBLE_EQ(rssi(quiet(), {0, 0}, {1, 0}, rng), -30);
  EXPECT_NEAR(rssi(quiet(), {0, 0}, {10, 0}, rng), -50, 1e-12);
  // Closer than d0 is treated as d0.
  EXPECT_DOUBLE_EQ(rssi(quiet(), {0, 0}, {0.2, 0}, rng), -30);
  EXPECT_NEAR(rssi(quiet(-40, 3, 2), {1, 1}, {1, 21}, rng), -40 - 30, 1e-12);
}

TEST(Rssi, MonotoneInDistance) {
  Rng rng(1);
  const auto m = quiet(-30, 2.2, 1);
  double prev = rssi(m, {0, 0}, {1, 0}, rng);
  for (double d = 1.01; d < 20; d += 0.01) {
    const double v = rssi(m, {0, 0}, {d, 0}, rng);
    EXPECT_LT(v, prev) << d;
    prev = v;
  }
}

TEST(Rssi, NoiseHasConfiguredSpread) {
  Rng rng(5);
  RssiModel m;
  double sum = 0, sq = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double v = rssi(m, {0, 0}, {1, 0}, rng) - m.p0_dbm;
    sum += v;
    sq += v * v;
  }
  EXPECT_NEAR(sum / n, 0, 0.05);
  EXPECT_NEAR(std::sqrt(sq / n), m.noise_sd_db, 0.05);
}

TEST(Battery, Examples) {
  EXPECT_NEAR(step_battery({0.01, 0.02}, 50, 0, 10), 49.9, 1e-12);
  EXPECT_NEAR(step_battery({0.01, 0.02}, 50, 1, 10), 49.7, 1e-12);
  EXPECT_EQ(step_battery({0.01, 0.02}, 0, 1, 10), 0);
  EXPECT_EQ(step_battery({0.01, 0.02}, 0.1, 1, 10), 0);
  EXPECT_THROW((BatteryModel{-1, 0}.validate()), Error);
}

TEST(StepRobot, StraightLineWithoutNoise) {
  World w;
  RobotState r;
  r.pos = {2, 5};
  r.heading = 0;
  r.speed = 0.5;
  w.robots = {r};
  Rng rng(1);
  for (int i = 1; i <= 20; ++i) {
    r = step_robot(w, r, 0.1, 0.0, rng);
    EXPECT_NEAR(r.pos.x, 2 + 0.05 * i, 1e-12);
    EXPECT_DOUBLE_EQ(r.pos.y, 5);
    EXPECT_EQ(r.heading, 0);
  }
}

TEST(StepRobot, NeverLeavesWorkspaceHeadingAtWall) {
  for (double heading : {0.0, std::numbers::pi / 2, std::numbers::pi, -std::numbers::pi / 2, 0.3}) {
    World w;
    RobotState r;
    r.avoid_radius = 0.5;
    r.pos = {10 - 2 * r.avoid_radius, 5};
    if (heading == std::numbers::pi) r.pos = {2 * r.avoid_radius, 5};
    if (heading == std::numbers::pi / 2) r.pos = {5, 10 - 2 * r.avoid_radius};
    if (heading == -std::numbers::pi / 2) r.pos = {5, 2 * r.avoid_radius};
    r.heading = heading;
    w.robots = {r};
    Rng rng(3);
    for (int i = 0; i < 10000; ++i) {
      r = step_robot(w, r, 0.1, 0.2, rng);
      ASSERT_GE(r.pos.x, 0);
      ASSERT_LE(r.pos.x, w.width);
      ASSERT_GE(r.pos.y, 0);
      ASSERT_LE(r.pos.y, w.height);
    }
  }
}

TEST(StepRobot, AvoidsObstacleInPath) {
  World w;
  w.obstacles = {{{5, 5}, {0, 0}, 0.4}};
  RobotState r;
  r.pos = {3, 5};
  r.heading = 0;
  w.robots = {r};
  Rng rng(1);
  for (int i = 0; i < 400; ++i) {
    r = step_robot(w, r, 0.1, 0.0, rng);
    ASSERT_GT(distance(r.pos, w.obstacles[0].pos), w.obstacles[0].radius);
  }
}

TEST(Fleet, DefaultRunPublishesTenStreams) {
  auto cfg = FleetConfig::defaults();
  cfg.duration_s = 30;
  CollectSink sink;
  const auto run = run_fleet_scenario(cfg, sink);
  EXPECT_EQ(sink.advertised.size(), 10u);
  std::set<std::string> ids;
  for (const auto& m : sink.messages) ids.insert(m.stream);
  EXPECT_EQ(ids.size(), 10u);
  EXPECT_TRUE(ids.count("robot4/battery"));
  EXPECT_TRUE(ids.count("robot5/wifi"));
  EXPECT_EQ(run.messages, 30u * 10u);
  EXPECT_EQ(sink.on("robot1/wifi").size(), 30u);
  // 1 Hz stamps from the configured start.
  const auto w = sink.on("robot1/wifi");
  EXPECT_EQ(w[0].stamp, Timestamp::from_seconds(cfg.start_time_s));
  EXPECT_EQ(timestamp_diff(w[1].stamp, w[0].stamp), 1'000'000'000);
}

TEST(Fleet, ZeroDurationIsEmpty) {
  auto cfg = FleetConfig::defaults();
  cfg.duration_s = 0;
  CollectSink sink;
  const auto run = run_fleet_scenario(cfg, sink);
  EXPECT_EQ(run.messages, 0u);
  EXPECT_TRUE(sink.messages.empty());
}

TEST(Fleet, Deterministic) {
  auto cfg = FleetConfig::defaults();
  cfg.duration_s = 120;
  CollectSink a, b;
  run_fleet_scenario(cfg, a);
  run_fleet_scenario(cfg, b);
  EXPECT_EQ(a.messages, b.messages);
  cfg.seed = 43;
  CollectSink c;
  run_fleet_scenario(cfg, c);
  EXPECT_NE(a.messages, c.messages);
}

TEST(Fleet, CollisionFreeAndInsideWorkspace) {
  for (std::uint64_t seed : {1u, 2u, 42u, 1000u}) {
    auto cfg = FleetConfig::defaults();
    cfg.seed = seed;
    CollectSink sink;
    const auto run = run_fleet_scenario(cfg, sink, true);
    EXPECT_FALSE(run.left_workspace) << seed;
    EXPECT_GT(run.min_obstacle_clearance, 0) << seed;
    EXPECT_EQ(run.snapshots.size(), 600u);
  }
}

TEST(Fleet, BatteryNonIncreasingAndBounded) {
  auto cfg = FleetConfig::defaults();
  CollectSink sink;
  run_fleet_scenario(cfg, sink);
  for (int k = 1; k <= 5; ++k) {
    const auto v = scalars(sink.on("robot" + std::to_string(k) + "/battery"));
    for (std::size_t i = 0; i < v.size(); ++i) {
      EXPECT_GE(v[i], 0);
      EXPECT_LE(v[i], 100);
      if (i > 0) {
        EXPECT_LE(v[i], v[i - 1]);
      }
    }
  }
}

TEST(Fleet, CpuStepRaisesUtilization) {
  auto cfg = FleetConfig::defaults();
  CollectSink sink;
  run_fleet_scenario(cfg, sink);
  const auto battery = features::Series::from_messages("robot4/battery", sink.messages);
  const auto t0 = Timestamp::from_seconds(cfg.start_time_s);
  auto at = [&](double s) { return t0.plus_nanos(static_cast<std::int64_t>(s * 1e9)); };
  const double pre = features::battery_utilization(battery, at(0), at(250));
  const double during = features::battery_utilization(battery, at(251), at(420));
  const double a = cfg.battery.alpha, b = cfg.battery.beta;
  EXPECT_NEAR(pre, (a + 0.2 * b) * 60, 1e-6);
  EXPECT_NEAR(during, (a + 0.9 * b) * 60, 1e-6);
  EXPECT_NEAR(during / pre, 23.0 / 9.0, 1e-6);
}

TEST(Fleet, NoiseFreeInitialRssiNearMinimum) {
  auto cfg = FleetConfig::defaults();
  cfg.rssi.noise_sd_db = 0;
  CollectSink sink;
  run_fleet_scenario(cfg, sink);
  for (int k = 1; k <= 5; ++k) {
    const auto v = scalars(sink.on("robot" + std::to_string(k) + "/wifi"));
    const double lowest = *std::min_element(v.begin(), v.end());
    EXPECT_LE(v.front() - lowest, 2.0) << "robot" << k;
  }
}

TEST(Fleet, ValidateRejectsBadConfig) {
  auto cfg = FleetConfig::defaults();
  cfg.world.robots[0].id = "a/b";
  EXPECT_THROW(cfg.validate(), Error);
  cfg = FleetConfig::defaults();
  cfg.world.obstacles[0].radius = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = FleetConfig::defaults();
  cfg.rssi.d0 = 0;
  EXPECT_THROW(cfg.validate(), Error);
}
