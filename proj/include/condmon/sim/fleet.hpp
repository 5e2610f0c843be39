#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "condmon/sim/models.hpp"
#include "condmon/sink.hpp"

namespace condmon::sim {

struct RobotState {
  std::string id;
  Vec2 pos;
  double heading = 0;      // rad
  double speed = 0.25;     // m/s
  double battery_pct = 100;
  double cpu_load = 0.2;   // [0, 1]
  double avoid_radius = 0.5;
};

struct Obstacle {
  Vec2 pos;
  Vec2 velocity;
  double radius = 0.4;
};

struct World {
  double width = 10, height = 10;
  Vec2 router{0.5, 0.5};
  std::vector<Obstacle> obstacles;
  std::vector<RobotState> robots;
  std::uint64_t rng_seed = 0;
};

// Minimum gap kept between a robot and an obstacle's rim.
inline constexpr double kClearanceMargin = 0.05;

// One random-walk step with obstacle and wall avoidance. heading_sd is the
// heading diffusion in rad/sqrt(s).
RobotState step_robot(const World& world, const RobotState& robot, double dt, double heading_sd, Rng& rng);

// Moves one obstacle, bouncing off walls and refusing to run into robots.
Obstacle step_obstacle(const World& world, const Obstacle& ob, double dt);

struct CpuEvent {
  std::string robot;
  double start_s = 0, end_s = 0;  // [start, end)
  double cpu_load = 0.9;
};

struct FleetConfig {
  std::uint64_t seed = 42;
  double duration_s = 600;
  double start_time_s = 1'700'000'000;  // stamp of simulated t = 0
  double dt_s = 0.1;
  double publish_hz = 1.0;
  double heading_sd = 0.2;
  World world;
  RssiModel rssi;
  BatteryModel battery;
  std::vector<CpuEvent> cpu_events;
  // Robots start heading away from the router; false keeps RobotState::heading.
  bool outward_initial_heading = true;

  // Five robots near the top-right corner, router bottom-left, three moving
  // obstacles, robot4 CPU step 0.2 -> 0.9 over [250 s, 420 s).
  static FleetConfig defaults();
  void validate() const;  // throws BadConfig
};

struct FleetRun {
  std::uint64_t messages = 0;
  std::uint64_t steps = 0;
  double min_obstacle_clearance = 1e9;  // min over steps of center distance - radius
  bool left_workspace = false;
  std::vector<World> snapshots;  // at each publish tick, when requested
};

// Publishes robot<k>/battery and robot<k>/wifi (scalar, publish_hz) into the
// sink. `pace` (optional) is called with each publish tick's simulated time.
FleetRun run_fleet_scenario(const FleetConfig& cfg, MessageSink& sink, bool keep_snapshots = false,
                            const std::function<void(double)>& pace = {});

}  // namespace condmon::sim
