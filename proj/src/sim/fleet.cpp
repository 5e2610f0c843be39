#include "condmon/sim/fleet.hpp"

#include <algorithm>
#include <numbers>

#include "condmon/error.hpp"

namespace condmon::sim {

void RssiModel::validate() const {
  if (!(d0 > 0)) throw Error(Errc::BadConfig, "rssi.d0 must be > 0");
  if (!(n_exponent > 0)) throw Error(Errc::BadConfig, "rssi.n_exponent must be > 0");
  if (!(noise_sd_db >= 0)) throw Error(Errc::BadConfig, "rssi.noise_sd_db must be >= 0");
}

double rssi(const RssiModel& m, Vec2 router, Vec2 robot, Rng& rng) {
  const double d = std::max(distance(router, robot), m.d0);
  double v = m.p0_dbm - 10.0 * m.n_exponent * std::log10(d / m.d0);
  if (m.noise_sd_db > 0) v += std::normal_distribution<double>(0.0, m.noise_sd_db)(rng);
  return v;
}

void BatteryModel::validate() const {
  if (!(alpha >= 0) || !(beta >= 0)) throw Error(Errc::BadConfig, "battery alpha/beta must be >= 0");
}

double step_battery(const BatteryModel& m, double battery_pct, double cpu_load, double dt) {
  return std::max(0.0, battery_pct - (m.alpha + m.beta * cpu_load) * dt);
}

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTurnStep = kPi / 90;  // 2 degrees

double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2 * kPi);
  if (a < 0) a += 2 * kPi;
  return a - kPi;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, {a.x + t * vx, a.y + t * vy});
}

bool inside(const World& w, Vec2 p, double margin) {
  return p.x >= margin && p.x <= w.width - margin && p.y >= margin && p.y <= w.height - margin;
}

// Whether the straight path of `length` along `heading` stays clear of walls
// and obstacle discs.
bool path_clear(const World& w, Vec2 from, double heading, double length) {
  const Vec2 to{from.x + length * std::cos(heading), from.y + length * std::sin(heading)};
  if (!inside(w, to, kClearanceMargin)) return false;
  return std::all_of(w.obstacles.begin(), w.obstacles.end(), [&](const Obstacle& ob) {
    return point_segment_distance(ob.pos, from, to) > ob.radius + kClearanceMargin;
  });
}

}  // namespace

RobotState step_robot(const World& world, const RobotState& robot, double dt, double heading_sd, Rng& rng) {
  RobotState next = robot;
  if (heading_sd > 0) {
    next.heading += std::normal_distribution<double>(0.0, heading_sd)(rng) * std::sqrt(dt);
  }
  next.heading = wrap_angle(next.heading);

  const double step = next.speed * dt;
  const double look = std::max(next.avoid_radius, step);
  // Smallest rotation (counter-clockwise first) that clears the look-ahead.
  bool found = false;
  for (int k = 0; k <= 90 && !found; ++k) {
    for (int sign : {+1, -1}) {
      if (k == 0 && sign < 0) continue;
      const double h = wrap_angle(next.heading + sign * k * kTurnStep);
      if (path_clear(world, next.pos, h, look)) {
        next.heading = h;
        found = true;
        break;
      }
    }
  }
  if (!found) {
    // Boxed in: hold position and turn around.
    next.heading = wrap_angle(next.heading + kPi);
    return next;
  }
  Vec2 p{next.pos.x + step * std::cos(next.heading), next.pos.y + step * std::sin(next.heading)};
  p.x = std::clamp(p.x, 0.0, world.width);
  p.y = std::clamp(p.y, 0.0, world.height);
  const bool hits = std::any_of(world.obstacles.begin(), world.obstacles.end(), [&](const Obstacle& ob) {
    return distance(ob.pos, p) <= ob.radius + kClearanceMargin;
  });
  if (!hits) next.pos = p;
  return next;
}

Obstacle step_obstacle(const World& world, const Obstacle& ob, double dt) {
  Obstacle next = ob;
  Vec2 p{ob.pos.x + ob.velocity.x * dt, ob.pos.y + ob.velocity.y * dt};
  if (p.x < ob.radius || p.x > world.width - ob.radius) {
    next.velocity.x = -next.velocity.x;
    p.x = ob.pos.x;
  }
  if (p.y < ob.radius || p.y > world.height - ob.radius) {
    next.velocity.y = -next.velocity.y;
    p.y = ob.pos.y;
  }
  const bool blocked = std::any_of(world.robots.begin(), world.robots.end(), [&](const RobotState& r) {
    return distance(r.pos, p) <= ob.radius + 2 * kClearanceMargin;
  });
  if (blocked) {
    next.velocity = {-next.velocity.x, -next.velocity.y};
    return next;
  }
  next.pos = p;
  return next;
}

FleetConfig FleetConfig::defaults() {
  FleetConfig c;
  c.world.width = 10;
  c.world.height = 10;
  c.world.router = {0.5, 0.5};
  const Vec2 starts[] = {{9.3, 9.3}, {8.5, 9.4}, {9.4, 8.5}, {8.6, 8.6}, {7.8, 9.3}};
  for (int i = 0; i < 5; ++i) {
    RobotState r;
    r.id = "robot" + std::to_string(i + 1);
    r.pos = starts[i];
    r.heading = -3 * kPi / 4;
    c.world.robots.push_back(r);
  }
  c.world.obstacles = {
      {{5.0, 5.0}, {0.15, 0.10}, 0.4},
      {{3.0, 7.0}, {-0.10, 0.12}, 0.35},
      {{7.0, 3.0}, {0.12, -0.10}, 0.4},
  };
  c.cpu_events = {{"robot4", 250, 420, 0.9}};
  return c;
}

void FleetConfig::validate() const {
  if (!(duration_s >= 0)) throw Error(Errc::BadConfig, "duration_s must be >= 0");
  if (!(dt_s > 0)) throw Error(Errc::BadConfig, "dt_s must be > 0");
  if (!(publish_hz > 0)) throw Error(Errc::BadConfig, "publish_hz must be > 0");
  if (!(start_time_s >= 0)) throw Error(Errc::BadConfig, "start_time_s must be >= 0");
  if (!(heading_sd >= 0)) throw Error(Errc::BadConfig, "heading_sd must be >= 0");
  if (!(world.width > 0) || !(world.height > 0)) throw Error(Errc::BadConfig, "workspace must be non-empty");
  rssi.validate();
  battery.validate();
  auto in_ws = [&](Vec2 p) { return p.x >= 0 && p.x <= world.width && p.y >= 0 && p.y <= world.height; };
  if (!in_ws(world.router)) throw Error(Errc::BadConfig, "router outside workspace");
  if (world.robots.empty()) throw Error(Errc::BadConfig, "no robots");
  for (const auto& ob : world.obstacles) {
    if (!(ob.radius > 0)) throw Error(Errc::BadConfig, "obstacle radius must be > 0");
    if (!in_ws(ob.pos)) throw Error(Errc::BadConfig, "obstacle outside workspace");
  }
  for (const auto& r : world.robots) {
    if (!is_valid_topic(r.id) || r.id.find('/') != std::string::npos) {
      throw Error(Errc::BadConfig, "robot id '" + r.id + "' must be a single topic segment");
    }
    if (!in_ws(r.pos)) throw Error(Errc::BadConfig, r.id + " starts outside workspace");
    if (!(r.speed >= 0)) throw Error(Errc::BadConfig, r.id + ": speed must be >= 0");
    if (!(r.battery_pct >= 0 && r.battery_pct <= 100)) throw Error(Errc::BadConfig, r.id + ": battery_pct");
    if (!(r.cpu_load >= 0 && r.cpu_load <= 1)) throw Error(Errc::BadConfig, r.id + ": cpu_load");
    if (!(r.avoid_radius > 0)) throw Error(Errc::BadConfig, r.id + ": avoid_radius must be > 0");
    for (const auto& ob : world.obstacles) {
      if (distance(ob.pos, r.pos) <= ob.radius + kClearanceMargin) {
        throw Error(Errc::BadConfig, r.id + " starts inside an obstacle");
      }
    }
  }
  for (const auto& e : cpu_events) {
    auto it = std::find_if(world.robots.begin(), world.robots.end(), [&](auto& r) { return r.id == e.robot; });
    if (it == world.robots.end()) throw Error(Errc::BadConfig, "cpu event for unknown robot '" + e.robot + "'");
    if (!(e.start_s < e.end_s)) throw Error(Errc::BadConfig, "cpu event needs start_s < end_s");
    if (!(e.cpu_load >= 0 && e.cpu_load <= 1)) throw Error(Errc::BadConfig, "cpu event load outside [0,1]");
  }
}

FleetRun run_fleet_scenario(const FleetConfig& cfg, MessageSink& sink, bool keep_snapshots,
                            const std::function<void(double)>& pace) {
  cfg.validate();
  Rng rng(cfg.seed);
  World world = cfg.world;
  world.rng_seed = cfg.seed;
  if (cfg.outward_initial_heading) {
    for (auto& r : world.robots) r.heading = std::atan2(r.pos.y - world.router.y, r.pos.x - world.router.x);
  }
  std::vector<double> base_cpu;
  for (const auto& r : world.robots) base_cpu.push_back(r.cpu_load);

  struct Streams {
    Stamper battery, wifi;
  };
  std::vector<Streams> streams;
  for (const auto& r : world.robots) {
    auto desc = [&](const char* leaf) {
      return StreamDescriptor{r.id + "/" + leaf, StreamKind::Robot, cfg.publish_hz, PayloadSchema::scalar(), kFlagNone};
    };
    streams.push_back({Stamper(desc("battery")), Stamper(desc("wifi"))});
    sink.advertise(streams.back().battery.descriptor());
    sink.advertise(streams.back().wifi.descriptor());
  }

  const auto dt_ns = static_cast<std::int64_t>(std::llround(cfg.dt_s * 1e9));
  const auto pub_ns = static_cast<std::int64_t>(std::llround(1e9 / cfg.publish_hz));
  const auto end_ns = static_cast<std::int64_t>(std::llround(cfg.duration_s * 1e9));
  const Timestamp t0 = Timestamp::from_seconds(cfg.start_time_s);

  FleetRun run;
  auto check = [&] {
    for (const auto& r : world.robots) {
      if (r.pos.x < 0 || r.pos.x > world.width || r.pos.y < 0 || r.pos.y > world.height) run.left_workspace = true;
      for (const auto& ob : world.obstacles) {
        run.min_obstacle_clearance = std::min(run.min_obstacle_clearance, distance(r.pos, ob.pos) - ob.radius);
      }
    }
  };
  check();

  std::int64_t sim_ns = 0;
  std::int64_t next_pub = 0;
  while (next_pub < end_ns) {
    // Publish every tick at or before the current simulated time.
    while (next_pub <= sim_ns && next_pub < end_ns) {
      const double t = static_cast<double>(next_pub) * 1e-9;
      if (pace) pace(t);
      const Timestamp stamp = t0.plus_nanos(next_pub);
      for (std::size_t i = 0; i < world.robots.size(); ++i) {
        const auto& r = world.robots[i];
        sink.publish(streams[i].battery.stamp_at(stamp, r.battery_pct));
        sink.publish(streams[i].wifi.stamp_at(stamp, rssi(cfg.rssi, world.router, r.pos, rng)));
        run.messages += 2;
      }
      if (keep_snapshots) run.snapshots.push_back(world);
      next_pub += pub_ns;
    }
    if (next_pub >= end_ns) break;

    const double t = static_cast<double>(sim_ns) * 1e-9;
    for (std::size_t i = 0; i < world.robots.size(); ++i) {
      auto& r = world.robots[i];
      r.cpu_load = base_cpu[i];
      for (const auto& e : cfg.cpu_events) {
        if (e.robot == r.id && t >= e.start_s && t < e.end_s) r.cpu_load = e.cpu_load;
      }
      r = step_robot(world, r, cfg.dt_s, cfg.heading_sd, rng);
      r.battery_pct = step_battery(cfg.battery, r.battery_pct, r.cpu_load, cfg.dt_s);
    }
    for (auto& ob : world.obstacles) ob = step_obstacle(world, ob, cfg.dt_s);
    sim_ns += dt_ns;
    ++run.steps;
    check();
  }
  return run;
}

}  // namespace condmon::sim
