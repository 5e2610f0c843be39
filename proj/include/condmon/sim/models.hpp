#pragma once

#include <cmath>
#include <random>

namespace condmon::sim {

using Rng = std::mt19937_64;

struct Vec2 {
  double x = 0, y = 0;
};

inline double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Log-distance path loss.
struct RssiModel {
  double p0_dbm = -30.0;   // at d0
  double n_exponent = 2.2;
  double d0 = 1.0;         // m
  double noise_sd_db = 1.5;

  void validate() const;
};

// p0 - 10 n log10(max(d, d0) / d0) + N(0, noise_sd).
double rssi(const RssiModel& m, Vec2 router, Vec2 robot, Rng& rng);

struct BatteryModel {
  double alpha = 0.005;  // %/s base drain
  double beta = 0.02;    // %/s extra at full CPU load

  void validate() const;
};

// max(0, pct - (alpha + beta * cpu) * dt).
double step_battery(const BatteryModel& m, double battery_pct, double cpu_load, double dt);

}  // namespace condmon::sim
