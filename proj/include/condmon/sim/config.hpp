#pragma once

#include <string>

#include "condmon/sim/fleet.hpp"
#include "condmon/sim/physio.hpp"

// Scenario file (JSON). Every key is optional; omitted keys keep defaults.
//
//   seed          u64
//   duration_s    number
//   start_time_s  number (epoch seconds of simulated t = 0)
//   dt_s, publish_hz, heading_sd
//   workspace     {width, height}
//   router        {x, y}
//   robots[]      {id, x, y, heading?, speed, battery_pct, cpu_load, avoid_radius}
//   obstacles[]   {x, y, vx, vy, radius}
//   rssi          {p0_dbm, n_exponent, d0, noise_sd_db}
//   battery       {alpha, beta}
//   cpu_events[]  {robot, start_s, end_s, cpu_load}
//   physio        {seed?, duration_s?, profile {<PhysioProfile fields>},
//                  schedule[] {at_s, kind: image|audio|workload, level?, duration_s}}
//
// Unknown keys and type errors are reported as BadConfig with the line of
// the offending value.
namespace condmon::sim {

struct ScenarioConfig {
  FleetConfig fleet = FleetConfig::defaults();
  PhysioConfig physio;
};

ScenarioConfig parse_scenario(const std::string& json_text, const std::string& origin = "<config>");
ScenarioConfig load_scenario(const std::string& path);

}  // namespace condmon::sim
