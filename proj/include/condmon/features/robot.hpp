#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "condmon/features/stats.hpp"

namespace condmon::features {

// -slope of the least-squares line through (t, battery %) over
// [start, end), in %/minute. Positive while discharging.
// Throws InsufficientSamples below two samples.
double battery_utilization(const Series& battery_pct, Timestamp start, Timestamp end);

// now - first_seen in seconds. Throws ClockSkew if now precedes first_seen.
double deployment_time(Timestamp first_seen, Timestamp now);

enum class Health : std::uint8_t { Alive, Stale, Dead };
std::string_view to_string(Health h);

struct HealthThresholds {
  double stale_periods = 3.0;  // Alive while silence <= 3 / rate
  double dead_periods = 10.0;  // Stale while silence <= 10 / rate
};

Health classify_silence(std::int64_t silence_ns, double nominal_rate_hz, HealthThresholds th = {});

struct SensorHealth {
  std::string stream;
  Health state = Health::Alive;
  Timestamp last_seen;
};

// Live liveness table; one entry per registered stream.
class HealthTable {
 public:
  explicit HealthTable(HealthThresholds th = {}) : th_(th) {}

  void register_stream(const std::string& stream, double nominal_rate_hz);
  // Any message revives the stream.
  void observe(const std::string& stream, Timestamp stamp);

  // Streams never observed are reported Dead with a zero last_seen.
  std::vector<SensorHealth> sensor_status(Timestamp now) const;

 private:
  struct Entry {
    double rate_hz = 1.0;
    std::optional<Timestamp> last_seen;
  };
  HealthThresholds th_;
  std::map<std::string, Entry> entries_;
};

struct FeatureRecord {
  std::string source;
  Timestamp window_start, window_end;  // start < end
  std::string name;
  std::variant<double, StatTriple, BaselineDelta> value;
};

// Bus form: topic "features/<source>/<name>", stamp = window end, payload =
// window start seconds, window start nanos, then the value fields (reals).
StampedMessage to_feature_message(const FeatureRecord& rec, std::uint64_t seq);

}  // namespace condmon::features
