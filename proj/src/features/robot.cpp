#include "condmon/features/robot.hpp"

#include <cmath>

#include "condmon/error.hpp"

namespace condmon::features {

double battery_utilization(const Series& battery_pct, Timestamp start, Timestamp end) {
  auto w = battery_pct.window(start, end);
  if (w.size() < 2) {
    throw Error(Errc::InsufficientSamples, battery_pct.stream() + ": need two samples in window");
  }
  // Times relative to the first sample keep the normal equations well scaled.
  const auto t0 = w.front().stamp;
  const double n = static_cast<double>(w.size());
  double st = 0, sy = 0;
  for (const auto& s : w) {
    st += static_cast<double>(timestamp_diff(s.stamp, t0)) * 1e-9;
    sy += s.value;
  }
  const double mt = st / n, my = sy / n;
  double sxy = 0, sxx = 0;
  for (const auto& s : w) {
    const double dt = static_cast<double>(timestamp_diff(s.stamp, t0)) * 1e-9 - mt;
    sxy += dt * (s.value - my);
    sxx += dt * dt;
  }
  const double slope_per_s = sxy / sxx;
  return -slope_per_s * 60.0;
}

double deployment_time(Timestamp first_seen, Timestamp now) {
  if (now < first_seen) {
    throw Error(Errc::ClockSkew, "now " + to_string(now) + " precedes first-seen " + to_string(first_seen));
  }
  return static_cast<double>(timestamp_diff(now, first_seen)) * 1e-9;
}

std::string_view to_string(Health h) {
  switch (h) {
    case Health::Alive: return "Alive";
    case Health::Stale: return "Stale";
    case Health::Dead: return "Dead";
  }
  return "?";
}

Health classify_silence(std::int64_t silence_ns, double nominal_rate_hz, HealthThresholds th) {
  // Compare in nanoseconds: silence <= k / rate  <=>  silence * rate <= k * 1e9.
  const double scaled = static_cast<double>(silence_ns) * nominal_rate_hz;
  if (scaled <= th.stale_periods * 1e9) return Health::Alive;
  if (scaled <= th.dead_periods * 1e9) return Health::Stale;
  return Health::Dead;
}

void HealthTable::register_stream(const std::string& stream, double nominal_rate_hz) {
  if (!(nominal_rate_hz > 0)) throw Error(Errc::InvalidArgument, "nominal rate must be positive");
  entries_[stream].rate_hz = nominal_rate_hz;
}

void HealthTable::observe(const std::string& stream, Timestamp stamp) {
  auto& e = entries_[stream];
  if (!e.last_seen || *e.last_seen < stamp) e.last_seen = stamp;
}

std::vector<SensorHealth> HealthTable::sensor_status(Timestamp now) const {
  std::vector<SensorHealth> out;
  for (const auto& [id, e] : entries_) {
    SensorHealth h{id, Health::Dead, {}};
    if (e.last_seen) {
      h.last_seen = *e.last_seen;
      h.state = classify_silence(std::max<std::int64_t>(0, timestamp_diff(now, *e.last_seen)), e.rate_hz, th_);
    }
    out.push_back(h);
  }
  return out;
}

StampedMessage to_feature_message(const FeatureRecord& rec, std::uint64_t seq) {
  if (!(rec.window_start < rec.window_end)) throw Error(Errc::InvalidArgument, "empty feature window");
  std::vector<double> v{static_cast<double>(rec.window_start.seconds), static_cast<double>(rec.window_start.nanos)};
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, double>) {
          v.push_back(x);
        } else if constexpr (std::is_same_v<T, StatTriple>) {
          v.insert(v.end(), {x.mean, x.sd, x.median});
        } else {
          v.insert(v.end(), {x.d_mean, x.d_sd, x.d_median});
        }
      },
      rec.value);
  StampedMessage m;
  m.stream = "features/" + rec.source + "/" + rec.name;
  m.stamp = rec.window_end;
  m.seq = seq;
  m.payload = encode_reals(v);
  return m;
}

}  // namespace condmon::features
