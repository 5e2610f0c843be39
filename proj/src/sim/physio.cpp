#include "condmon/sim/physio.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "condmon/error.hpp"
#include "condmon/features/report.hpp"
#include "condmon/sim/models.hpp"

namespace condmon::sim {

namespace {

const char* kind_name(StimulusEvent::Kind k) {
  switch (k) {
    case StimulusEvent::Kind::ImageOnset: return "ImageOnset";
    case StimulusEvent::Kind::AudioOnset: return "AudioOnset";
    case StimulusEvent::Kind::WorkloadLevel: return "WorkloadLevel";
  }
  return "?";
}

double gaussian_bump(double x, double center, double amp, double width) {
  const double z = (x - center) / width;
  return amp * std::exp(-0.5 * z * z);
}

// PQRST complex around an R peak at x = 0 (seconds).
double ecg_template(double x, double amp) {
  return gaussian_bump(x, -0.20, 0.15 * amp, 0.025) + gaussian_bump(x, -0.03, -0.15 * amp, 0.010) +
         gaussian_bump(x, 0.00, amp, 0.012) + gaussian_bump(x, 0.03, -0.25 * amp, 0.010) +
         gaussian_bump(x, 0.25, 0.30 * amp, 0.040);
}

// Systolic peak plus dicrotic wave, delayed from the beat.
double ppg_template(double x, double amp, double delay) {
  return gaussian_bump(x, delay, amp, 0.08) + gaussian_bump(x, delay + 0.25, 0.3 * amp, 0.10);
}

// Bi-exponential skin-conductance response normalised to peak `amp`.
double phasic_response(double s, const PhysioProfile& p) {
  if (s <= 0) return 0;
  const double td = p.phasic_tau_s, tr = p.phasic_rise_s;
  const double s_peak = std::log(td / tr) * td * tr / (td - tr);
  const double norm = std::exp(-s_peak / td) - std::exp(-s_peak / tr);
  return p.phasic_amp_us * (std::exp(-s / td) - std::exp(-s / tr)) / norm;
}

struct Timeline {
  const StimulusSchedule& schedule;

  int workload_at(double t) const {
    for (const auto& e : schedule.events) {
      if (e.kind == StimulusEvent::Kind::WorkloadLevel && t >= e.at_s && t < e.at_s + e.duration_s) return e.level;
    }
    return 0;
  }
  bool stimulus_active(double t) const {
    for (const auto& e : schedule.events) {
      if (e.kind != StimulusEvent::Kind::WorkloadLevel && t >= e.at_s && t < e.at_s + e.duration_s) return true;
    }
    return false;
  }
};

Rng sub_rng(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
  return Rng(seq);
}

}  // namespace

void StimulusSchedule::validate() const {
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    if (!(e.at_s >= 0) || !(e.duration_s >= 0)) throw Error(Errc::BadConfig, "schedule event times must be >= 0");
    if (e.kind == StimulusEvent::Kind::WorkloadLevel && e.level < 0) {
      throw Error(Errc::BadConfig, "workload level must be >= 0");
    }
    if (i > 0 && e.at_s < events[i - 1].at_s) throw Error(Errc::BadConfig, "schedule must be time-sorted");
    for (std::size_t j = 0; j < i; ++j) {
      const auto& o = events[j];
      if (o.kind == e.kind && e.at_s < o.at_s + o.duration_s) {
        throw Error(Errc::BadConfig, std::string("overlapping ") + kind_name(e.kind) + " events");
      }
    }
  }
}

double PhysioConfig::effective_duration() const {
  if (duration_s > 0) return duration_s;
  double end = 0;
  for (const auto& e : schedule.events) end = std::max(end, e.at_s + e.duration_s);
  return end > 0 ? end : 60.0;
}

void PhysioConfig::validate() const {
  schedule.validate();
  const auto& p = profile;
  if (!(duration_s >= 0) || !(start_time_s >= 0)) throw Error(Errc::BadConfig, "physio duration/start must be >= 0");
  if (!(p.ibi_mean_s > 0.3) || !(p.ibi_sd_s >= 0)) throw Error(Errc::BadConfig, "physio IBI parameters");
  if (!(p.ppg_hz > 0) || !(p.gsr_hz > 0) || !(p.ecg_hz > 0)) throw Error(Errc::BadConfig, "physio rates must be > 0");
  if (!(p.phasic_tau_s > p.phasic_rise_s) || !(p.phasic_rise_s > 0)) {
    throw Error(Errc::BadConfig, "phasic_tau_s must exceed phasic_rise_s > 0");
  }
  if (!(p.gsr_drift_period_s > 0)) throw Error(Errc::BadConfig, "gsr_drift_period_s must be > 0");
}

StimulusSchedule workload_schedule(double round_s) {
  StimulusSchedule s;
  for (int level = 0; level <= 3; ++level) {
    s.events.push_back({level * round_s, StimulusEvent::Kind::WorkloadLevel, level, round_s});
  }
  return s;
}

std::string segment_name(int level) {
  return level == 0 ? std::string(features::kBaselineSegment) : "Dual " + std::to_string(level) + "-back";
}

std::uint64_t physio_generator(const PhysioConfig& cfg, MessageSink& sink, const std::function<void(double)>& pace) {
  cfg.validate();
  const auto& p = cfg.profile;
  const double duration = cfg.effective_duration();
  const Timestamp t0 = Timestamp::from_seconds(cfg.start_time_s);
  const Timeline timeline{cfg.schedule};
  auto stamp_of = [&](double t) { return t0.plus_nanos(static_cast<std::int64_t>(std::llround(t * 1e9))); };

  auto scalar = [](const char* id, double hz) {
    return StreamDescriptor{id, StreamKind::PhysiologicalSensor, hz, PayloadSchema::scalar(), kFlagNone};
  };
  // IBI nominal rate follows the mean heart rate.
  Stamper ibi(scalar("human/ibi", 1.0 / p.ibi_mean_s)), ppg(scalar("human/ppg", p.ppg_hz)),
      gsr(scalar("human/gsr", p.gsr_hz)), ecg(scalar("human/ecg", p.ecg_hz));
  Stamper seg_markers({features::kSegmentTopic, StreamKind::BehavioralDevice, 0.1, PayloadSchema::blob(), kFlagNone});
  Stamper stim_markers({features::kStimulusTopic, StreamKind::BehavioralDevice, 0.1, PayloadSchema::blob(), kFlagNone});
  for (auto* s : {&ibi, &ppg, &gsr, &ecg, &seg_markers, &stim_markers}) sink.advertise(s->descriptor());

  std::vector<StampedMessage> out;

  // Beats.
  Rng beat_rng = sub_rng(cfg.seed, 1);
  std::normal_distribution<double> beat_noise(0.0, p.ibi_sd_s > 0 ? p.ibi_sd_s : 1e-12);
  std::vector<double> beats;
  double t = 0;
  while (true) {
    double interval = p.ibi_mean_s + timeline.workload_at(t) * p.ibi_workload_shift_s;
    if (timeline.stimulus_active(t)) interval -= p.ibi_stimulus_dip_s;
    if (p.ibi_sd_s > 0) interval += beat_noise(beat_rng);
    interval = std::clamp(interval, 0.3, 2.0);
    t += interval;
    if (t >= duration) break;
    beats.push_back(t);
    out.push_back(ibi.stamp_at(stamp_of(t), interval));
  }

  auto nearby_beats = [&](double x, auto&& fn) {
    auto it = std::lower_bound(beats.begin(), beats.end(), x - 1.0);
    double v = 0;
    for (; it != beats.end() && *it <= x + 1.0; ++it) v += fn(x - *it);
    return v;
  };

  Rng ecg_rng = sub_rng(cfg.seed, 2);
  std::normal_distribution<double> ecg_noise(0.0, std::max(p.ecg_noise_mv, 1e-12));
  const auto ecg_n = static_cast<std::int64_t>(std::floor(duration * p.ecg_hz - 1e-9)) + 1;
  for (std::int64_t k = 0; k < ecg_n; ++k) {
    const double x = static_cast<double>(k) / p.ecg_hz;
    double v = nearby_beats(x, [&](double d) { return ecg_template(d, p.ecg_amp_mv); });
    if (p.ecg_noise_mv > 0) v += ecg_noise(ecg_rng);
    out.push_back(ecg.stamp_at(stamp_of(x), v));
  }

  Rng ppg_rng = sub_rng(cfg.seed, 3);
  std::normal_distribution<double> ppg_noise(0.0, std::max(p.ppg_noise, 1e-12));
  const auto ppg_n = static_cast<std::int64_t>(std::floor(duration * p.ppg_hz - 1e-9)) + 1;
  for (std::int64_t k = 0; k < ppg_n; ++k) {
    const double x = static_cast<double>(k) / p.ppg_hz;
    double v = nearby_beats(x, [&](double d) { return ppg_template(d, p.ppg_amp, p.ppg_delay_s); });
    if (p.ppg_noise > 0) v += ppg_noise(ppg_rng);
    out.push_back(ppg.stamp_at(stamp_of(x), v));
  }

  Rng gsr_rng = sub_rng(cfg.seed, 4);
  std::normal_distribution<double> gsr_noise(0.0, std::max(p.gsr_noise_us, 1e-12));
  const double drift_phase = std::uniform_real_distribution<double>(0, 2 * std::numbers::pi)(gsr_rng);
  const auto gsr_n = static_cast<std::int64_t>(std::floor(duration * p.gsr_hz - 1e-9)) + 1;
  for (std::int64_t k = 0; k < gsr_n; ++k) {
    const double x = static_cast<double>(k) / p.gsr_hz;
    double v = p.gsr_tonic_us - timeline.workload_at(x) * p.gsr_workload_shift_us +
               p.gsr_drift_amp_us * std::sin(2 * std::numbers::pi * x / p.gsr_drift_period_s + drift_phase);
    for (const auto& e : cfg.schedule.events) {
      if (e.kind != StimulusEvent::Kind::WorkloadLevel) v += phasic_response(x - e.at_s - p.phasic_latency_s, p);
    }
    if (p.gsr_noise_us > 0) v += gsr_noise(gsr_rng);
    out.push_back(gsr.stamp_at(stamp_of(x), v));
  }

  // Markers: segment boundaries for workload levels, onsets for stimuli.
  std::vector<std::pair<double, std::string>> segs;
  for (const auto& e : cfg.schedule.events) {
    if (e.kind == StimulusEvent::Kind::WorkloadLevel) {
      segs.emplace_back(e.at_s, segment_name(e.level));
      const double end = e.at_s + e.duration_s;
      const bool followed = std::any_of(cfg.schedule.events.begin(), cfg.schedule.events.end(), [&](auto& o) {
        return o.kind == StimulusEvent::Kind::WorkloadLevel && o.at_s == end;
      });
      if (!followed && end < duration) segs.emplace_back(end, features::kEndSegment);
    } else {
      out.push_back(features::make_marker(features::kStimulusTopic, kind_name(e.kind), stamp_of(e.at_s), 0));
    }
  }
  for (const auto& [at, name] : segs) {
    out.push_back(features::make_marker(features::kSegmentTopic, name, stamp_of(at), 0));
  }

  std::stable_sort(out.begin(), out.end(), [](const StampedMessage& a, const StampedMessage& b) {
    if (a.stamp != b.stamp) return a.stamp < b.stamp;
    return a.stream < b.stream;
  });
  // Marker sequence numbers are assigned in publish order.
  std::uint64_t seg_seq = 1, stim_seq = 1;
  for (auto& m : out) {
    if (m.stream == features::kSegmentTopic) m.seq = seg_seq++;
    if (m.stream == features::kStimulusTopic) m.seq = stim_seq++;
  }
  double last_paced = -1;
  for (const auto& m : out) {
    if (pace) {
      const double at = static_cast<double>(timestamp_diff(m.stamp, t0)) * 1e-9;
      if (at > last_paced) {
        pace(at);
        last_paced = at;
      }
    }
    sink.publish(m);
  }
  return out.size();
}

}  // namespace condmon::sim
