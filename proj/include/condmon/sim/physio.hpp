#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "condmon/sink.hpp"

namespace condmon::sim {

struct StimulusEvent {
  enum class Kind { ImageOnset, AudioOnset, WorkloadLevel };
  double at_s = 0;
  Kind kind = Kind::ImageOnset;
  int level = 0;  // WorkloadLevel only; 0 marks the baseline
  double duration_s = 0;
};

struct StimulusSchedule {
  std::vector<StimulusEvent> events;  // stamp-sorted, non-overlapping per kind
  void validate() const;              // throws BadConfig
};

struct PhysioProfile {
  double ibi_mean_s = 0.85;
  double ibi_sd_s = 0.03;
  double ibi_workload_shift_s = 0.03;  // per workload level
  double ibi_stimulus_dip_s = 0.08;

  double gsr_tonic_us = 5.0;
  double gsr_noise_us = 0.01;
  double gsr_drift_amp_us = 0.05;
  double gsr_drift_period_s = 30.0;
  double gsr_workload_shift_us = 0.3;  // subtracted per workload level
  double phasic_amp_us = 0.5;
  double phasic_latency_s = 1.5;
  double phasic_tau_s = 4.0;
  double phasic_rise_s = 0.1;

  double ecg_amp_mv = 1.0;
  double ecg_noise_mv = 0.02;
  double ppg_amp = 1.0;
  double ppg_noise = 0.01;
  double ppg_delay_s = 0.25;

  double ppg_hz = 64, gsr_hz = 4, ecg_hz = 130;
};

struct PhysioConfig {
  std::uint64_t seed = 7;
  double start_time_s = 1'700'000'000;
  double duration_s = 0;  // 0: end of the last scheduled event (60 s if none)
  PhysioProfile profile;
  StimulusSchedule schedule;

  double effective_duration() const;
  void validate() const;
};

// Baseline then dual 1-, 2-, 3-back rounds of `round_s` each.
StimulusSchedule workload_schedule(double round_s = 60.0);

std::string segment_name(int level);  // 0 -> "baseline", k -> "Dual k-back"

// Publishes human/ibi (one sample per beat), human/ppg, human/gsr,
// human/ecg plus markers/segment and markers/stimulus, in stamp order.
// Returns the number of messages published.
std::uint64_t physio_generator(const PhysioConfig& cfg, MessageSink& sink,
                               const std::function<void(double)>& pace = {});

}  // namespace condmon::sim
